//! Memory guard for precomputed lookup tables.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

pub const MAX_TABLE_BYTES_ENV: &str = "CLIQUELAB_MAX_TABLE_BYTES";
pub const DEFAULT_MAX_TABLE_BYTES: u64 = 256 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableBudget {
    pub max_bytes: u64,
}

impl Default for TableBudget {
    fn default() -> Self {
        TableBudget {
            max_bytes: DEFAULT_MAX_TABLE_BYTES,
        }
    }
}

impl TableBudget {
    pub fn new(max_bytes: u64) -> Self {
        TableBudget { max_bytes }
    }

    /// Reads `CLIQUELAB_MAX_TABLE_BYTES`, falling back to the default.
    pub fn from_env() -> Result<Self> {
        match std::env::var(MAX_TABLE_BYTES_ENV) {
            Ok(v) => v.trim().parse().map(TableBudget::new).map_err(|_| {
                Error::InvalidParameter(format!("{MAX_TABLE_BYTES_ENV}={v} is not a byte count"))
            }),
            Err(_) => Ok(TableBudget::default()),
        }
    }

    pub fn allows(&self, bytes: u128) -> bool {
        bytes <= self.max_bytes as u128
    }

    pub fn check(&self, what: &str, bytes: u128) -> Result<()> {
        if self.allows(bytes) {
            Ok(())
        } else {
            Err(Error::ResourceLimit {
                what: format!("{what} (bytes)"),
                required: bytes,
                limit: self.max_bytes as u128,
            })
        }
    }
}

pub(crate) fn check_index_bits(what: &str, bits: u32, max_bits: u32) -> Result<()> {
    if bits <= max_bits {
        Ok(())
    } else {
        Err(Error::ResourceLimit {
            what: format!("{what} (index bits)"),
            required: bits as u128,
            limit: max_bits as u128,
        })
    }
}
