//! Wall-clock comparison of the triangle detectors.

use super::gen::{generate, GenKind, GenSpec, Instance};
use crate::budget::TableBudget;
use crate::error::{invalid, Error, Result};
use crate::graph::KPartiteGraph;
use crate::oracles::brute_triangles;
use crate::triangle::{
    detect_naive, detect_scalar_reference, FourRussiansDetector, TriangleDetector,
};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::time::Instant;

pub const BENCH_ENGINES: [&str; 3] = ["scalar", "naive", "four-russians"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub sizes: Vec<usize>,
    pub repeats: usize,
    pub kind: GenKind,
    pub p: f64,
    pub seed: u64,
    pub engines: Vec<String>,
    /// Speedups are relative to this engine.
    pub baseline: String,
    /// Check decisions against the brute-force oracle up to this part size.
    pub verify_cutoff: usize,
    /// The scalar triple loop is skipped above this part size.
    pub scalar_max_n: usize,
    pub budget: TableBudget,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            sizes: vec![512, 1024, 2048, 4096],
            repeats: 5,
            kind: GenKind::TriangleFreeDense,
            p: 0.5,
            seed: 1,
            engines: BENCH_ENGINES.iter().map(ToString::to_string).collect(),
            baseline: "scalar".into(),
            verify_cutoff: 256,
            scalar_max_n: 2048,
            budget: TableBudget::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RowStatus {
    Ok,
    ResourceLimit,
    Skipped,
    Mismatch,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub engine: String,
    pub n_per_part: usize,
    pub status: RowStatus,
    pub times_ms: Vec<f64>,
    pub median_ms: Option<f64>,
    pub speedup: Option<f64>,
    pub found: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub schema: u32,
    pub config: BenchConfig,
    pub rows: Vec<BenchRow>,
}

fn run_engine(name: &str, g: &KPartiteGraph, budget: TableBudget) -> Result<bool> {
    Ok(match name {
        "scalar" => detect_scalar_reference(g)?.is_some(),
        "naive" => detect_naive(g)?.is_some(),
        "four-russians" => FourRussiansDetector {
            budget,
            ..Default::default()
        }
        .detect(g)?
        .is_some(),
        other => return invalid(format!("unknown bench engine `{other}`")),
    })
}

pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        (v[m - 1] + v[m]) / 2.0
    }
}

pub fn run_bench(cfg: &BenchConfig) -> Result<BenchReport> {
    if cfg.repeats == 0 {
        return invalid("repeats must be at least 1");
    }
    if let Some(e) = cfg
        .engines
        .iter()
        .find(|e| !BENCH_ENGINES.contains(&e.as_str()))
    {
        return invalid(format!("unknown bench engine `{e}`"));
    }
    let mut rows = Vec::new();
    for &n in &cfg.sizes {
        let spec = GenSpec {
            kind: cfg.kind,
            ..GenSpec::gnp(n, 3, cfg.p, cfg.seed)
        };
        let Instance::Graph(g) = generate(&spec)? else {
            return invalid("bench instances must be graphs");
        };
        let truth = (n <= cfg.verify_cutoff)
            .then(|| brute_triangles(&g).map(|l| !l.is_empty()))
            .transpose()?;
        let start = rows.len();
        for name in &cfg.engines {
            let mut row = BenchRow {
                engine: name.clone(),
                n_per_part: n,
                status: RowStatus::Ok,
                times_ms: Vec::new(),
                median_ms: None,
                speedup: None,
                found: None,
            };
            if name == "scalar" && n > cfg.scalar_max_n {
                row.status = RowStatus::Skipped;
                rows.push(row);
                continue;
            }
            for _ in 0..cfg.repeats {
                let t0 = Instant::now();
                match run_engine(name, &g, cfg.budget) {
                    Ok(found) => {
                        row.times_ms.push(t0.elapsed().as_secs_f64() * 1e3);
                        row.found = Some(found);
                    }
                    Err(Error::ResourceLimit { .. }) => {
                        row.status = RowStatus::ResourceLimit;
                        break;
                    }
                    Err(e) => return Err(e),
                }
            }
            if !row.times_ms.is_empty() {
                row.median_ms = Some(median(&row.times_ms));
            }
            if truth.is_some() && row.found.is_some() && row.found != truth {
                row.status = RowStatus::Mismatch;
            }
            rows.push(row);
        }
        // engines must agree with each other even above the oracle cutoff
        let answers: Vec<bool> = rows[start..].iter().filter_map(|r| r.found).collect();
        if answers.windows(2).any(|w| w[0] != w[1]) {
            rows[start..]
                .iter_mut()
                .filter(|r| r.found.is_some())
                .for_each(|r| r.status = RowStatus::Mismatch);
        }
        let base = rows[start..]
            .iter()
            .find(|r| r.engine == cfg.baseline)
            .and_then(|r| r.median_ms);
        for r in &mut rows[start..] {
            if let (Some(b), Some(m)) = (base, r.median_ms) {
                r.speedup = Some(b / m.max(1e-9));
            }
        }
    }
    Ok(BenchReport {
        schema: 1,
        config: cfg.clone(),
        rows,
    })
}

impl BenchReport {
    pub fn has_mismatch(&self) -> bool {
        self.rows.iter().any(|r| r.status == RowStatus::Mismatch)
    }

    pub fn row(&self, engine: &str, n: usize) -> Option<&BenchRow> {
        self.rows
            .iter()
            .find(|r| r.engine == engine && r.n_per_part == n)
    }

    pub fn table(&self) -> String {
        let mut out = String::new();
        writeln!(
            out,
            "{:<15} {:>7} {:>12} {:>10} {:>6}  status",
            "engine", "n/part", "median ms", "speedup", "found"
        )
        .unwrap();
        for r in &self.rows {
            let med = r.median_ms.map_or("-".into(), |m| format!("{m:.3}"));
            let sp = r.speedup.map_or("-".into(), |s| format!("{s:.2}x"));
            let found = r.found.map_or("-".into(), |f| f.to_string());
            let status = serde_json::to_value(r.status).unwrap();
            writeln!(
                out,
                "{:<15} {:>7} {:>12} {:>10} {:>6}  {}",
                r.engine,
                r.n_per_part,
                med,
                sp,
                found,
                status.as_str().unwrap_or("?")
            )
            .unwrap();
        }
        out
    }
}
