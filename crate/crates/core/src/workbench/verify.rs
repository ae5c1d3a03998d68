//! Differential verification of engines against the brute-force oracles.
//!
//! A corpus is a list of [`GenSpec`]s, so every failing instance is
//! reproducible from its JSON. Failing specs are shrunk to the smallest
//! `n_per_part` that still fails with the same seed.

use super::gen::{generate, GenKind, GenSpec, Instance};
use crate::budget::TableBudget;
use crate::error::{invalid, Error, Result};
use crate::graph::KPartiteGraph;
use crate::hyperclique::{detect_hyperclique, list_hypercliques};
use crate::hypergraph::UniformHypergraph;
use crate::kclique::{find_witness, CostProfile, KCliqueDetector, ParamPolicy};
use crate::listing::{list_triangles, list_triangles_threshold, ListingConfig};
use crate::oracles::{brute_hypercliques, brute_kclique, brute_triangles};
use crate::triangle::{
    detect_naive, list_sparse_four_russians, list_sparse_pivoted, FourRussiansDetector,
    NaiveDetector, SparseFRParams, TriangleDetector, DEFAULT_MAX_INDEX_BITS,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::borrow::Cow;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Triangles,
    KClique { k: usize },
    Hyperclique { k: usize, r: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Answer {
    Decision(bool),
    Witness(Option<Vec<usize>>),
    /// Distinct witnesses, any order.
    Listing(Vec<Vec<usize>>),
}

pub trait Engine: Sync {
    fn name(&self) -> String;
    fn task(&self) -> Task;
    fn run(&self, inst: &Instance) -> Result<Answer>;
}

fn graph(inst: &Instance) -> Result<&KPartiteGraph> {
    match inst {
        Instance::Graph(g) => Ok(g),
        Instance::Hypergraph(_) => invalid("engine expects a graph"),
    }
}

/// Graphs are read as 2-uniform hypergraphs.
fn hypergraph(inst: &Instance) -> Cow<'_, UniformHypergraph> {
    match inst {
        Instance::Hypergraph(h) => Cow::Borrowed(h),
        Instance::Graph(g) => Cow::Owned(UniformHypergraph::from_graph(g)),
    }
}

/// An engine from a closure.
pub struct FnEngine<F> {
    pub name: String,
    pub task: Task,
    pub run: F,
}

impl<F: Fn(&Instance) -> Result<Answer> + Sync> Engine for FnEngine<F> {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn task(&self) -> Task {
        self.task
    }

    fn run(&self, inst: &Instance) -> Result<Answer> {
        (self.run)(inst)
    }
}

fn engine<F: Fn(&Instance) -> Result<Answer> + Sync + 'static>(
    name: &str,
    task: Task,
    run: F,
) -> Box<dyn Engine> {
    Box::new(FnEngine {
        name: name.to_string(),
        task,
        run,
    })
}

fn listing(r: crate::witness::ListingResult) -> Answer {
    Answer::Listing(r.witnesses)
}

/// The library's own engines for a task.
pub fn default_engines(task: Task) -> Vec<Box<dyn Engine>> {
    match task {
        Task::Triangles => vec![
            engine("detect-naive", task, |i| {
                Ok(Answer::Witness(
                    detect_naive(graph(i)?)?.map(|t| t.to_vec()),
                ))
            }),
            engine("detect-four-russians", task, |i| {
                Ok(Answer::Witness(
                    FourRussiansDetector::default()
                        .detect(graph(i)?)?
                        .map(|t| t.to_vec()),
                ))
            }),
            engine("sparse-fr", task, |i| {
                let g = graph(i)?;
                let p =
                    SparseFRParams::for_graph(g, DEFAULT_MAX_INDEX_BITS, TableBudget::default());
                Ok(listing(list_sparse_four_russians(g, None, &p)?))
            }),
            engine("sparse-fr-pivot", task, |i| {
                let g = graph(i)?;
                let p =
                    SparseFRParams::for_pivoted(g, DEFAULT_MAX_INDEX_BITS, TableBudget::default());
                Ok(listing(list_sparse_pivoted(g, None, &p)?))
            }),
            engine("regularity", task, |i| {
                let g = graph(i)?;
                Ok(listing(
                    list_triangles(g, None, &ListingConfig::for_graph(g, 7))?.result,
                ))
            }),
            engine("regularity-threshold", task, |i| {
                let g = graph(i)?;
                Ok(listing(
                    list_triangles_threshold(g, None, &ListingConfig::for_graph(g, 7))?.result,
                ))
            }),
        ],
        Task::KClique { .. } => {
            let mut v: Vec<Box<dyn Engine>> = Vec::new();
            let policies = [
                ("formula", ParamPolicy::Formula(CostProfile::NAIVE)),
                (
                    "fixed",
                    ParamPolicy::Fixed {
                        alpha: 0.25,
                        depth_cap: 3,
                    },
                ),
            ];
            for (pname, policy) in policies {
                v.push(engine(&format!("kclique-naive-{pname}"), task, move |i| {
                    Ok(Answer::Decision(
                        KCliqueDetector::new(&NaiveDetector, policy).detect(graph(i)?)?,
                    ))
                }));
                v.push(engine(&format!("kclique-fr-{pname}"), task, move |i| {
                    let fr = FourRussiansDetector::default();
                    Ok(Answer::Decision(
                        KCliqueDetector::new(&fr, policy).detect(graph(i)?)?,
                    ))
                }));
            }
            v.push(engine("find-witness", task, move |i| {
                let g = graph(i)?;
                let det = KCliqueDetector::new(
                    &NaiveDetector,
                    ParamPolicy::Fixed {
                        alpha: 0.25,
                        depth_cap: 3,
                    },
                );
                Ok(Answer::Witness(find_witness(&|h| det.detect(h), g, g.k())?))
            }));
            v
        }
        Task::Hyperclique { k, .. } => vec![
            engine("list-hypercliques", task, move |i| {
                Ok(listing(list_hypercliques(&hypergraph(i), k, None)?))
            }),
            engine("detect-hyperclique", task, move |i| {
                Ok(Answer::Decision(detect_hyperclique(&hypergraph(i), k)?))
            }),
        ],
    }
}

/// Every oracle answer for one instance.
struct Truth {
    listing: Option<Vec<Vec<usize>>>,
    exists: bool,
}

fn truth(task: Task, inst: &Instance) -> Result<Truth> {
    Ok(match (task, inst) {
        (Task::Triangles, Instance::Graph(g)) => {
            let l = brute_triangles(g)?.witnesses;
            Truth {
                exists: !l.is_empty(),
                listing: Some(l),
            }
        }
        (Task::KClique { k }, Instance::Graph(g)) => Truth {
            exists: brute_kclique(g, k).is_some(),
            listing: None,
        },
        (Task::Hyperclique { k, .. }, inst) => {
            let l = brute_hypercliques(&hypergraph(inst), k, None)?.witnesses;
            Truth {
                exists: !l.is_empty(),
                listing: Some(l),
            }
        }
        _ => return invalid(format!("instance does not match task {task:?}")),
    })
}

/// Is `w` a witness for `task` in `inst`?
pub fn valid_witness(task: Task, inst: &Instance, w: &[usize]) -> bool {
    match inst {
        Instance::Graph(g) => {
            let k = match task {
                Task::Triangles => 3,
                Task::KClique { k } => k,
                Task::Hyperclique { k, .. } => k,
            };
            w.len() == k
                && g.k() == k
                && w.iter()
                    .enumerate()
                    .all(|(i, &v)| v < g.n() && g.part_of(v) == i)
                && w.iter()
                    .enumerate()
                    .all(|(a, &u)| w[a + 1..].iter().all(|&v| g.has_edge(u, v)))
        }
        Instance::Hypergraph(h) => {
            w.len() == h.k()
                && w.iter()
                    .enumerate()
                    .all(|(i, &v)| v < h.n() && h.part_of(v) == i)
                && crate::hyperclique::index_sets(h.k(), h.r())
                    .iter()
                    .all(|set| {
                        let e: Vec<usize> = set.iter().map(|&i| w[i]).collect();
                        h.contains_sorted(&e)
                    })
        }
    }
}

/// `None` when the answer is right, else a description of the mismatch.
fn judge(task: Task, inst: &Instance, t: &Truth, a: &Answer) -> Option<String> {
    match a {
        Answer::Decision(d) => {
            (*d != t.exists).then(|| format!("decision {d}, oracle {}", t.exists))
        }
        Answer::Witness(None) => t.exists.then(|| "no witness, oracle found one".to_string()),
        Answer::Witness(Some(w)) => {
            if !valid_witness(task, inst, w) {
                Some(format!("invalid witness {w:?}"))
            } else {
                None
            }
        }
        Answer::Listing(l) => {
            let Some(want) = &t.listing else {
                return Some("listing not supported for this task".into());
            };
            let mut got = l.clone();
            got.sort();
            let before = got.len();
            got.dedup();
            if before != got.len() {
                return Some(format!("{} duplicate witnesses", before - got.len()));
            }
            (got != *want).then(|| format!("listed {} witnesses, oracle {}", got.len(), want.len()))
        }
    }
}

/// How to draw a corpus for one task.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorpusSpec {
    pub task: Task,
    pub random: usize,
    pub planted: usize,
    pub max_n_per_part: usize,
    pub probabilities: Vec<f64>,
    pub seed: u64,
}

impl CorpusSpec {
    pub fn new(
        task: Task,
        random: usize,
        planted: usize,
        max_n_per_part: usize,
        seed: u64,
    ) -> Self {
        CorpusSpec {
            task,
            random,
            planted,
            max_n_per_part,
            probabilities: vec![0.05, 0.1, 0.3, 0.5, 0.9],
            seed,
        }
    }

    pub fn specs(&self) -> Vec<GenSpec> {
        let (k, r, random_kind, planted_kind) = match self.task {
            Task::Triangles => (3, 2, GenKind::GnpKpartite, GenKind::PlantedClique),
            Task::KClique { k } => (k, 2, GenKind::GnpKpartite, GenKind::PlantedClique),
            Task::Hyperclique { k, r } => {
                (k, r, GenKind::GnpHypergraph, GenKind::PlantedHyperclique)
            }
        };
        let max_n = self.max_n_per_part.max(1);
        let mut out = Vec::with_capacity(self.random + self.planted);
        for i in 0..self.random + self.planted {
            let seed = self
                .seed
                .wrapping_mul(0x9E37_79B9_7F4A_7C15)
                .wrapping_add(i as u64);
            let planted = i >= self.random;
            let n = 1 + (seed.wrapping_mul(0x2545_F491_4F6C_DD1D) >> 33) as usize % max_n;
            let p = if planted {
                0.1
            } else if self.probabilities.is_empty() {
                0.5
            } else {
                self.probabilities[i % self.probabilities.len()]
            };
            out.push(GenSpec {
                kind: if planted { planted_kind } else { random_kind },
                n_per_part: n,
                k,
                r,
                p,
                plant_count: usize::from(planted),
                seed,
            });
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mismatch {
    pub engine: String,
    pub spec: GenSpec,
    /// Smallest `n_per_part` with the same seed that still fails.
    pub minimized: GenSpec,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub instances: usize,
    pub engines: Vec<String>,
    pub checks: usize,
    pub mismatches: Vec<Mismatch>,
    /// Engines that returned an error, with the reproducer.
    pub errors: Vec<Mismatch>,
}

impl VerifyReport {
    pub fn ok(&self) -> bool {
        self.mismatches.is_empty() && self.errors.is_empty()
    }
}

enum Outcome {
    Pass,
    Wrong(String),
    Failed(String),
}

fn check_one(e: &dyn Engine, spec: &GenSpec) -> Result<Outcome> {
    let inst = generate(spec)?;
    let t = truth(e.task(), &inst)?;
    Ok(match e.run(&inst) {
        Ok(a) => match judge(e.task(), &inst, &t, &a) {
            None => Outcome::Pass,
            Some(d) => Outcome::Wrong(d),
        },
        Err(Error::ResourceLimit { .. }) => Outcome::Pass,
        Err(err) => Outcome::Failed(err.to_string()),
    })
}

fn minimize(e: &dyn Engine, spec: &GenSpec) -> GenSpec {
    for n in 1..spec.n_per_part {
        let smaller = GenSpec {
            n_per_part: n,
            plant_count: spec.plant_count.min(n),
            ..spec.clone()
        };
        if matches!(
            check_one(e, &smaller),
            Ok(Outcome::Wrong(_) | Outcome::Failed(_))
        ) {
            return smaller;
        }
    }
    spec.clone()
}

/// Runs every engine on every spec, spreading specs over the rayon pool when
/// `parallel`. Resource-limit refusals count as passes.
pub fn verify(
    engines: &[Box<dyn Engine>],
    specs: &[GenSpec],
    parallel: bool,
) -> Result<VerifyReport> {
    let one = |spec: &GenSpec| -> Result<Vec<(bool, Mismatch)>> {
        let mut bad = Vec::new();
        for e in engines {
            let (is_error, detail) = match check_one(e.as_ref(), spec)? {
                Outcome::Pass => continue,
                Outcome::Wrong(d) => (false, d),
                Outcome::Failed(d) => (true, d),
            };
            bad.push((
                is_error,
                Mismatch {
                    engine: e.name(),
                    spec: spec.clone(),
                    minimized: minimize(e.as_ref(), spec),
                    detail,
                },
            ));
        }
        Ok(bad)
    };
    let results: Vec<Result<Vec<(bool, Mismatch)>>> = if parallel {
        specs.par_iter().map(one).collect()
    } else {
        specs.iter().map(one).collect()
    };
    let mut report = VerifyReport {
        instances: specs.len(),
        engines: engines.iter().map(|e| e.name()).collect(),
        checks: specs.len() * engines.len(),
        ..Default::default()
    };
    for r in results {
        for (is_error, m) in r? {
            if is_error {
                report.errors.push(m);
            } else {
                report.mismatches.push(m);
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_engines_pass_small_corpora() {
        for (task, n) in [
            (Task::Triangles, 8),
            (Task::KClique { k: 4 }, 5),
            (Task::Hyperclique { k: 4, r: 3 }, 4),
        ] {
            let specs = CorpusSpec::new(task, 15, 5, n, 11).specs();
            let report = verify(&default_engines(task), &specs, true).unwrap();
            assert!(report.ok(), "{task:?}: {report:?}");
            assert_eq!(report.instances, 20);
        }
    }

    #[test]
    fn broken_engine_is_caught_and_minimized() {
        let task = Task::Triangles;
        let broken: Vec<Box<dyn Engine>> =
            vec![engine("always-no", task, |_| Ok(Answer::Decision(false)))];
        let mut specs = CorpusSpec::new(task, 0, 3, 9, 5).specs();
        specs.iter_mut().for_each(|s| s.n_per_part = 9);
        let report = verify(&broken, &specs, false).unwrap();
        assert_eq!(report.mismatches.len(), 3);
        for m in &report.mismatches {
            // one planted triangle already needs just one vertex per part
            assert_eq!(m.minimized.n_per_part, 1);
            let json = serde_json::to_string(&m.minimized).unwrap();
            let back: GenSpec = serde_json::from_str(&json).unwrap();
            assert!(matches!(
                check_one(broken[0].as_ref(), &back).unwrap(),
                Outcome::Wrong(_)
            ));
        }
        let liar: Vec<Box<dyn Engine>> = vec![engine("bad-witness", task, |_| {
            Ok(Answer::Witness(Some(vec![0, 0, 0])))
        })];
        assert!(!verify(&liar, &specs, true).unwrap().ok());
    }

    #[test]
    fn witness_check() {
        let g = KPartiteGraph::complete(vec![2, 2, 2]);
        let inst = Instance::Graph(g);
        assert!(valid_witness(Task::Triangles, &inst, &[1, 2, 5]));
        assert!(!valid_witness(Task::Triangles, &inst, &[2, 1, 5]));
        assert!(!valid_witness(Task::Triangles, &inst, &[1, 2]));
    }
}
