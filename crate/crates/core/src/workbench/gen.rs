//! Seeded instance generators.
//!
//! Every generator draws from `ChaCha8Rng::seed_from_u64(seed)` in a fixed
//! order (ascending `u < v`, or ascending tuples), so a seed names the same
//! instance on every platform.

use crate::error::{invalid, Result};
use crate::graph::{GraphBuilder, KPartiteGraph};
use crate::hypergraph::UniformHypergraph;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GenKind {
    GnpKpartite,
    PlantedClique,
    GnpHypergraph,
    PlantedHyperclique,
    /// Tripartite, density about ½, no triangles: a 2-colouring with edges
    /// only between opposite colours.
    TriangleFreeDense,
}

impl std::str::FromStr for GenKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s {
            "gnp-kpartite" => GenKind::GnpKpartite,
            "planted-clique" => GenKind::PlantedClique,
            "gnp-hypergraph" => GenKind::GnpHypergraph,
            "planted-hyperclique" => GenKind::PlantedHyperclique,
            "triangle-free-dense" => GenKind::TriangleFreeDense,
            other => return Err(format!("unknown generator kind `{other}`")),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub kind: GenKind,
    pub n_per_part: usize,
    pub k: usize,
    /// Uniformity; ignored by graph kinds.
    pub r: usize,
    pub p: f64,
    pub plant_count: usize,
    pub seed: u64,
}

impl GenSpec {
    pub fn gnp(n_per_part: usize, k: usize, p: f64, seed: u64) -> Self {
        GenSpec {
            kind: GenKind::GnpKpartite,
            n_per_part,
            k,
            r: 2,
            p,
            plant_count: 0,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.p) {
            return invalid(format!("probability {} not in [0, 1]", self.p));
        }
        if self.n_per_part == 0 || self.k == 0 {
            return invalid("part size and part count must be positive");
        }
        match self.kind {
            GenKind::GnpHypergraph | GenKind::PlantedHyperclique
                if self.r < 2 || self.r > self.k =>
            {
                invalid(format!(
                    "need 2 <= r <= k, got r = {}, k = {}",
                    self.r, self.k
                ))
            }
            GenKind::PlantedClique | GenKind::PlantedHyperclique
                if self.plant_count > self.n_per_part =>
            {
                invalid(format!(
                    "{} vertex-disjoint plants need {} vertices per part",
                    self.plant_count, self.plant_count
                ))
            }
            GenKind::TriangleFreeDense if self.k != 3 => {
                invalid("triangle-free-dense instances have k = 3")
            }
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Instance {
    Graph(KPartiteGraph),
    Hypergraph(UniformHypergraph),
}

pub fn generate(spec: &GenSpec) -> Result<Instance> {
    spec.validate()?;
    let (n, k) = (spec.n_per_part, spec.k);
    Ok(match spec.kind {
        GenKind::GnpKpartite => Instance::Graph(gnp_kpartite(n, k, spec.p, spec.seed)),
        GenKind::PlantedClique => {
            Instance::Graph(planted_clique(n, k, spec.p, spec.plant_count, spec.seed).0)
        }
        GenKind::GnpHypergraph => {
            Instance::Hypergraph(gnp_hypergraph(n, k, spec.r, spec.p, spec.seed)?)
        }
        GenKind::PlantedHyperclique => Instance::Hypergraph(
            planted_hyperclique(n, k, spec.r, spec.p, spec.plant_count, spec.seed)?.0,
        ),
        GenKind::TriangleFreeDense => Instance::Graph(triangle_free_dense(n, spec.seed)),
    })
}

fn add_noise(b: &mut GraphBuilder, p: f64, rng: &mut ChaCha8Rng) {
    let g = b.graph().clone();
    for u in 0..g.n() {
        for v in g.part_range(g.part_of(u)).end..g.n() {
            if rng.random_bool(p) {
                b.add_edge(u, v).expect("cross-part pair");
            }
        }
    }
}

/// Each cross-part pair independently with probability `p`.
pub fn gnp_kpartite(n_per_part: usize, k: usize, p: f64, seed: u64) -> KPartiteGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = GraphBuilder::new(vec![n_per_part; k]);
    add_noise(&mut b, p, &mut rng);
    b.build()
}

/// `plants[i][p]` is the vertex of part `p` used by plant `i`: a random
/// injection per part, so plants are vertex-disjoint.
fn draw_plants(sizes: &[usize], count: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<usize>> {
    let mut offset = 0;
    let mut columns = Vec::new();
    for &s in sizes {
        let mut ids: Vec<usize> = (offset..offset + s).collect();
        ids.shuffle(rng);
        columns.push(ids);
        offset += s;
    }
    (0..count)
        .map(|i| columns.iter().map(|c| c[i]).collect())
        .collect()
}

/// `plant_count` vertex-disjoint k-cliques, then `G(n, p)` noise on top.
pub fn planted_clique(
    n_per_part: usize,
    k: usize,
    p: f64,
    plant_count: usize,
    seed: u64,
) -> (KPartiteGraph, Vec<Vec<usize>>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sizes = vec![n_per_part; k];
    let plants = draw_plants(&sizes, plant_count.min(n_per_part), &mut rng);
    let mut b = GraphBuilder::new(sizes);
    for c in &plants {
        for (a, &u) in c.iter().enumerate() {
            for &v in &c[a + 1..] {
                b.add_edge(u, v)
                    .expect("plant vertices lie in distinct parts");
            }
        }
    }
    add_noise(&mut b, p, &mut rng);
    (b.build(), plants)
}

fn hyper_noise(h: &UniformHypergraph, p: f64, rng: &mut ChaCha8Rng, edges: &mut Vec<Vec<usize>>) {
    h.for_each_cross_tuple(|t| {
        if rng.random_bool(p) {
            edges.push(t.to_vec());
        }
    });
}

pub fn gnp_hypergraph(
    n_per_part: usize,
    k: usize,
    r: usize,
    p: f64,
    seed: u64,
) -> Result<UniformHypergraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let empty = UniformHypergraph::new(r, vec![n_per_part; k], [])?;
    let mut edges = Vec::new();
    hyper_noise(&empty, p, &mut rng, &mut edges);
    UniformHypergraph::new(r, vec![n_per_part; k], edges)
}

/// Vertex-disjoint planted hypercliques (every r-subset of each plant is a
/// hyperedge), then noise hyperedges.
pub fn planted_hyperclique(
    n_per_part: usize,
    k: usize,
    r: usize,
    p: f64,
    plant_count: usize,
    seed: u64,
) -> Result<(UniformHypergraph, Vec<Vec<usize>>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sizes = vec![n_per_part; k];
    let plants = draw_plants(&sizes, plant_count.min(n_per_part), &mut rng);
    let empty = UniformHypergraph::new(r, sizes.clone(), [])?;
    let mut edges = Vec::new();
    let subsets = crate::hyperclique::index_sets(k, r);
    for c in &plants {
        for set in &subsets {
            edges.push(set.iter().map(|&i| c[i]).collect());
        }
    }
    hyper_noise(&empty, p, &mut rng, &mut edges);
    Ok((UniformHypergraph::new_dedup(r, sizes, edges)?, plants))
}

/// Every vertex gets a random colour; all cross-part pairs of opposite
/// colour are edges. Any triangle would need two same-coloured vertices.
pub fn triangle_free_dense(n_per_part: usize, seed: u64) -> KPartiteGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = 3 * n_per_part;
    let colour: Vec<bool> = (0..n).map(|_| rng.random_bool(0.5)).collect();
    let mut b = GraphBuilder::new(vec![n_per_part; 3]);
    for u in 0..n {
        for v in (u / n_per_part + 1) * n_per_part..n {
            if colour[u] != colour[v] {
                b.add_edge(u, v).expect("cross-part pair");
            }
        }
    }
    b.build()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::{brute_hypercliques, brute_kclique, brute_triangles};

    #[test]
    fn extremes_and_determinism() {
        assert_eq!(gnp_kpartite(5, 3, 0.0, 1).edge_count(), 0);
        assert_eq!(
            gnp_kpartite(5, 3, 1.0, 1),
            KPartiteGraph::complete(vec![5; 3])
        );
        assert_eq!(gnp_kpartite(9, 4, 0.4, 77), gnp_kpartite(9, 4, 0.4, 77));
        assert_ne!(gnp_kpartite(9, 4, 0.4, 77), gnp_kpartite(9, 4, 0.4, 78));
    }

    #[test]
    fn plants_survive_noise() {
        let (g, plants) = planted_clique(10, 5, 0.3, 4, 3);
        assert_eq!(plants.len(), 4);
        for c in &plants {
            for (a, &u) in c.iter().enumerate() {
                assert!(c[a + 1..].iter().all(|&v| g.has_edge(u, v)));
            }
        }
        assert!(brute_kclique(&g, 5).is_some());
        let (h, plants) = planted_hyperclique(5, 4, 3, 0.1, 2, 9).unwrap();
        let found = brute_hypercliques(&h, 4, None).unwrap().as_set();
        assert!(plants.iter().all(|p| found.contains(p)));
    }

    #[test]
    fn triangle_free_is_triangle_free() {
        let g = triangle_free_dense(30, 4);
        assert!(brute_triangles(&g).unwrap().is_empty());
        let density = g.edge_count() as f64 / (3.0 * 30.0 * 30.0);
        assert!((0.35..0.65).contains(&density), "{density}");
    }
}
