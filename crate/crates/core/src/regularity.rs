//! Weak regularity partitions of the bipartite graph between two parts.
//!
//! Pieces never straddle the two sides. A partition is checked by drawing
//! random disjoint pairs `(S, T)` of subsets of `U = V_a ∪ V_b` and comparing
//! `e(S, T)` with the density estimate `Σ δ_ij |S ∩ U_i| |T ∩ U_j|`.

use crate::bits::{and_count, BitSet};
use crate::error::{invalid, Result};
use crate::graph::KPartiteGraph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// `e(S, T) / (|S| |T|)` kept as the exact pair of integers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Density {
    pub edges: u64,
    pub pairs: u64,
}

impl Density {
    pub fn value(&self) -> f64 {
        if self.pairs == 0 {
            0.0
        } else {
            self.edges as f64 / self.pairs as f64
        }
    }
}

fn mask_of(g: &KPartiteGraph, vs: &[usize]) -> Result<BitSet> {
    let mut m = BitSet::new(g.n());
    for &v in vs {
        if v >= g.n() {
            return invalid(format!("vertex {v} out of range (n = {})", g.n()));
        }
        m.insert(v);
    }
    Ok(m)
}

fn count_between_masks(g: &KPartiteGraph, s: &BitSet, t: &BitSet) -> u64 {
    s.iter()
        .map(|u| and_count(g.row(u), t.words()) as u64)
        .sum()
}

/// `e(S, T)` for disjoint vertex sets.
pub fn edge_count_between(g: &KPartiteGraph, s: &[usize], t: &[usize]) -> Result<u64> {
    let (ms, mt) = (mask_of(g, s)?, mask_of(g, t)?);
    if ms.intersects(&mt) {
        return invalid("edge count needs disjoint vertex sets");
    }
    Ok(count_between_masks(g, &ms, &mt))
}

pub fn density(g: &KPartiteGraph, s: &[usize], t: &[usize]) -> Result<Density> {
    let edges = edge_count_between(g, s, t)?;
    let (ms, mt) = (mask_of(g, s)?, mask_of(g, t)?);
    if ms.is_empty() || mt.is_empty() {
        return invalid("density of an empty vertex set");
    }
    Ok(Density {
        edges,
        pairs: (ms.count() * mt.count()) as u64,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegularityConfig {
    pub epsilon: f64,
    /// `δ`; only feeds the default sample count.
    pub fail_prob: f64,
    pub max_pieces: usize,
    pub refinement_budget: usize,
    pub sample_count: usize,
    pub rng_seed: u64,
    /// Local-improvement rounds applied to every sampled pair. 0 checks the
    /// raw uniform samples only.
    pub polish_rounds: usize,
}

pub const DEFAULT_POLISH_ROUNDS: usize = 2;

/// `1 / √(log2 n)` clamped to `[0.02, 0.25]`.
pub fn default_epsilon(n: usize) -> f64 {
    (1.0 / (n.max(2) as f64).log2().sqrt()).clamp(0.02, 0.25)
}

impl RegularityConfig {
    pub fn new(epsilon: f64, n: usize, seed: u64) -> Result<Self> {
        let fail_prob = 0.01;
        let cfg = RegularityConfig {
            epsilon,
            fail_prob,
            max_pieces: default_max_pieces(epsilon, n),
            refinement_budget: ((1.0 / (epsilon * epsilon)).ceil() as usize).clamp(4, 64),
            sample_count: default_samples(epsilon, fail_prob),
            rng_seed: seed,
            polish_rounds: DEFAULT_POLISH_ROUNDS,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Defaults for the bipartite view between parts 1 and 2 of `g`.
    pub fn for_graph(g: &KPartiteGraph, seed: u64) -> Self {
        let n = if g.k() >= 3 {
            g.part_size(1) + g.part_size(2)
        } else {
            g.n()
        };
        Self::new(default_epsilon(n), n, seed).expect("default configuration is valid")
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return invalid(format!("epsilon {} not in (0, 1)", self.epsilon));
        }
        if !(self.fail_prob > 0.0 && self.fail_prob < 1.0) {
            return invalid(format!(
                "failure probability {} not in (0, 1)",
                self.fail_prob
            ));
        }
        if self.max_pieces < 2 || self.refinement_budget == 0 || self.sample_count == 0 {
            return invalid("max_pieces must be at least 2 and budgets positive");
        }
        Ok(())
    }
}

fn default_max_pieces(epsilon: f64, n: usize) -> usize {
    let e = (1.0 / epsilon).ceil();
    let cap = if e >= 62.0 {
        usize::MAX
    } else {
        1usize << e as u32
    };
    cap.min(n.max(2))
}

fn default_samples(epsilon: f64, fail_prob: f64) -> usize {
    ((4.0 * (1.0 / fail_prob).ln() / epsilon).ceil() as usize).clamp(32, 4096)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub samples: usize,
    pub violations: usize,
    /// Largest `|e(S, T) − estimate| / n²` seen, `n = |U|`.
    pub max_error: f64,
    pub pass_fraction: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PseudoregularPartition {
    /// The two parts whose union `U` is partitioned.
    pub sides: [usize; 2],
    /// Ascending vertex lists; each lies inside one side.
    pub pieces: Vec<Vec<usize>>,
    pub piece_side: Vec<usize>,
    /// `δ_ij`; zero for two pieces on the same side.
    pub densities: Vec<Vec<Density>>,
    pub epsilon: f64,
    pub verified: bool,
    pub rounds: usize,
    pub last_check: Option<CheckReport>,
}

impl PseudoregularPartition {
    /// One piece per side.
    pub fn trivial(g: &KPartiteGraph, sides: [usize; 2], epsilon: f64) -> Result<Self> {
        check_sides(g, sides)?;
        let mut pieces = Vec::new();
        let mut piece_side = Vec::new();
        for &s in &sides {
            if g.part_size(s) > 0 {
                pieces.push(g.part_range(s).collect());
                piece_side.push(s);
            }
        }
        if pieces.is_empty() {
            return invalid("both sides of the bipartite view are empty");
        }
        Self::with_pieces(g, sides, pieces, epsilon)
    }

    /// Validates side-pure pieces covering `U` and computes their densities.
    pub fn with_pieces(
        g: &KPartiteGraph,
        sides: [usize; 2],
        pieces: Vec<Vec<usize>>,
        epsilon: f64,
    ) -> Result<Self> {
        check_sides(g, sides)?;
        let mut seen = BitSet::new(g.n());
        let mut piece_side = Vec::with_capacity(pieces.len());
        let mut sorted = Vec::with_capacity(pieces.len());
        for mut p in pieces {
            p.sort_unstable();
            let Some(&first) = p.first() else {
                return invalid("empty piece");
            };
            let side = g.part_of(first);
            if !sides.contains(&side) {
                return invalid(format!("vertex {first} is outside the bipartite view"));
            }
            for &v in &p {
                if v >= g.n() || g.part_of(v) != side {
                    return invalid(format!("piece mixes sides at vertex {v}"));
                }
                if seen.contains(v) {
                    return invalid(format!("vertex {v} is in two pieces"));
                }
                seen.insert(v);
            }
            piece_side.push(side);
            sorted.push(p);
        }
        let covered = seen.count_in(g.part_range(sides[0])) + seen.count_in(g.part_range(sides[1]));
        if covered != g.part_size(sides[0]) + g.part_size(sides[1]) {
            return invalid("pieces do not cover both sides");
        }
        let densities = piece_densities(g, &sorted);
        Ok(PseudoregularPartition {
            sides,
            pieces: sorted,
            piece_side,
            densities,
            epsilon,
            verified: false,
            rounds: 0,
            last_check: None,
        })
    }

    /// `k_P`.
    pub fn piece_count(&self) -> usize {
        self.pieces.len()
    }

    /// Indices of the pieces on side `side`.
    pub fn pieces_on(&self, side: usize) -> Vec<usize> {
        (0..self.pieces.len())
            .filter(|&i| self.piece_side[i] == side)
            .collect()
    }
}

fn check_sides(g: &KPartiteGraph, sides: [usize; 2]) -> Result<()> {
    if sides[0] == sides[1] || sides.iter().any(|&s| s >= g.k()) {
        return invalid(format!(
            "sides {sides:?} are not two distinct parts of a {}-part graph",
            g.k()
        ));
    }
    Ok(())
}

fn piece_densities(g: &KPartiteGraph, pieces: &[Vec<usize>]) -> Vec<Vec<Density>> {
    let masks: Vec<BitSet> = pieces
        .iter()
        .map(|p| BitSet::from_indices(g.n(), p.iter().copied()))
        .collect();
    let mut d = vec![vec![Density { edges: 0, pairs: 0 }; pieces.len()]; pieces.len()];
    for i in 0..pieces.len() {
        for j in i..pieces.len() {
            let edges = if i == j {
                0
            } else {
                count_between_masks(g, &masks[i], &masks[j])
            };
            let pairs = (pieces[i].len() * pieces[j].len()) as u64;
            d[i][j] = Density { edges, pairs };
            d[j][i] = d[i][j];
        }
    }
    d
}

/// Precomputed view used to score many `(S, T)` pairs against one partition.
struct Scorer<'a> {
    g: &'a KPartiteGraph,
    universe: Vec<usize>,
    piece_of: Vec<usize>,
    delta: Vec<Vec<f64>>,
    n_sq: f64,
}

impl<'a> Scorer<'a> {
    fn new(g: &'a KPartiteGraph, p: &PseudoregularPartition) -> Self {
        let mut piece_of = vec![usize::MAX; g.n()];
        for (i, piece) in p.pieces.iter().enumerate() {
            for &v in piece {
                piece_of[v] = i;
            }
        }
        let universe: Vec<usize> = p.pieces.iter().flatten().copied().collect();
        let n = universe.len() as f64;
        Scorer {
            g,
            piece_of,
            delta: p
                .densities
                .iter()
                .map(|row| row.iter().map(Density::value).collect())
                .collect(),
            universe,
            n_sq: n * n,
        }
    }

    /// `w_q = Σ_i δ_iq |S ∩ U_i|` for every piece `q`.
    fn weights(&self, s: &BitSet) -> Vec<f64> {
        let mut sizes = vec![0usize; self.delta.len()];
        for v in s.iter() {
            sizes[self.piece_of[v]] += 1;
        }
        (0..self.delta.len())
            .map(|q| {
                sizes
                    .iter()
                    .enumerate()
                    .map(|(i, &c)| self.delta[i][q] * c as f64)
                    .sum()
            })
            .collect()
    }

    /// Signed error `e(S, T) − estimate`.
    fn error(&self, s: &BitSet, t: &BitSet) -> f64 {
        let w = self.weights(s);
        t.iter()
            .map(|v| and_count(self.g.row(v), s.words()) as f64 - w[self.piece_of[v]])
            .sum()
    }

    /// The best `T ⊆ U \ S` for a fixed `S`: the error is linear in `T`, so
    /// take every vertex whose residual has the requested sign.
    fn best_response(&self, s: &BitSet, sign: f64) -> BitSet {
        let w = self.weights(s);
        let mut t = BitSet::new(self.g.n());
        for &v in &self.universe {
            if !s.contains(v) {
                let r = and_count(self.g.row(v), s.words()) as f64 - w[self.piece_of[v]];
                if sign * r > 0.0 {
                    t.insert(v);
                }
            }
        }
        t
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> (BitSet, BitSet) {
        let mut s = BitSet::new(self.g.n());
        let mut t = BitSet::new(self.g.n());
        for &v in &self.universe {
            // independent coin per side, redrawn while the vertex lands in both
            loop {
                let (a, b) = (rng.random_bool(0.5), rng.random_bool(0.5));
                if !(a && b) {
                    if a {
                        s.insert(v);
                    }
                    if b {
                        t.insert(v);
                    }
                    break;
                }
            }
        }
        (s, t)
    }

    /// The worst of the raw sample and its polished variants.
    fn worst_variant(&self, s: BitSet, t: BitSet, polish: usize) -> (f64, BitSet, BitSet) {
        let mut best = (self.error(&s, &t).abs(), s.clone(), t.clone());
        if polish == 0 {
            return best;
        }
        for sign in [1.0, -1.0] {
            let (mut ps, mut pt) = (s.clone(), t.clone());
            for _ in 0..polish {
                pt = self.best_response(&ps, sign);
                ps = self.best_response(&pt, sign);
            }
            let e = self.error(&ps, &pt).abs();
            if e > best.0 {
                best = (e, ps, pt);
            }
        }
        best
    }
}

struct Outcome {
    report: CheckReport,
    worst: Option<(BitSet, BitSet)>,
}

fn run_check(
    g: &KPartiteGraph,
    p: &PseudoregularPartition,
    epsilon: f64,
    samples: usize,
    seed: u64,
    polish: usize,
) -> Outcome {
    let scorer = Scorer::new(g, p);
    let limit = epsilon * scorer.n_sq;
    let draw = |i: usize| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        let (s, t) = scorer.sample(&mut rng);
        scorer.worst_variant(s, t, polish)
    };
    let errors: Vec<f64> = (0..samples).into_par_iter().map(|i| draw(i).0).collect();
    let violations = errors.iter().filter(|&&e| e > limit).count();
    let (arg, max) = errors
        .iter()
        .copied()
        .enumerate()
        .fold(
            (None, 0.0f64),
            |(a, m), (i, e)| if e > m { (Some(i), e) } else { (a, m) },
        );
    let worst = arg.filter(|_| violations > 0).map(|i| {
        let (_, s, t) = draw(i);
        (s, t)
    });
    Outcome {
        report: CheckReport {
            samples,
            violations,
            max_error: if scorer.n_sq > 0.0 {
                max / scorer.n_sq
            } else {
                0.0
            },
            pass_fraction: if samples == 0 {
                1.0
            } else {
                1.0 - violations as f64 / samples as f64
            },
        },
        worst,
    }
}

/// Checks the defining inequality on `samples` random disjoint pairs, each
/// improved by [`DEFAULT_POLISH_ROUNDS`] rounds of local search.
pub fn check_pseudoregular_sampled(
    g: &KPartiteGraph,
    p: &PseudoregularPartition,
    epsilon: f64,
    samples: usize,
    seed: u64,
) -> CheckReport {
    run_check(g, p, epsilon, samples, seed, DEFAULT_POLISH_ROUNDS).report
}

/// As [`check_pseudoregular_sampled`] with an explicit polish round count.
pub fn check_pseudoregular_with(
    g: &KPartiteGraph,
    p: &PseudoregularPartition,
    epsilon: f64,
    samples: usize,
    seed: u64,
    polish_rounds: usize,
) -> CheckReport {
    run_check(g, p, epsilon, samples, seed, polish_rounds).report
}

fn refine(
    g: &KPartiteGraph,
    p: &PseudoregularPartition,
    s: &BitSet,
    t: &BitSet,
    max_pieces: usize,
) -> Result<PseudoregularPartition> {
    let n: usize = p.pieces.iter().map(Vec::len).sum();
    let min_size = n.div_ceil(max_pieces);
    let mut kept: Vec<(usize, Vec<usize>)> = Vec::new();
    let mut residual: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
    for (piece, &side) in p.pieces.iter().zip(&p.piece_side) {
        let mut parts: [Vec<usize>; 3] = Default::default();
        for &v in piece {
            parts[if s.contains(v) {
                0
            } else if t.contains(v) {
                1
            } else {
                2
            }]
            .push(v);
        }
        for part in parts.into_iter().filter(|x| !x.is_empty()) {
            if part.len() < min_size {
                residual[(side == p.sides[1]) as usize].extend(part);
            } else {
                kept.push((side, part));
            }
        }
    }
    for (i, r) in residual.into_iter().enumerate() {
        if !r.is_empty() {
            kept.push((p.sides[i], r));
        }
    }
    // still too many: fold the smallest piece into the next smallest on its side
    while kept.len() > max_pieces {
        kept.sort_by_key(|(_, v)| v.len());
        let (side, small) = kept.remove(0);
        match kept.iter_mut().find(|(s, _)| *s == side) {
            Some((_, other)) => other.extend(small),
            None => {
                kept.push((side, small));
                break;
            }
        }
    }
    // canonical piece order keeps seeded runs bit-identical
    let mut pieces: Vec<Vec<usize>> = kept.into_iter().map(|(_, v)| v).collect();
    pieces.iter_mut().for_each(|v| v.sort_unstable());
    pieces.sort();
    PseudoregularPartition::with_pieces(g, p.sides, pieces, p.epsilon)
}

/// Iterative refinement from one piece per side: while the sampled check
/// finds a violating pair, split every piece by membership in the worst pair.
/// Never fails on budget exhaustion; the result then has `verified == false`.
pub fn weak_regular_partition(
    g: &KPartiteGraph,
    sides: [usize; 2],
    cfg: &RegularityConfig,
) -> Result<PseudoregularPartition> {
    cfg.validate()?;
    let mut p = PseudoregularPartition::trivial(g, sides, cfg.epsilon)?;
    for round in 0..cfg.refinement_budget {
        let seed = cfg.rng_seed.wrapping_add(round as u64);
        let out = run_check(
            g,
            &p,
            cfg.epsilon,
            cfg.sample_count,
            seed,
            cfg.polish_rounds,
        );
        p.rounds = round + 1;
        p.last_check = Some(out.report);
        match out.worst {
            None => {
                p.verified = true;
                return Ok(p);
            }
            Some((s, t)) => {
                let mut next = refine(g, &p, &s, &t, cfg.max_pieces)?;
                next.rounds = p.rounds;
                next.last_check = p.last_check;
                p = next;
            }
        }
    }
    let seed = cfg.rng_seed.wrapping_add(cfg.refinement_budget as u64);
    let out = run_check(
        g,
        &p,
        cfg.epsilon,
        cfg.sample_count,
        seed,
        cfg.polish_rounds,
    );
    p.verified = out.report.violations == 0;
    p.last_check = Some(out.report);
    Ok(p)
}
