use super::blossom::min_weight_perfect_matching;
use super::cover::{cover_distances, CoverDistances, UNREACHABLE};
use super::geometry::{build_geometry, CodeGeometry, GeometryKind};
use super::pattern::ErrorPattern;
use super::syndrome::{error_class, syndrome};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::cmp::Reverse;
use std::collections::BinaryHeap;

/// Default branch-and-bound node budget per shot.
pub const DEFAULT_NODE_BUDGET: usize = 100_000;

/// Geometry plus precomputed distance tables; immutable and shareable.
#[derive(Debug, Clone)]
pub struct DecodingContext {
    pub geometry: CodeGeometry,
    pub distances: CoverDistances,
    pub node_budget: usize,
}

impl DecodingContext {
    pub fn new(kind: GeometryKind, l: usize) -> Result<Self> {
        let geometry = build_geometry(kind, l)?;
        let distances = cover_distances(&geometry);
        Ok(Self { geometry, distances, node_budget: DEFAULT_NODE_BUDGET })
    }

    pub fn with_node_budget(mut self, budget: usize) -> Self {
        self.node_budget = budget;
        self
    }

    fn dmin(&self, u: usize, v: usize) -> i64 {
        self.distances.min(u, v).0 as i64
    }
}

/// A perfect matching of defects; boundary partners are boundary node ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    pub pairs: Vec<(usize, usize)>,
    pub weight: u32,
}

/// Unconstrained minimum-weight perfect matching of `defects` under the
/// shortest-path metric. Planar defects may pair with the nearer boundary.
pub fn mwpm(ctx: &DecodingContext, defects: &[usize]) -> Result<Matching> {
    let k = defects.len();
    match ctx.geometry.kind {
        GeometryKind::Torus => {
            if k % 2 == 1 {
                return Err(Error::Infeasible(format!("odd defect count {k} on the torus")));
            }
            let (mate, w) = min_weight_perfect_matching(k, |i, j| Some(ctx.dmin(defects[i], defects[j])))
                .ok_or_else(|| Error::Infeasible("no perfect matching".into()))?;
            let pairs = (0..k).filter(|&i| i < mate[i]).map(|i| (defects[i], defects[mate[i]])).collect();
            Ok(Matching { pairs, weight: w as u32 })
        }
        GeometryKind::Planar => {
            let (lt, rt) = (ctx.geometry.left().unwrap(), ctx.geometry.right().unwrap());
            let nearest = |u: usize| {
                let (a, b) = (ctx.dmin(u, lt), ctx.dmin(u, rt));
                if a <= b {
                    (a, lt)
                } else {
                    (b, rt)
                }
            };
            let cost = |i: usize, j: usize| {
                let (i, j) = (i.min(j), i.max(j));
                match (i < k, j < k) {
                    (true, true) => Some(ctx.dmin(defects[i], defects[j])),
                    (true, false) if j - k == i => Some(nearest(defects[i]).0),
                    (false, false) => Some(0),
                    _ => None,
                }
            };
            let (mate, w) = min_weight_perfect_matching(2 * k, cost)
                .ok_or_else(|| Error::Infeasible("no perfect matching".into()))?;
            let mut pairs = Vec::new();
            for i in 0..k {
                if mate[i] < k {
                    if i < mate[i] {
                        pairs.push((defects[i], defects[mate[i]]));
                    }
                } else {
                    pairs.push((defects[i], nearest(defects[i]).1));
                }
            }
            Ok(Matching { pairs, weight: w as u32 })
        }
    }
}

/// Minimum correction weight per correction class, with the class of the
/// sampled error.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassWeights {
    /// `weights[c]`: fewest qubits in a correction with the syndrome and
    /// cut-crossing parities `c`.
    pub weights: Vec<u32>,
    pub error_class: u8,
}

impl ClassWeights {
    /// Weight of the correction that leaves a trivial residual.
    pub fn w_same(&self) -> u32 {
        self.weights[self.error_class as usize]
    }

    /// Lightest correction that leaves a nontrivial residual.
    pub fn w_opp(&self) -> u32 {
        (0..self.weights.len()).filter(|&c| c != self.error_class as usize).map(|c| self.weights[c]).min().unwrap()
    }

    /// `2(w_opp − w_same)`.
    pub fn delta_e(&self) -> i64 {
        2 * (self.w_opp() as i64 - self.w_same() as i64)
    }

    /// Correction classes of minimum weight.
    pub fn minimal_classes(&self) -> Vec<u8> {
        let m = *self.weights.iter().min().unwrap();
        (0..self.weights.len() as u8).filter(|&c| self.weights[c as usize] == m).collect()
    }
}

/// Planar class weights as minimum T-joins, one matching per class.
fn planar_class_weight(ctx: &DecodingContext, defects: &[usize], class: u8) -> u32 {
    let (lt, rt) = (ctx.geometry.left().unwrap(), ctx.geometry.right().unwrap());
    let mut t = defects.to_vec();
    if class & 1 == 1 {
        t.push(lt);
    }
    if (defects.len() + class as usize) % 2 == 1 {
        t.push(rt);
    }
    let (_, w) = min_weight_perfect_matching(t.len(), |i, j| Some(ctx.dmin(t[i], t[j])))
        .expect("complete graph on an even node set");
    w as u32
}

/// Per-class weights for every class of correction.
///
/// Planar: two T-join matchings. Torus: best-first branch and bound over
/// defect pairings ordered by unconstrained weight (root = blossom
/// relaxation, children split on pair inclusion); each pairing is scored
/// exactly for all four classes by a parity dynamic program, and the search
/// stops once the relaxation bound reaches every incumbent.
pub fn class_resolved_weights(ctx: &DecodingContext, e: &ErrorPattern) -> Result<ClassWeights> {
    let defects = syndrome(&ctx.geometry, e);
    let error_class = error_class(&ctx.geometry, e);
    let weights = class_weights_for_syndrome(ctx, &defects, Search::All)?;
    Ok(ClassWeights { weights, error_class })
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Search {
    All,
    Minimal,
}

fn class_weights_for_syndrome(ctx: &DecodingContext, defects: &[usize], search: Search) -> Result<Vec<u32>> {
    let g = &ctx.geometry;
    match g.kind {
        GeometryKind::Planar => Ok((0..2).map(|c| planar_class_weight(ctx, defects, c)).collect()),
        GeometryKind::Torus => {
            if defects.len() % 2 == 1 {
                return Err(Error::Infeasible(format!("odd defect count {} on the torus", defects.len())));
            }
            if defects.is_empty() {
                let l = g.l as u32;
                return Ok((0u8..4).map(|c| l * c.count_ones()).collect());
            }
            torus_search(ctx, defects, search)
        }
    }
}

struct Node {
    forced: Vec<(usize, usize)>,
    forbidden: Vec<(usize, usize)>,
    free_pairs: Vec<(usize, usize)>,
    bound: i64,
}

fn solve_node(ctx: &DecodingContext, defects: &[usize], forced: &[(usize, usize)], forbidden: &[(usize, usize)]) -> Option<Node> {
    let k = defects.len();
    let mut taken = vec![false; k];
    let mut base = 0;
    for &(i, j) in forced {
        taken[i] = true;
        taken[j] = true;
        base += ctx.dmin(defects[i], defects[j]);
    }
    let rest: Vec<usize> = (0..k).filter(|&i| !taken[i]).collect();
    let (mate, w) = min_weight_perfect_matching(rest.len(), |a, b| {
        let (i, j) = (rest[a].min(rest[b]), rest[a].max(rest[b]));
        (!forbidden.contains(&(i, j))).then(|| ctx.dmin(defects[i], defects[j]))
    })?;
    let free_pairs = (0..rest.len()).filter(|&a| a < mate[a]).map(|a| (rest[a], rest[mate[a]])).collect();
    Some(Node { forced: forced.to_vec(), forbidden: forbidden.to_vec(), free_pairs, bound: base + w })
}

fn pairing_class_costs(ctx: &DecodingContext, defects: &[usize], pairs: &[(usize, usize)]) -> [i64; 4] {
    let inf = i64::MAX / 4;
    let mut best = [0, inf, inf, inf];
    for &(i, j) in pairs {
        let mut next = [inf; 4];
        for g in 0..4u8 {
            let d = ctx.distances.get(g, defects[i], defects[j]);
            if d == UNREACHABLE {
                continue;
            }
            for x in 0..4 {
                let v = best[x] + d as i64;
                let y = x ^ g as usize;
                if v < next[y] {
                    next[y] = v;
                }
            }
        }
        best = next;
    }
    best
}

fn torus_search(ctx: &DecodingContext, defects: &[usize], search: Search) -> Result<Vec<u32>> {
    let root = solve_node(ctx, defects, &[], &[]).ok_or_else(|| Error::Infeasible("no perfect matching".into()))?;
    let floor = root.bound;
    let mut incumbent = [i64::MAX; 4];
    let mut heap = BinaryHeap::new();
    let mut store = vec![root];
    heap.push(Reverse((floor, 0usize)));
    let mut expanded = 0usize;
    while let Some(Reverse((bound, id))) = heap.pop() {
        let stop = match search {
            Search::All => bound >= *incumbent.iter().max().unwrap(),
            Search::Minimal => bound > floor,
        };
        if stop {
            break;
        }
        expanded += 1;
        if expanded > ctx.node_budget {
            return Err(Error::Timeout(ctx.node_budget));
        }
        let node = std::mem::replace(&mut store[id], Node { forced: vec![], forbidden: vec![], free_pairs: vec![], bound: 0 });
        let mut pairs = node.forced.clone();
        pairs.extend_from_slice(&node.free_pairs);
        let costs = pairing_class_costs(ctx, defects, &pairs);
        for c in 0..4 {
            incumbent[c] = incumbent[c].min(costs[c]);
        }
        let mut forced = node.forced.clone();
        for &e in &node.free_pairs {
            let mut forbidden = node.forbidden.clone();
            forbidden.push(e);
            if let Some(child) = solve_node(ctx, defects, &forced, &forbidden) {
                heap.push(Reverse((child.bound, store.len())));
                store.push(child);
            }
            forced.push(e);
        }
    }
    Ok(incumbent.iter().map(|&w| if w == i64::MAX { UNREACHABLE } else { w as u32 }).collect())
}

/// Outcome of decoding one shot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DecodeOutcome {
    Success,
    Failure,
    Tie,
}

/// Per-shot decoding result with tie-weighted failure in twelfths.
///
/// Among the minimum-weight correction classes the decoder picks uniformly;
/// `fail_twelfths / 12` is the probability the residual is nontrivial.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShotDecode {
    pub outcome: DecodeOutcome,
    pub fail_twelfths: u32,
    /// Per-logical failure probability in twelfths.
    pub logical_twelfths: Vec<u32>,
    pub error_class: u8,
}

/// Decodes `e` by minimum-weight correction class.
pub fn decode_shot(ctx: &DecodingContext, e: &ErrorPattern) -> Result<ShotDecode> {
    let g = &ctx.geometry;
    let defects = syndrome(g, e);
    let ec = error_class(g, e);
    let weights = class_weights_for_syndrome(ctx, &defects, Search::Minimal)?;
    let min = *weights.iter().min().unwrap();
    let minimal: Vec<u8> = (0..weights.len() as u8).filter(|&c| weights[c as usize] == min).collect();
    Ok(score(&minimal, ec, g.n_cuts()))
}

fn score(minimal: &[u8], ec: u8, n_cuts: usize) -> ShotDecode {
    let m = minimal.len() as u32;
    let unit = 12 / m;
    let hits = u32::from(minimal.contains(&ec));
    let fail_twelfths = 12 - hits * unit;
    let logical_twelfths = (0..n_cuts)
        .map(|k| minimal.iter().filter(|&&c| (c ^ ec) >> k & 1 == 1).count() as u32 * unit)
        .collect();
    let outcome = match (hits, m) {
        (1, 1) => DecodeOutcome::Success,
        (0, _) => DecodeOutcome::Failure,
        _ => DecodeOutcome::Tie,
    };
    ShotDecode { outcome, fail_twelfths, logical_twelfths, error_class: ec }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::pattern::sample_error;

    #[test]
    fn empty_error() {
        for kind in [GeometryKind::Planar, GeometryKind::Torus] {
            let ctx = DecodingContext::new(kind, 5).unwrap();
            let e = ErrorPattern::new(ctx.geometry.n_qubits());
            let w = class_resolved_weights(&ctx, &e).unwrap();
            assert_eq!((w.w_same(), w.w_opp()), (0, 5));
            assert_eq!(decode_shot(&ctx, &e).unwrap().outcome, DecodeOutcome::Success);
            assert_eq!(mwpm(&ctx, &[]).unwrap().weight, 0);
        }
    }

    #[test]
    fn full_logical_fails() {
        for kind in [GeometryKind::Planar, GeometryKind::Torus] {
            let ctx = DecodingContext::new(kind, 5).unwrap();
            for lg in &ctx.geometry.logicals {
                let e = ErrorPattern::from_indices(ctx.geometry.n_qubits(), lg);
                let w = class_resolved_weights(&ctx, &e).unwrap();
                assert_eq!((w.w_same(), w.w_opp()), (5, 0));
                assert_eq!(w.delta_e(), -10);
                let d = decode_shot(&ctx, &e).unwrap();
                assert_eq!((d.outcome, d.fail_twelfths), (DecodeOutcome::Failure, 12));
            }
        }
    }

    #[test]
    fn even_distance_half_row_ties() {
        let ctx = DecodingContext::new(GeometryKind::Torus, 4).unwrap();
        let row = &ctx.geometry.logicals[0];
        let e = ErrorPattern::from_indices(ctx.geometry.n_qubits(), &row[..2]);
        let d = decode_shot(&ctx, &e).unwrap();
        assert_eq!((d.outcome, d.fail_twelfths), (DecodeOutcome::Tie, 6));
        assert_eq!(d.logical_twelfths, vec![6, 0]);
    }

    #[test]
    fn two_defects_weight_is_distance() {
        let ctx = DecodingContext::new(GeometryKind::Planar, 5).unwrap();
        let (u, v) = (0, 7);
        let m = mwpm(&ctx, &[u, v]).unwrap();
        let lt = ctx.geometry.left().unwrap();
        let rt = ctx.geometry.right().unwrap();
        let d = ctx.dmin(u, v).min(ctx.dmin(u, lt).min(ctx.dmin(u, rt)) + ctx.dmin(v, lt).min(ctx.dmin(v, rt)));
        assert_eq!(m.weight as i64, d);
    }

    #[test]
    fn mwpm_equals_min_class_weight() {
        for kind in [GeometryKind::Planar, GeometryKind::Torus] {
            let ctx = DecodingContext::new(kind, 5).unwrap();
            for s in 0..200 {
                let e = sample_error(ctx.geometry.n_qubits(), 0.12, s, 17);
                let defects = syndrome(&ctx.geometry, &e);
                let m = mwpm(&ctx, &defects).unwrap();
                let w = class_resolved_weights(&ctx, &e).unwrap();
                assert_eq!(m.weight, *w.weights.iter().min().unwrap());
                assert_eq!(m.weight, w.w_same().min(w.w_opp()));
                assert_eq!(w.delta_e() % 2, 0);
            }
        }
    }

    #[test]
    fn minimal_search_agrees_with_full_search() {
        let ctx = DecodingContext::new(GeometryKind::Torus, 5).unwrap();
        for s in 0..200 {
            let e = sample_error(ctx.geometry.n_qubits(), 0.1, s, 3);
            let full = class_resolved_weights(&ctx, &e).unwrap();
            let d = decode_shot(&ctx, &e).unwrap();
            assert_eq!(d, score(&full.minimal_classes(), full.error_class, 2));
        }
    }

    #[test]
    fn budget_exhaustion_is_timeout() {
        let ctx = DecodingContext::new(GeometryKind::Torus, 6).unwrap().with_node_budget(1);
        let e = sample_error(ctx.geometry.n_qubits(), 0.2, 1, 1);
        assert!(matches!(class_resolved_weights(&ctx, &e), Err(Error::Timeout(1))));
    }
}
