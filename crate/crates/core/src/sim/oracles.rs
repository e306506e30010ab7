use super::decoder::{decode_shot, DecodingContext};
use super::geometry::{build_geometry, CodeGeometry, GeometryKind};
use super::pattern::ErrorPattern;
use super::syndrome::error_class;
use crate::error::{domain, Error, Result};
use crate::regimes::binomial;
use serde::{Deserialize, Serialize};

fn mask_of(set: &[usize]) -> u64 {
    set.iter().fold(0u64, |m, &q| m ^ (1u64 << q))
}

fn independent_plaquettes(g: &CodeGeometry) -> Vec<u64> {
    let masks: Vec<u64> = g.plaquettes.iter().map(|p| mask_of(p)).collect();
    match g.kind {
        // The product of all torus plaquettes is the identity.
        GeometryKind::Torus => masks[..masks.len() - 1].to_vec(),
        GeometryKind::Planar => masks,
    }
}

/// Syndrome-free error weights on the torus, by class.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleEnumeration {
    /// `counts[c][w]`: cycles of class `c` and weight `w`.
    pub counts: Vec<Vec<u64>>,
    pub n_qubits: usize,
}

impl CycleEnumeration {
    pub fn class_sizes(&self) -> Vec<u64> {
        self.counts.iter().map(|c| c.iter().sum()).collect()
    }

    /// Probability of a nontrivial class given a trivial syndrome.
    pub fn pfail(&self, p: f64) -> f64 {
        let n = self.n_qubits as i32;
        let weight = |c: &Vec<u64>| -> f64 {
            c.iter().enumerate().map(|(w, &k)| k as f64 * p.powi(w as i32) * (1.0 - p).powi(n - w as i32)).sum()
        };
        let per: Vec<f64> = self.counts.iter().map(weight).collect();
        let total: f64 = per.iter().sum();
        (total - per[0]) / total
    }
}

/// Enumerates all `2^{L²+1}` cycles of the `L×L` torus.
pub fn enumerate_cycles(l: usize) -> Result<CycleEnumeration> {
    if l > 4 {
        return Err(Error::SizeGuard(format!("cycle enumeration needs L <= 4, got {l}")));
    }
    let g = build_geometry(GeometryKind::Torus, l)?;
    let mut gens = independent_plaquettes(&g);
    gens.extend(g.logicals.iter().map(|lg| mask_of(lg)));
    let cut_masks: Vec<u64> = g.cuts.iter().map(|c| mask_of(c)).collect();
    let n = g.n_qubits();
    let mut counts = vec![vec![0u64; n + 1]; 4];
    let mut cur = 0u64;
    let class = |m: u64| -> usize {
        cut_masks.iter().enumerate().map(|(k, &c)| (((m & c).count_ones() & 1) as usize) << k).sum()
    };
    counts[0][0] += 1;
    for i in 1u64..(1 << gens.len()) {
        cur ^= gens[i.trailing_zeros() as usize];
        counts[class(cur)][cur.count_ones() as usize] += 1;
    }
    Ok(CycleEnumeration { counts, n_qubits: n })
}

/// Post-selected failure probability by exhaustive cycle enumeration.
pub fn enumerate_cycle_pfail_post(l: usize, p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return domain(format!("p = {p} outside (0,1)"));
    }
    Ok(enumerate_cycles(l)?.pfail(p))
}

/// Minimum weight of each correction class by enumerating the full
/// stabilizer group. `result[c]` is the lightest error with the syndrome of
/// `e` and cut-crossing parities `c`.
pub fn exhaustive_class_minima(g: &CodeGeometry, e: &ErrorPattern) -> Result<Vec<u32>> {
    let n = g.n_qubits();
    let gens = independent_plaquettes(g);
    if n > 64 || gens.len() > 26 {
        return Err(Error::SizeGuard(format!("coset enumeration too large: {n} qubits, {} generators", gens.len())));
    }
    let base = e.iter_ones().fold(0u64, |m, q| m ^ (1u64 << q));
    let ec = error_class(g, e);
    let logicals: Vec<u64> = g.logicals.iter().map(|lg| mask_of(lg)).collect();
    let nc = g.n_classes();
    let reps: Vec<u64> = (0..nc)
        .map(|y| {
            let mut m = base;
            for (k, &lm) in logicals.iter().enumerate() {
                if y >> k & 1 == 1 {
                    m ^= lm;
                }
            }
            m
        })
        .collect();
    let mut best: Vec<u32> = reps.iter().map(|m| m.count_ones()).collect();
    let mut s = 0u64;
    for i in 1u64..(1 << gens.len()) {
        s ^= gens[i.trailing_zeros() as usize];
        for (y, &r) in reps.iter().enumerate() {
            let w = (r ^ s).count_ones();
            if w < best[y] {
                best[y] = w;
            }
        }
    }
    // coset y holds corrections of class ec ^ y
    let mut out = vec![0; nc];
    for (y, &w) in best.iter().enumerate() {
        out[y ^ ec as usize] = w;
    }
    Ok(out)
}

/// Low-order expansion of the decoder failure probability in `p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailurePolynomial {
    pub n_qubits: usize,
    /// Tie-weighted number of failing patterns of each weight.
    pub fail_counts: Vec<f64>,
    /// Coefficient of `p^k` in `Σ_w F_w p^w (1−p)^{n−w}`, valid for `k ≤ w_max`.
    pub coefficients: Vec<f64>,
}

impl FailurePolynomial {
    /// Lowest order with a nonzero coefficient, and that coefficient.
    pub fn leading(&self) -> Option<(usize, f64)> {
        self.coefficients.iter().enumerate().find(|(_, &c)| c != 0.0).map(|(k, &c)| (k, c))
    }
}

/// Decodes every pattern of weight at most `w_max`.
pub fn exact_failure_polynomial(kind: GeometryKind, l: usize, w_max: usize) -> Result<FailurePolynomial> {
    if l > 5 {
        return Err(Error::SizeGuard(format!("failure polynomial needs L <= 5, got {l}")));
    }
    if w_max > l.div_ceil(2) + 1 {
        return Err(Error::SizeGuard(format!("w_max = {w_max} exceeds ceil(L/2)+1")));
    }
    let ctx = DecodingContext::new(kind, l)?;
    let n = ctx.geometry.n_qubits();
    let mut twelfths = vec![0u64; w_max + 1];
    for (w, slot) in twelfths.iter_mut().enumerate() {
        let mut idx: Vec<usize> = (0..w).collect();
        loop {
            let e = ErrorPattern::from_indices(n, &idx);
            *slot += decode_shot(&ctx, &e)?.fail_twelfths as u64;
            if !next_combination(&mut idx, n) {
                break;
            }
        }
    }
    let fail_counts: Vec<f64> = twelfths.iter().map(|&t| t as f64 / 12.0).collect();
    let coefficients = (0..=w_max)
        .map(|k| {
            (0..=k)
                .map(|w| {
                    let sign = if (k - w) % 2 == 0 { 1.0 } else { -1.0 };
                    sign * fail_counts[w] * binomial((n - w) as u64, (k - w) as u64)
                })
                .sum()
        })
        .collect();
    Ok(FailurePolynomial { n_qubits: n, fail_counts, coefficients })
}

fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::decoder::{class_resolved_weights, mwpm};
    use crate::sim::pattern::sample_error;
    use crate::sim::syndrome::syndrome;

    #[test]
    fn cycle_classes_equal_size() {
        for l in 2..=4 {
            let c = enumerate_cycles(l).unwrap();
            let per = 1u64 << (l * l - 1);
            assert_eq!(c.class_sizes(), vec![per; 4]);
        }
        assert!(enumerate_cycles(5).is_err());
        assert!(enumerate_cycle_pfail_post(3, 1e-9).unwrap() < 1e-20);
    }

    #[test]
    fn combinations_count() {
        let mut idx: Vec<usize> = (0..3).collect();
        let mut c = 1;
        while next_combination(&mut idx, 7) {
            c += 1;
        }
        assert_eq!(c, 35);
    }

    #[test]
    fn coset_oracle_matches_decoder_small() {
        let ctx = DecodingContext::new(GeometryKind::Planar, 3).unwrap();
        for s in 0..100 {
            let e = sample_error(ctx.geometry.n_qubits(), 0.15, s, 21);
            let w = class_resolved_weights(&ctx, &e).unwrap();
            assert_eq!(exhaustive_class_minima(&ctx.geometry, &e).unwrap(), w.weights);
            let m = mwpm(&ctx, &syndrome(&ctx.geometry, &e)).unwrap();
            assert_eq!(m.weight, *w.weights.iter().min().unwrap());
        }
        let ctx = DecodingContext::new(GeometryKind::Torus, 3).unwrap();
        for s in 0..100 {
            let e = sample_error(ctx.geometry.n_qubits(), 0.15, s, 22);
            let w = class_resolved_weights(&ctx, &e).unwrap();
            assert_eq!(exhaustive_class_minima(&ctx.geometry, &e).unwrap(), w.weights);
        }
    }

    #[test]
    fn torus_three_leading() {
        let f = exact_failure_polynomial(GeometryKind::Torus, 3, 2).unwrap();
        assert_eq!(f.leading(), Some((2, 18.0)));
        assert!(exact_failure_polynomial(GeometryKind::Torus, 3, 4).is_err());
    }
}
