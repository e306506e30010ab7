use crate::error::{domain, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Counts of domain-wall energy costs at one `(L, p)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapHistogram {
    pub l: usize,
    pub p: f64,
    pub counts: BTreeMap<i64, u64>,
    pub n: u64,
}

impl GapHistogram {
    pub fn from_samples(l: usize, p: f64, delta_e: impl IntoIterator<Item = i64>) -> Result<Self> {
        let mut counts = BTreeMap::new();
        let mut n = 0;
        for d in delta_e {
            if d % 2 != 0 {
                return domain(format!("odd energy cost {d}"));
            }
            *counts.entry(d).or_insert(0) += 1;
            n += 1;
        }
        Ok(Self { l, p, counts, n })
    }

    pub fn from_counts(l: usize, p: f64, counts: BTreeMap<i64, u64>) -> Result<Self> {
        if let Some(k) = counts.keys().find(|k| *k % 2 != 0) {
            return domain(format!("odd energy cost {k}"));
        }
        let n = counts.values().sum();
        Ok(Self { l, p, counts, n })
    }

    /// `(ΔE / L^θ, count)` pairs.
    pub fn rescaled(&self, theta: f64) -> Vec<(f64, f64)> {
        let s = (self.l as f64).powf(theta);
        self.counts.iter().map(|(&k, &c)| (k as f64 / s, c as f64)).collect()
    }

    /// Tie-weighted failure fraction `P(ΔE<0) + ½P(ΔE=0)`.
    pub fn failure_fraction(&self) -> f64 {
        let neg: u64 = self.counts.range(..0).map(|(_, c)| c).sum();
        let zero = self.counts.get(&0).copied().unwrap_or(0);
        (neg as f64 + 0.5 * zero as f64) / self.n as f64
    }

    pub fn mean(&self) -> f64 {
        self.counts.iter().map(|(&k, &c)| k as f64 * c as f64).sum::<f64>() / self.n as f64
    }
}
