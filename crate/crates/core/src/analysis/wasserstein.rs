use super::histogram::GapHistogram;
use super::stats::{resample, std_dev};
use crate::error::{domain, Result};

/// Normalised empirical distribution on the real line.
#[derive(Debug, Clone, PartialEq)]
pub struct Empirical {
    /// `(value, mass)` sorted by value, masses summing to one.
    points: Vec<(f64, f64)>,
}

impl Empirical {
    pub fn from_weighted(mut data: Vec<(f64, f64)>) -> Result<Self> {
        data.retain(|d| d.1 > 0.0);
        let total: f64 = data.iter().map(|d| d.1).sum();
        if data.is_empty() || !(total > 0.0) {
            return domain("empty distribution");
        }
        data.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(Self { points: data.into_iter().map(|(x, w)| (x, w / total)).collect() })
    }

    pub fn from_samples(xs: &[f64]) -> Result<Self> {
        Self::from_weighted(xs.iter().map(|&x| (x, 1.0)).collect())
    }

    /// Histogram rescaled by `L^θ`.
    pub fn from_histogram(h: &GapHistogram, theta: f64) -> Result<Self> {
        Self::from_weighted(h.rescaled(theta))
    }
}

/// First Wasserstein distance `∫|F_A − F_B| du`.
pub fn wasserstein1(a: &Empirical, b: &Empirical) -> f64 {
    let mut xs: Vec<f64> = a.points.iter().chain(&b.points).map(|p| p.0).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let (mut ia, mut ib) = (0, 0);
    let (mut fa, mut fb) = (0.0, 0.0);
    let mut total = 0.0;
    for w in xs.windows(2) {
        while ia < a.points.len() && a.points[ia].0 <= w[0] {
            fa += a.points[ia].1;
            ia += 1;
        }
        while ib < b.points.len() && b.points[ib].0 <= w[0] {
            fb += b.points[ib].1;
            ib += 1;
        }
        total += (fa - fb).abs() * (w[1] - w[0]);
    }
    total
}

/// Distance between two sample sets with a bootstrap standard error.
pub fn wasserstein1_bootstrap(a: &[f64], b: &[f64], resamples: u64, seed: u64) -> Result<(f64, f64)> {
    let w = wasserstein1(&Empirical::from_samples(a)?, &Empirical::from_samples(b)?);
    let mut vals = Vec::with_capacity(resamples as usize);
    for r in 0..resamples {
        let ra = resample(a, seed, 2 * r);
        let rb = resample(b, seed, 2 * r + 1);
        vals.push(wasserstein1(&Empirical::from_samples(&ra)?, &Empirical::from_samples(&rb)?));
    }
    Ok((w, std_dev(&vals)))
}
