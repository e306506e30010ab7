use super::histogram::GapHistogram;
use crate::error::{domain, Error, Result};
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

/// Gaussian envelope of rescaled energy costs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianFit {
    pub mu: f64,
    pub sigma: f64,
    pub mu_err: f64,
    pub sigma_err: f64,
    /// Upper edge of the fit window on the rescaled axis.
    pub cutoff: f64,
    /// Samples inside the window.
    pub n_used: f64,
}

impl GaussianFit {
    /// `½(1 − erf((μ/σ)/√2))`.
    pub fn implied_pfail(&self) -> f64 {
        0.5 * erfc(self.mu / self.sigma / std::f64::consts::SQRT_2)
    }
}

fn ln_phi_upper(t: f64) -> f64 {
    // ln Φ(t)
    (0.5 * erfc(-t / std::f64::consts::SQRT_2)).ln()
}

/// Negative log-likelihood of an upper-truncated normal.
fn nll(data: &[(f64, f64)], cutoff: f64, mu: f64, ln_sigma: f64) -> f64 {
    let sigma = ln_sigma.exp();
    let n: f64 = data.iter().map(|d| d.1).sum();
    let quad: f64 = data.iter().map(|&(u, c)| c * 0.5 * ((u - mu) / sigma).powi(2)).sum();
    quad + n * ln_sigma + n * ln_phi_upper((cutoff - mu) / sigma)
}

/// Deterministic Nelder–Mead minimiser.
pub(crate) fn nelder_mead<F: Fn(&[f64]) -> f64>(f: F, x0: &[f64], step: f64, max_iter: usize, tol: f64) -> Vec<f64> {
    let k = x0.len();
    let mut simplex: Vec<Vec<f64>> = vec![x0.to_vec()];
    for i in 0..k {
        let mut v = x0.to_vec();
        v[i] += if v[i].abs() > 1e-8 { step * v[i].abs() } else { step };
        simplex.push(v);
    }
    let mut vals: Vec<f64> = simplex.iter().map(|v| f(v)).collect();
    for _ in 0..max_iter {
        let mut order: Vec<usize> = (0..=k).collect();
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        vals = order.iter().map(|&i| vals[i]).collect();
        if (vals[k] - vals[0]).abs() <= tol * (vals[0].abs() + tol) {
            break;
        }
        let centroid: Vec<f64> = (0..k).map(|j| simplex[..k].iter().map(|v| v[j]).sum::<f64>() / k as f64).collect();
        let at = |t: f64| -> Vec<f64> { (0..k).map(|j| centroid[j] + t * (simplex[k][j] - centroid[j])).collect() };
        let xr = at(-1.0);
        let fr = f(&xr);
        if fr < vals[0] {
            let xe = at(-2.0);
            let fe = f(&xe);
            if fe < fr {
                simplex[k] = xe;
                vals[k] = fe;
            } else {
                simplex[k] = xr;
                vals[k] = fr;
            }
        } else if fr < vals[k - 1] {
            simplex[k] = xr;
            vals[k] = fr;
        } else {
            let xc = if fr < vals[k] { at(-0.5) } else { at(0.5) };
            let fc = f(&xc);
            if fc < vals[k].min(fr) {
                simplex[k] = xc;
                vals[k] = fc;
            } else {
                for i in 1..=k {
                    simplex[i] = (0..k).map(|j| simplex[0][j] + 0.5 * (simplex[i][j] - simplex[0][j])).collect();
                    vals[i] = f(&simplex[i]);
                }
            }
        }
    }
    let best = (0..=k).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap();
    simplex[best].clone()
}

/// Maximum-likelihood Gaussian on `ΔE/L^θ`, truncated above at three
/// initial standard deviations.
pub fn gaussian_fit(hist: &GapHistogram, theta: f64) -> Result<GaussianFit> {
    gaussian_fit_pooled(std::slice::from_ref(hist), theta)
}

/// As [`gaussian_fit`], pooling several sizes on the rescaled axis.
pub fn gaussian_fit_pooled(hists: &[GapHistogram], theta: f64) -> Result<GaussianFit> {
    let data: Vec<(f64, f64)> = hists.iter().flat_map(|h| h.rescaled(theta)).collect();
    gaussian_fit_weighted(&data)
}

/// Truncated-normal fit on `(value, multiplicity)` data.
pub fn gaussian_fit_weighted(data: &[(f64, f64)]) -> Result<GaussianFit> {
    let n: f64 = data.iter().map(|d| d.1).sum();
    if n < 100.0 {
        return domain(format!("need at least 100 samples, got {n}"));
    }
    let m0 = data.iter().map(|d| d.0 * d.1).sum::<f64>() / n;
    let v0 = data.iter().map(|d| d.1 * (d.0 - m0).powi(2)).sum::<f64>() / (n - 1.0);
    if !(v0 > 0.0) {
        return Err(Error::Degenerate("zero variance".into()));
    }
    let s0 = v0.sqrt();
    let cutoff = 3.0 * s0;
    let kept: Vec<(f64, f64)> = data.iter().copied().filter(|d| d.0 <= cutoff).collect();
    let n_used: f64 = kept.iter().map(|d| d.1).sum();
    let km = kept.iter().map(|d| d.0 * d.1).sum::<f64>() / n_used;
    let kv = kept.iter().map(|d| d.1 * (d.0 - km).powi(2)).sum::<f64>() / n_used;
    if !(kv > 0.0) {
        return Err(Error::Degenerate("zero variance inside the fit window".into()));
    }
    let f = |x: &[f64]| nll(&kept, cutoff, x[0], x[1]);
    let mut x = vec![km, 0.5 * kv.ln()];
    for _ in 0..3 {
        x = nelder_mead(f, &x, 0.05, 2000, 1e-15);
    }
    let (mu, ls) = (x[0], x[1]);
    let h = [1e-4 * s0.max(1e-3), 1e-4];
    let e = |a: f64, b: f64| f(&[a, b]);
    let f0 = e(mu, ls);
    let h00 = (e(mu + h[0], ls) - 2.0 * f0 + e(mu - h[0], ls)) / (h[0] * h[0]);
    let h11 = (e(mu, ls + h[1]) - 2.0 * f0 + e(mu, ls - h[1])) / (h[1] * h[1]);
    let h01 = (e(mu + h[0], ls + h[1]) - e(mu + h[0], ls - h[1]) - e(mu - h[0], ls + h[1]) + e(mu - h[0], ls - h[1]))
        / (4.0 * h[0] * h[1]);
    let det = h00 * h11 - h01 * h01;
    let (var_mu, var_ls) = if det > 0.0 { (h11 / det, h00 / det) } else { (f64::NAN, f64::NAN) };
    let sigma = ls.exp();
    Ok(GaussianFit { mu, sigma, mu_err: var_mu.sqrt(), sigma_err: sigma * var_ls.sqrt(), cutoff, n_used })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use statrs::distribution::Normal;
    use statrs::statistics::Distribution;

    fn normal_samples(mu: f64, sigma: f64, n: usize, seed: u64) -> Vec<(f64, f64)> {
        use rand::distributions::Distribution as _;
        let d = Normal::new(mu, sigma).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| (d.sample(&mut rng), 1.0)).collect()
    }

    #[test]
    fn recovers_synthetic_gaussian() {
        let data = normal_samples(2.0, 2.0, 100_000, 4);
        let g = gaussian_fit_weighted(&data).unwrap();
        assert!((g.mu - 2.0).abs() < 3.0 * g.mu_err, "{g:?}");
        assert!((g.sigma - 2.0).abs() < 3.0 * g.sigma_err, "{g:?}");
        assert!(g.mu_err > 0.0 && g.mu_err < 0.02);
        let _ = Normal::new(0.0, 1.0).unwrap().mean();
    }

    #[test]
    fn implied_pfail() {
        let g = GaussianFit { mu: 0.0, sigma: 1.0, mu_err: 0.0, sigma_err: 0.0, cutoff: 3.0, n_used: 1.0 };
        assert_eq!(g.implied_pfail(), 0.5);
    }

    #[test]
    fn rejects_small_or_flat() {
        assert!(gaussian_fit_weighted(&[(1.0, 50.0)]).is_err());
        assert!(matches!(gaussian_fit_weighted(&[(1.0, 500.0)]), Err(Error::Degenerate(_))));
    }

    #[test]
    fn nelder_mead_quadratic() {
        let x = nelder_mead(|x| (x[0] - 1.0).powi(2) + 3.0 * (x[1] + 2.0).powi(2), &[0.0, 0.0], 0.5, 1000, 1e-16);
        assert!((x[0] - 1.0).abs() < 1e-5 && (x[1] + 2.0).abs() < 1e-5);
    }
}
