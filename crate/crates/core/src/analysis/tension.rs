use super::fits::FailurePoint;
use super::stats::linear_least_squares;
use crate::exact::nishimori_beta;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Surface-tension fit at one `p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TensionFit {
    pub p: f64,
    pub beta: f64,
    /// Slope `βσ_eff`.
    pub beta_sigma: f64,
    pub sigma_eff: f64,
    pub delta: f64,
    pub sigma_err: f64,
    pub delta_err: f64,
    pub sizes: usize,
    /// Fewer than four sizes with a nonzero failure rate.
    pub insufficient: bool,
}

/// Regresses `−ln(P/2)` on `L` at each `p`, weighting by `(P/err)²`; with
/// `capillary`, `½ ln L` is added to the response first.
pub fn fit_surface_tension(points: &[FailurePoint], capillary: bool) -> Vec<TensionFit> {
    let mut groups: BTreeMap<u64, Vec<&FailurePoint>> = BTreeMap::new();
    for pt in points {
        groups.entry(pt.p.to_bits()).or_default().push(pt);
    }
    let mut out: Vec<TensionFit> = groups
        .into_values()
        .map(|g| {
            let p = g[0].p;
            let beta = nishimori_beta(p);
            let used: Vec<&&FailurePoint> = g.iter().filter(|pt| pt.pfail > 0.0).collect();
            let mut fit = TensionFit {
                p,
                beta,
                beta_sigma: f64::NAN,
                sigma_eff: f64::NAN,
                delta: f64::NAN,
                sigma_err: f64::NAN,
                delta_err: f64::NAN,
                sizes: used.len(),
                insufficient: true,
            };
            if used.len() < 4 {
                return fit;
            }
            let x: Vec<Vec<f64>> = used.iter().map(|pt| vec![1.0, pt.l as f64]).collect();
            let y: Vec<f64> = used
                .iter()
                .map(|pt| -(pt.pfail / 2.0).ln() + if capillary { 0.5 * (pt.l as f64).ln() } else { 0.0 })
                .collect();
            let w: Vec<f64> = used.iter().map(|pt| if pt.err > 0.0 { (pt.pfail / pt.err).powi(2) } else { 1.0 }).collect();
            if let Some((c, se)) = linear_least_squares(&x, &y, Some(&w)) {
                fit.beta_sigma = c[1];
                fit.sigma_eff = c[1] / beta;
                fit.delta = c[0] / beta;
                fit.sigma_err = se[1] / beta.abs();
                fit.delta_err = se[0] / beta.abs();
                fit.insufficient = false;
            }
            fit
        })
        .collect();
    out.sort_by(|a, b| a.p.total_cmp(&b.p));
    out
}

/// Linear extrapolation of `σ_eff(p)` to zero over the usable fits.
pub fn sigma_zero_crossing(fits: &[TensionFit]) -> Option<f64> {
    let ok: Vec<&TensionFit> = fits.iter().filter(|f| !f.insufficient).collect();
    if ok.len() < 2 {
        return None;
    }
    let x: Vec<Vec<f64>> = ok.iter().map(|f| vec![1.0, f.p]).collect();
    let y: Vec<f64> = ok.iter().map(|f| f.sigma_eff).collect();
    let (c, _) = linear_least_squares(&x, &y, None)?;
    (c[1] != 0.0).then(|| -c[0] / c[1])
}
