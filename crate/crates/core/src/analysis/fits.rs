use super::lm::{levenberg_marquardt, LmOptions};
use super::stats::{bootstrap_se, linear_least_squares, mean, std_dev};
use crate::error::{domain, Error, Result};
use crate::regimes::{erf_tail, scaling_variable, AnsatzFamily, AnsatzSpec};
use serde::{Deserialize, Serialize};
use statrs::function::erf::erf_inv;
use std::collections::BTreeMap;

/// A measured failure rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FailurePoint {
    pub l: usize,
    pub p: f64,
    pub pfail: f64,
    /// Standard error used as the fit weight.
    pub err: f64,
}

/// Fitted parameters with least-squares diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub family: String,
    pub params: BTreeMap<String, f64>,
    pub stderrs: BTreeMap<String, f64>,
    /// Unweighted residual sum of squares.
    pub rss: f64,
    /// Weighted residual sum of squares (the minimised objective).
    pub chi2: f64,
    pub aic: f64,
    pub bic: f64,
    pub n: usize,
    pub k: usize,
    pub converged: bool,
    pub iterations: usize,
}

impl FitResult {
    pub fn param(&self, name: &str) -> f64 {
        self.params.get(name).copied().unwrap_or(f64::NAN)
    }

    pub fn stderr(&self, name: &str) -> f64 {
        self.stderrs.get(name).copied().unwrap_or(f64::NAN)
    }

    /// `½(1 − erf(c/√2))` for the constant term `c` of an erf-type or `g`
    /// collapse fit.
    pub fn implied_pfail_at_threshold(&self) -> Option<f64> {
        let c = ["A0", "B0"].iter().find_map(|n| self.params.get(*n))?;
        Some(erf_tail(*c))
    }
}

/// `n ln(rss/n) + 2k` and `n ln(rss/n) + k ln n`.
pub fn information_criteria(rss: f64, n: usize, k: usize) -> (f64, f64) {
    let nf = n as f64;
    let base = nf * (rss / nf).ln();
    (base + 2.0 * k as f64, base + k as f64 * nf.ln())
}

fn build_result(
    family: &str,
    names: &[String],
    lm: &super::lm::LmResult,
    rss: f64,
    n: usize,
) -> FitResult {
    let k = names.len();
    let (aic, bic) = information_criteria(rss, n, k);
    let mut params = BTreeMap::new();
    let mut stderrs = BTreeMap::new();
    for (i, name) in names.iter().enumerate() {
        params.insert(name.clone(), lm.params[i]);
        let se = lm.covariance.as_ref().map_or(f64::NAN, |c| c[(i, i)].max(0.0).sqrt());
        stderrs.insert(name.clone(), se);
    }
    FitResult {
        family: family.to_string(),
        params,
        stderrs,
        rss,
        chi2: lm.cost,
        aic,
        bic,
        n,
        k,
        converged: lm.converged,
        iterations: lm.iterations,
    }
}

/// Crossing of the two largest-size curves, by linear interpolation of
/// their difference; falls back to the mean abscissa.
pub fn crossing_estimate(points: &[(usize, f64, f64)]) -> f64 {
    let mut sizes: Vec<usize> = points.iter().map(|p| p.0).collect();
    sizes.sort_unstable();
    sizes.dedup();
    let fallback = points.iter().map(|p| p.1).sum::<f64>() / points.len() as f64;
    if sizes.len() < 2 {
        return fallback;
    }
    let (big, small) = (sizes[sizes.len() - 1], sizes[sizes.len() - 2]);
    let curve = |l: usize| -> Vec<(f64, f64)> {
        let mut c: Vec<(f64, f64)> = points.iter().filter(|p| p.0 == l).map(|p| (p.1, p.2)).collect();
        c.sort_by(|a, b| a.0.total_cmp(&b.0));
        c
    };
    let (cb, cs) = (curve(big), curve(small));
    let diffs: Vec<(f64, f64)> = cb
        .iter()
        .filter_map(|&(p, y)| cs.iter().find(|q| (q.0 - p).abs() < 1e-12).map(|q| (p, y - q.1)))
        .collect();
    for w in diffs.windows(2) {
        let ((p0, d0), (p1, d1)) = (w[0], w[1]);
        if d0 == 0.0 {
            return p0;
        }
        if d0.signum() != d1.signum() {
            return p0 + (p1 - p0) * d0 / (d0 - d1);
        }
    }
    diffs.iter().min_by(|a, b| a.1.abs().total_cmp(&b.1.abs())).map_or(fallback, |d| d.0)
}

fn poly_seed(xs: &[f64], ys: &[f64], degree: usize) -> Vec<f64> {
    let x: Vec<Vec<f64>> = xs.iter().map(|&x| (0..=degree).rev().map(|d| x.powi(d as i32)).collect()).collect();
    linear_least_squares(&x, ys, None).map(|r| r.0).unwrap_or_else(|| vec![0.0; degree + 1])
}

/// Default starting point: `p_c` from the largest-size crossing, `ν = 1.5`,
/// and shape coefficients by linear regression at those values.
pub fn initial_guess(points: &[FailurePoint], family: AnsatzFamily) -> Vec<f64> {
    let trip: Vec<(usize, f64, f64)> = points.iter().map(|p| (p.l, p.p, p.pfail)).collect();
    let p_c = crossing_estimate(&trip);
    let nu = 1.5;
    let xs: Vec<f64> = points.iter().map(|p| scaling_variable(p.p, p.l as f64, p_c, nu)).collect();
    let gs: Vec<f64> = points
        .iter()
        .map(|p| std::f64::consts::SQRT_2 * erf_inv(1.0 - 2.0 * p.pfail.clamp(1e-9, 0.5 - 1e-9)))
        .collect();
    let ys: Vec<f64> = points.iter().map(|p| p.pfail).collect();
    let mut coeffs = match family {
        AnsatzFamily::ErfQuadratic => poly_seed(&xs, &gs, 2),
        AnsatzFamily::ErfLinear => poly_seed(&xs, &gs, 1),
        AnsatzFamily::PolySimple => poly_seed(&xs, &ys, 2),
        AnsatzFamily::PolyL => {
            let mut c = poly_seed(&xs, &ys, 2);
            c.extend([0.01, 1.0]);
            c
        }
    };
    coeffs.extend([p_c, nu]);
    coeffs
}

fn check_points(points: &[FailurePoint], k: usize) -> Result<()> {
    if points.len() <= k {
        return domain(format!("{} points cannot determine {k} parameters", points.len()));
    }
    if let Some(p) = points.iter().find(|p| !(p.err > 0.0) || !p.err.is_finite()) {
        return Err(Error::Degenerate(format!("nonpositive weight at L = {}, p = {}", p.l, p.p)));
    }
    Ok(())
}

/// Weighted nonlinear least squares of an ansatz family with free `p_c`
/// and `ν`.
pub fn fit_failure_ansatz(points: &[FailurePoint], family: AnsatzFamily, init: Option<&[f64]>) -> Result<FitResult> {
    let k = family.param_count();
    check_points(points, k)?;
    let x0 = match init {
        Some(v) if v.len() == k => v.to_vec(),
        Some(v) => return domain(format!("initial guess has {} entries, expected {k}", v.len())),
        None => initial_guess(points, family),
    };
    let nc = family.coeff_count();
    let model = |x: &[f64]| -> Option<AnsatzSpec> {
        let nu = x[nc + 1];
        if !(nu > 0.0) || (family == AnsatzFamily::PolyL && x[4] == 0.0) {
            return None;
        }
        Some(AnsatzSpec { family, params: x[..nc].to_vec(), p_c: x[nc], nu })
    };
    let eval = |spec: &AnsatzSpec, pt: &FailurePoint| {
        spec.eval_x(scaling_variable(pt.p, pt.l as f64, spec.p_c, spec.nu), pt.l as f64)
    };
    let resid = |x: &[f64]| -> Option<Vec<f64>> {
        let spec = model(x)?;
        let r: Vec<f64> = points.iter().map(|pt| (pt.pfail - eval(&spec, pt)) / pt.err).collect();
        r.iter().all(|v| v.is_finite()).then_some(r)
    };
    let lm = levenberg_marquardt(resid, &x0, LmOptions::default())
        .ok_or_else(|| Error::NonConvergence("initial guess outside the model domain".into()))?;
    let spec = model(&lm.params).ok_or_else(|| Error::NonConvergence("solution outside the model domain".into()))?;
    let rss: f64 = points.iter().map(|pt| (pt.pfail - eval(&spec, pt)).powi(2)).sum();
    let mut names: Vec<String> = family.coeff_names().iter().map(|s| s.to_string()).collect();
    names.extend(["p_c".to_string(), "nu".to_string()]);
    Ok(build_result(family.name(), &names, &lm, rss, points.len()))
}

/// Fits every family and orders them by AIC.
pub fn compare_models(points: &[FailurePoint]) -> Result<Vec<FitResult>> {
    let mut out = AnsatzFamily::ALL
        .iter()
        .map(|&f| fit_failure_ansatz(points, f, None))
        .collect::<Result<Vec<_>>>()?;
    out.sort_by(|a, b| a.aic.total_cmp(&b.aic));
    Ok(out)
}

/// `g = μ/σ` of the energy-cost distribution at one `(L, p)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GStat {
    pub l: usize,
    pub p: f64,
    pub mu: f64,
    pub sigma: f64,
    pub g: f64,
    pub g_err: f64,
}

/// Sample `μ/σ` of `delta_e` with a bootstrap error.
pub fn g_statistic(l: usize, p: f64, delta_e: &[i64], resamples: u64, seed: u64) -> Result<GStat> {
    if delta_e.len() < 2 {
        return domain("need at least two samples");
    }
    let xs: Vec<f64> = delta_e.iter().map(|&d| d as f64).collect();
    let (mu, sigma) = (mean(&xs), std_dev(&xs));
    if !(sigma > 0.0) {
        return Err(Error::Degenerate("zero variance".into()));
    }
    let g_err = bootstrap_se(&xs, resamples, seed, |s| mean(s) / std_dev(s));
    Ok(GStat { l, p, mu, sigma, g: mu / sigma, g_err })
}

/// Weighted fit of `g(x) = B₂x² + B₁x + B₀` with free `p_c` and `ν`.
pub fn fit_g_collapse(points: &[GStat], init: Option<&[f64]>) -> Result<FitResult> {
    let mut per_size: BTreeMap<usize, usize> = BTreeMap::new();
    for pt in points {
        *per_size.entry(pt.l).or_default() += 1;
    }
    if per_size.len() < 3 || per_size.values().any(|&c| c < 5) {
        return domain("need at least 3 sizes with 5 p values each");
    }
    if points.iter().any(|p| !(p.g_err > 0.0)) {
        return Err(Error::Degenerate("nonpositive g error".into()));
    }
    let x0 = match init {
        Some(v) => v.to_vec(),
        None => {
            let trip: Vec<(usize, f64, f64)> = points.iter().map(|p| (p.l, p.p, p.g)).collect();
            let p_c = crossing_estimate(&trip);
            let xs: Vec<f64> = points.iter().map(|p| scaling_variable(p.p, p.l as f64, p_c, 1.5)).collect();
            let ys: Vec<f64> = points.iter().map(|p| p.g).collect();
            let mut c = poly_seed(&xs, &ys, 2);
            c.extend([p_c, 1.5]);
            c
        }
    };
    let eval = |x: &[f64], pt: &GStat| {
        let xx = scaling_variable(pt.p, pt.l as f64, x[3], x[4]);
        x[0] * xx * xx + x[1] * xx + x[2]
    };
    let resid = |x: &[f64]| -> Option<Vec<f64>> {
        if !(x[4] > 0.0) {
            return None;
        }
        Some(points.iter().map(|pt| (pt.g - eval(x, pt)) / pt.g_err).collect())
    };
    let lm = levenberg_marquardt(resid, &x0, LmOptions::default())
        .ok_or_else(|| Error::NonConvergence("initial guess outside the model domain".into()))?;
    let rss: f64 = points.iter().map(|pt| (pt.g - eval(&lm.params, pt)).powi(2)).sum();
    let names: Vec<String> = ["B2", "B1", "B0", "p_c", "nu"].iter().map(|s| s.to_string()).collect();
    Ok(build_result("g_quadratic", &names, &lm, rss, points.len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regimes::eval_ansatz;
    use rand::distributions::Distribution;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use statrs::distribution::{Binomial, Normal};

    const TRUE: [f64; 5] = [5.509, -4.613, 1.041, 0.1028, 1.517];

    fn synthetic(seed: u64, shots: u64) -> Vec<FailurePoint> {
        let spec = AnsatzSpec::new(AnsatzFamily::ErfQuadratic, TRUE[..3].to_vec(), TRUE[3], TRUE[4]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::new();
        for l in [5usize, 7, 9, 11] {
            for i in 0..9 {
                let p = 0.08 + 0.005 * i as f64;
                let truth = eval_ansatz(&spec, p, l).unwrap();
                let k = Binomial::new(truth, shots).unwrap().sample(&mut rng);
                let ph = k / shots as f64;
                let err = (ph.max(0.5 / shots as f64) * (1.0 - ph) / shots as f64).sqrt();
                out.push(FailurePoint { l, p, pfail: ph, err });
            }
        }
        out
    }

    #[test]
    fn criteria_formulas() {
        let (a, b) = information_criteria(2.0, 10, 3);
        assert!((a - (10.0 * 0.2f64.ln() + 6.0)).abs() < 1e-12);
        assert!((b - (10.0 * 0.2f64.ln() + 3.0 * 10f64.ln())).abs() < 1e-12);
    }

    #[test]
    fn erf_round_trip() {
        let pts = synthetic(1, 20_000);
        let f = fit_failure_ansatz(&pts, AnsatzFamily::ErfQuadratic, None).unwrap();
        assert!(f.converged);
        assert_eq!((f.n, f.k), (36, 5));
        for (name, t) in ["A2", "A1", "A0", "p_c", "nu"].iter().zip(TRUE) {
            assert!((f.param(name) - t).abs() < 3.0 * f.stderr(name), "{name}: {} ± {}", f.param(name), f.stderr(name));
        }
        let (a, b) = information_criteria(f.rss, f.n, f.k);
        assert_eq!((a, b), (f.aic, f.bic));
    }

    #[test]
    fn erf_round_trip_coverage() {
        let mut hits = 0;
        for seed in 0..100 {
            let pts = synthetic(100 + seed, 20_000);
            let f = fit_failure_ansatz(&pts, AnsatzFamily::ErfQuadratic, None).unwrap();
            let ok = ["p_c", "nu"].iter().zip([TRUE[3], TRUE[4]]).all(|(n, t)| (f.param(n) - t).abs() < 3.0 * f.stderr(n));
            hits += usize::from(ok);
        }
        assert!(hits >= 95, "{hits}");
    }

    #[test]
    fn ranking_invariant_under_error_rescaling() {
        let pts = synthetic(7, 20_000);
        let scaled: Vec<FailurePoint> = pts.iter().map(|p| FailurePoint { err: 3.0 * p.err, ..*p }).collect();
        let a: Vec<String> = compare_models(&pts).unwrap().into_iter().map(|f| f.family).collect();
        let b: Vec<String> = compare_models(&scaled).unwrap().into_iter().map(|f| f.family).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_bad_weights() {
        let mut pts = synthetic(2, 1000);
        pts[0].err = 0.0;
        assert!(fit_failure_ansatz(&pts, AnsatzFamily::ErfLinear, None).is_err());
    }

    #[test]
    fn crossing_interpolates() {
        let pts = vec![(8, 0.1, 0.2), (8, 0.2, 0.4), (16, 0.1, 0.1), (16, 0.2, 0.5)];
        assert!((crossing_estimate(&pts) - 0.15).abs() < 1e-12);
    }

    #[test]
    fn g_collapse_round_trip() {
        let (b2, b1, b0, pc, nu) = (9.569, -5.3989, 1.091, 0.1014, 1.60);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let noise = Normal::new(0.0, 1.0).unwrap();
        let mut pts = Vec::new();
        for l in [5usize, 7, 9, 11, 13] {
            for i in 0..7 {
                let p = 0.09 + 0.004 * i as f64;
                let x = scaling_variable(p, l as f64, pc, nu);
                let err = 0.01;
                let g = b2 * x * x + b1 * x + b0 + err * noise.sample(&mut rng);
                pts.push(GStat { l, p, mu: g, sigma: 1.0, g, g_err: err });
            }
        }
        let f = fit_g_collapse(&pts, None).unwrap();
        for (n, t) in ["B2", "B1", "B0", "p_c", "nu"].iter().zip([b2, b1, b0, pc, nu]) {
            assert!((f.param(n) - t).abs() < 3.0 * f.stderr(n), "{n}: {} ± {}", f.param(n), f.stderr(n));
        }
        let implied = f.implied_pfail_at_threshold().unwrap();
        assert!((implied - erf_tail(f.param("B0"))).abs() < 1e-15);
        assert!(fit_g_collapse(&pts[..10], None).is_err());
    }

    #[test]
    fn g_statistic_basic() {
        let d: Vec<i64> = (0..400).map(|i| 2 * ((i % 7) as i64 - 1)).collect();
        let s = g_statistic(5, 0.1, &d, 50, 1).unwrap();
        assert!((s.g - s.mu / s.sigma).abs() < 1e-15);
        assert!(s.g_err > 0.0);
    }
}
