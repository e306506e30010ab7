use nalgebra::{DMatrix, DVector};

/// Levenberg–Marquardt options.
#[derive(Debug, Clone, Copy)]
pub struct LmOptions {
    pub max_iter: usize,
    /// Stop when every parameter moves by less than this relative amount.
    pub rel_tol: f64,
    /// Or when an accepted step lowers the cost by less than this fraction.
    pub cost_tol: f64,
}

impl Default for LmOptions {
    fn default() -> Self {
        Self { max_iter: 200, rel_tol: 1e-8, cost_tol: 1e-12 }
    }
}

#[derive(Debug, Clone)]
pub struct LmResult {
    pub params: Vec<f64>,
    /// Sum of squared residuals at the solution.
    pub cost: f64,
    pub covariance: Option<DMatrix<f64>>,
    pub iterations: usize,
    pub converged: bool,
}

fn jacobian<F>(f: &F, x: &[f64], r0: &DVector<f64>) -> Option<DMatrix<f64>>
where
    F: Fn(&[f64]) -> Option<Vec<f64>>,
{
    let n = r0.len();
    let mut j = DMatrix::zeros(n, x.len());
    let mut xp = x.to_vec();
    for k in 0..x.len() {
        let h = 1e-6 * x[k].abs().max(1e-3);
        xp[k] = x[k] + h;
        let rp = f(&xp)?;
        xp[k] = x[k] - h;
        let rm = f(&xp)?;
        xp[k] = x[k];
        for i in 0..n {
            j[(i, k)] = (rp[i] - rm[i]) / (2.0 * h);
        }
    }
    Some(j)
}

/// Minimises `Σ r_i(x)²`; `f` returns `None` outside its domain.
pub fn levenberg_marquardt<F>(f: F, x0: &[f64], opts: LmOptions) -> Option<LmResult>
where
    F: Fn(&[f64]) -> Option<Vec<f64>>,
{
    let mut x = x0.to_vec();
    let mut r = DVector::from_vec(f(&x)?);
    let mut cost = r.norm_squared();
    let mut lambda = 1e-3;
    let mut converged = false;
    let mut iterations = 0;
    let k = x.len();
    while iterations < opts.max_iter {
        iterations += 1;
        let j = jacobian(&f, &x, &r)?;
        let a = j.transpose() * &j;
        let g = j.transpose() * &r;
        let mut stepped = false;
        while lambda < 1e16 {
            let mut damped = a.clone();
            for d in 0..k {
                damped[(d, d)] += lambda * a[(d, d)].max(1e-12);
            }
            let Some(delta) = damped.lu().solve(&(-&g)) else {
                lambda *= 10.0;
                continue;
            };
            let trial: Vec<f64> = x.iter().zip(delta.iter()).map(|(a, b)| a + b).collect();
            if let Some(rt) = f(&trial) {
                let rt = DVector::from_vec(rt);
                let ct = rt.norm_squared();
                if ct.is_finite() && ct <= cost {
                    let small = x.iter().zip(delta.iter()).all(|(xi, di)| di.abs() <= opts.rel_tol * xi.abs().max(1e-12))
                        || cost - ct <= opts.cost_tol * cost;
                    x = trial;
                    r = rt;
                    cost = ct;
                    lambda = (lambda / 3.0).max(1e-12);
                    stepped = true;
                    if small {
                        converged = true;
                    }
                    break;
                }
            }
            lambda *= 4.0;
        }
        if !stepped {
            // no descent direction left at working precision
            converged = true;
        }
        if converged {
            break;
        }
    }
    let j = jacobian(&f, &x, &r)?;
    let n = r.len();
    let s2 = if n > k { cost / (n - k) as f64 } else { f64::NAN };
    let covariance = (j.transpose() * &j).try_inverse().map(|m| m * s2);
    Some(LmResult { params: x, cost, covariance, iterations, converged })
}
