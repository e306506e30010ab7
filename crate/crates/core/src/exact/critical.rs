use super::nishimori::p_c;
use super::sectors::pfail_exact;
use crate::error::{domain, Result};
use crate::scalar::Real;
use serde::{Deserialize, Serialize};

/// Special-function data at the square-lattice modulus `τ = i`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalConstants {
    /// `|η(i)|`.
    pub eta_i: f64,
    pub theta2: f64,
    pub theta3: f64,
    pub theta4: f64,
    /// `θ₂ + θ₃ + θ₄`.
    pub theta_sum: f64,
    /// `dP/dx` at `x = (p − p_c)L = 0`.
    pub slope: f64,
}

/// Nome at `τ = i`.
pub fn nome_at_i() -> f64 {
    (-std::f64::consts::PI).exp()
}

const SERIES_TOL: f64 = 1e-16;

/// `θ₂(q) = 2 q^{1/4} Σ_{n≥0} q^{n(n+1)}`.
pub fn theta2(q: f64, max_terms: usize) -> f64 {
    let mut s = 0.0;
    for n in 0..max_terms {
        let t = q.powi((n * (n + 1)) as i32);
        s += t;
        if t < SERIES_TOL {
            break;
        }
    }
    2.0 * q.powf(0.25) * s
}

/// `θ₃(q) = 1 + 2 Σ_{n≥1} q^{n²}`.
pub fn theta3(q: f64, max_terms: usize) -> f64 {
    let mut s = 1.0;
    for n in 1..max_terms {
        let t = q.powi((n * n) as i32);
        s += 2.0 * t;
        if t < SERIES_TOL {
            break;
        }
    }
    s
}

/// `θ₄(q) = 1 + 2 Σ_{n≥1} (−1)ⁿ q^{n²}`.
pub fn theta4(q: f64, max_terms: usize) -> f64 {
    let mut s = 1.0;
    for n in 1..max_terms {
        let t = q.powi((n * n) as i32);
        s += if n % 2 == 0 { 2.0 * t } else { -2.0 * t };
        if t < SERIES_TOL {
            break;
        }
    }
    s
}

/// `|η(τ)| = q^{1/12} Π_{n≥1} (1 − q^{2n})` with `q = e^{iπτ}` real.
pub fn eta_abs(q: f64, max_terms: usize) -> f64 {
    let mut prod = 1.0;
    for n in 1..max_terms {
        let t = q.powi(2 * n as i32);
        prod *= 1.0 - t;
        if t < SERIES_TOL {
            break;
        }
    }
    q.powf(1.0 / 12.0) * prod
}

/// `|η(i)| = Γ(¼) / (2 π^{3/4})`.
pub fn eta_i_closed_form() -> f64 {
    statrs::function::gamma::gamma(0.25) / (2.0 * std::f64::consts::PI.powf(0.75))
}

fn constants_with_terms(max_terms: usize) -> CriticalConstants {
    let q = nome_at_i();
    let (t2, t3, t4) = (theta2(q, max_terms), theta3(q, max_terms), theta4(q, max_terms));
    let eta = eta_abs(q, max_terms);
    let theta_sum = t2 + t3 + t4;
    // Z_00 vanishes linearly in μL at criticality while the other sectors tend to
    // the θ constants; dμ/dp = −√2(1+√2) at p_c supplies the prefactor.
    let slope = 4.0 * (1.0 + std::f64::consts::SQRT_2) * eta.powi(3) / theta_sum;
    CriticalConstants { eta_i: eta, theta2: t2, theta3: t3, theta4: t4, theta_sum, slope }
}

/// Critical-point special-function constants and the threshold slope.
pub fn critical_slope() -> CriticalConstants {
    constants_with_terms(64)
}

/// Same evaluation with an explicit series cap; used to check truncation.
pub fn critical_slope_with_terms(max_terms: usize) -> CriticalConstants {
    constants_with_terms(max_terms)
}

/// Central finite difference of [`pfail_exact`] in `x = (p − p_c)L` at `x = 0`.
pub fn finite_difference_slope(l: usize, h: f64) -> Result<f64> {
    if !(h > 0.0) {
        return domain("finite-difference step must be positive");
    }
    let pc = p_c::<f64>();
    let lt = l as f64;
    let up = pfail_exact(pc + h / lt, l)?;
    let dn = pfail_exact(pc - h / lt, l)?;
    Ok((up - dn) / (2.0 * h))
}

/// First-order prediction `½ + slope·x` near threshold, `|x| ≲ 1`.
pub fn near_threshold_pfail<T: Real>(x: T, l: usize) -> Result<T> {
    if l < 2 {
        return domain(format!("L = {l} must be at least 2"));
    }
    Ok(T::lit(0.5) + T::lit(critical_slope().slope) * x)
}
