use crate::error::{domain, Result};
use crate::exact::{beta_c, nishimori_beta, p_c};
use crate::scalar::Real;
use serde::{Deserialize, Serialize};

/// A regime estimate together with its validity flag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate<T> {
    pub value: T,
    pub valid: bool,
}

/// Path-counting estimate `2L (p/(1−p))^L`; valid for `p < 1/L`.
pub fn pathcount_postselected<T: Real>(p: T, l: usize) -> Result<Estimate<T>> {
    if !(p > T::zero() && p < T::one()) || l < 2 {
        return domain(format!("need 0 < p < 1 and L >= 2, got p = {p}, L = {l}"));
    }
    let lt = T::from_usize_lossy(l);
    let value = T::lit(2.0) * lt * (p / (T::one() - p)).powi(l as i32);
    Ok(Estimate { value, valid: p < pathcount_boundary_p(l) })
}

/// Clean-model `βσ = ln((1−p)(1−2p)/p)` on the Nishimori line.
pub fn beta_sigma_clean<T: Real>(p: T) -> Result<T> {
    let half = T::lit(0.5);
    if !(p > T::zero() && p < half) {
        return domain(format!("p = {p} outside (0, 1/2)"));
    }
    Ok(((T::one() - p) * (T::one() - p - p) / p).ln())
}

/// Onsager surface tension `σ = 2 − ln coth(β)/β` (J = 1), for `β > β_c`.
pub fn surface_tension_clean<T: Real>(beta: T) -> Result<T> {
    if !(beta > beta_c::<T>()) || !beta.is_finite() {
        return domain(format!("beta = {beta} not in the ordered phase"));
    }
    let coth = T::one() / beta.tanh();
    Ok(T::lit(2.0) - coth.ln() / beta)
}

/// Capillary-wave estimate `2√L (p/((1−p)(1−2p)))^L` for `p < p_c`.
///
/// Flagged invalid above `p_c − 1/L`.
pub fn capillary_pfail<T: Real>(p: T, l: usize) -> Result<Estimate<T>> {
    let pc = p_c::<T>();
    if !(p > T::zero() && p < pc) || l < 4 {
        return domain(format!("need 0 < p < p_c and L >= 4, got p = {p}, L = {l}"));
    }
    let lt = T::from_usize_lossy(l);
    let ratio = p / ((T::one() - p) * (T::one() - p - p));
    let value = T::lit(2.0) * lt.sqrt() * ratio.powi(l as i32);
    Ok(Estimate { value, valid: p <= capillary_boundary_p(l) })
}

/// Capillary estimate including the stiffness constant, `×√(κ/2π)`.
pub fn capillary_pfail_full<T: Real>(p: T, l: usize, stiffness: T) -> Result<Estimate<T>> {
    if !(stiffness > T::zero()) {
        return domain("stiffness must be positive");
    }
    let mut e = capillary_pfail(p, l)?;
    e.value = e.value * (stiffness / (T::lit(2.0) * T::PI())).sqrt();
    Ok(e)
}

/// Truncated domain-wall free energy `σ(β)L − ½ ln L`.
pub fn capillary_delta_f<T: Real>(beta: T, l: usize) -> Result<T> {
    let sigma = surface_tension_clean(beta)?;
    let lt = T::from_usize_lossy(l);
    Ok(sigma * lt - lt.ln() / T::lit(2.0))
}

/// Exponent of the capillary estimate, `βσL − ½ ln L`, so that
/// `capillary_pfail = 2 e^{−exponent}`. Only the bulk term carries β.
pub fn capillary_exponent<T: Real>(p: T, l: usize) -> Result<T> {
    let beta = nishimori_beta(p);
    let sigma = surface_tension_clean(beta)?;
    let lt = T::from_usize_lossy(l);
    Ok(beta * sigma * lt - lt.ln() / T::lit(2.0))
}

/// Asymptotic branch of the decay rate α(p).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum AlphaBranch {
    /// `−4(1+√2)(p − p_c)`.
    CleanNearPc,
    /// `ln(1/p)`.
    CleanSmallP,
    /// Effective tension limit `J = 1`.
    NpsSmallP,
    /// `C |p − p_c|^ν`.
    NpsNearPc { c: f64, nu: f64 },
}

/// Asymptotic forms of the surface-tension decay rate.
pub fn alpha_asymptotics<T: Real>(p: T, branch: AlphaBranch) -> Result<T> {
    let pc = p_c::<T>();
    match branch {
        AlphaBranch::CleanNearPc => {
            if !(p > T::zero() && p < T::lit(0.5)) {
                return domain("clean near-threshold branch needs 0 < p < 1/2");
            }
            Ok(-T::lit(4.0) * (T::one() + T::SQRT_2()) * (p - pc))
        }
        AlphaBranch::CleanSmallP => {
            if !(p > T::zero() && p < pc) {
                return domain("clean small-p branch needs 0 < p < p_c");
            }
            Ok(-p.ln())
        }
        AlphaBranch::NpsSmallP => {
            if !(p > T::zero() && p < T::lit(0.5)) {
                return domain("small-p branch needs 0 < p < 1/2");
            }
            Ok(T::one())
        }
        AlphaBranch::NpsNearPc { c, nu } => {
            if !(nu > 0.0) || !(p > T::zero() && p < T::one()) {
                return domain("near-threshold power law needs nu > 0 and 0 < p < 1");
            }
            Ok(T::lit(c) * (p - pc).abs().powf(T::lit(nu)))
        }
    }
}

/// Path-counting validity edge `p = 1/L`.
pub fn pathcount_boundary_p<T: Real>(l: usize) -> T {
    T::one() / T::from_usize_lossy(l)
}

/// Capillary validity edge `p = p_c − 1/L`.
pub fn capillary_boundary_p<T: Real>(l: usize) -> T {
    p_c::<T>() - T::one() / T::from_usize_lossy(l)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{nishimori_beta, pfail_exact};
    use approx::assert_relative_eq;

    #[test]
    fn pathcount_examples() {
        let e = pathcount_postselected(0.01f64, 8).unwrap();
        assert_relative_eq!(e.value, 16.0 * (0.01f64 / 0.99).powi(8), max_relative = 1e-14);
        assert_relative_eq!(e.value, 1.73e-15, max_relative = 0.01);
        assert!(e.valid);
        assert!(pathcount_postselected(1e-9f64, 8).unwrap().value < 1e-60);
    }

    #[test]
    fn pathcount_window() {
        for &l in &[16usize, 32, 64] {
            let p = 0.1 / l as f64;
            let e = pathcount_postselected(p, l).unwrap().value;
            let x = pfail_exact(p, l).unwrap();
            assert!((e / x - 1.0).abs() <= 0.02, "L={l}");
        }
    }

    #[test]
    fn beta_sigma_examples() {
        assert!(beta_sigma_clean(p_c::<f64>()).unwrap().abs() < 1e-15);
        assert_relative_eq!(beta_sigma_clean(0.1f64).unwrap(), 7.2f64.ln(), epsilon = 1e-14);
        assert_relative_eq!(beta_sigma_clean(0.01f64).unwrap(), (0.99f64 * 0.98 / 0.01).ln(), epsilon = 1e-14);
        assert_relative_eq!(beta_sigma_clean(0.01f64).unwrap(), 4.575, epsilon = 1e-3);
        assert!(beta_sigma_clean(0.4f64).unwrap() < 0.0);
    }

    #[test]
    fn onsager_matches_nishimori_form() {
        let mut p = 0.011;
        while p < p_c::<f64>() - 1e-3 {
            let b = nishimori_beta(p);
            assert_relative_eq!(b * surface_tension_clean(b).unwrap(), beta_sigma_clean(p).unwrap(), epsilon = 1e-12);
            p += 0.007;
        }
        let b = nishimori_beta(0.1f64);
        assert_relative_eq!(surface_tension_clean(b).unwrap(), 1.7969, epsilon = 1e-4);
        assert_relative_eq!(surface_tension_clean(40.0f64).unwrap(), 2.0, epsilon = 1e-12);
        assert!(surface_tension_clean(beta_c::<f64>()).is_err());
        assert!(surface_tension_clean(beta_c::<f64>() * (1.0 + 1e-9)).unwrap().abs() < 1e-6);
    }

    #[test]
    fn capillary_examples() {
        let e = capillary_pfail(0.15f64, 32).unwrap();
        assert_relative_eq!(e.value, 8.0164552e-19, max_relative = 1e-6);
        assert!(e.valid);
        assert!(!capillary_pfail(0.28f64, 32).unwrap().valid);
        assert!(capillary_pfail(0.3f64, 32).is_err());
        // Small-p limit: ratio to path counting tends to √L / 1.
        let l = 16usize;
        let p = 1e-7;
        let ratio = capillary_pfail(p, l).unwrap().value / pathcount_postselected(p, l).unwrap().value;
        assert_relative_eq!(ratio, (l as f64).sqrt() / l as f64, max_relative = 1e-4);
    }

    #[test]
    fn capillary_free_energy_consistency() {
        let b = nishimori_beta(0.1f64);
        assert_relative_eq!(capillary_delta_f(b, 1).unwrap(), surface_tension_clean(b).unwrap());
        assert_relative_eq!(capillary_delta_f(b, 64).unwrap(), 112.93, epsilon = 0.01);
        for &(p, l) in &[(0.1f64, 32usize), (0.2, 16), (0.05, 64)] {
            let lhs = 2.0 * (-capillary_exponent(p, l).unwrap()).exp();
            assert_relative_eq!(lhs, capillary_pfail(p, l).unwrap().value, max_relative = 1e-10);
        }
    }

    #[test]
    fn capillary_versus_pathcount_ordering() {
        // capillary / pathcount = (1−2p)^{−L} / √L, so the ordering flips at
        // p* = (1 − L^{−1/(2L)})/2.
        for &l in &[16usize, 32, 64] {
            let lt = l as f64;
            let p_star = 0.5 * (1.0 - lt.powf(-0.5 / lt));
            let mut p = 0.0005;
            while p < 1.0 / lt {
                let a = pathcount_postselected(p, l).unwrap().value;
                let b = capillary_pfail(p, l).unwrap().value;
                assert_relative_eq!(b / a, (1.0 - 2.0 * p).powf(-lt) / lt.sqrt(), max_relative = 1e-10);
                if p < p_star * 0.999 {
                    assert!(a > b);
                } else if p > p_star * 1.001 {
                    assert!(b > a);
                }
                p += 0.0005;
            }
        }
    }

    #[test]
    fn alpha_branches() {
        let pc = p_c::<f64>();
        assert_eq!(alpha_asymptotics(pc, AlphaBranch::CleanNearPc).unwrap(), 0.0);
        let h = 1e-6;
        let fd = (beta_sigma_clean(pc + h).unwrap() - beta_sigma_clean(pc - h).unwrap()) / (2.0 * h);
        assert!(alpha_asymptotics(pc + 1.0, AlphaBranch::CleanNearPc).is_err());
        let slope = alpha_asymptotics(pc + 0.01, AlphaBranch::CleanNearPc).unwrap() / 0.01;
        assert_relative_eq!(slope, fd, max_relative = 1e-3);
        assert_eq!(alpha_asymptotics(0.01f64, AlphaBranch::NpsSmallP).unwrap(), 1.0);
        assert_relative_eq!(alpha_asymptotics(0.01f64, AlphaBranch::CleanSmallP).unwrap(), 100f64.ln());
        let v = alpha_asymptotics(0.2f64, AlphaBranch::NpsNearPc { c: 2.0, nu: 1.5 }).unwrap();
        assert_relative_eq!(v, 2.0 * (pc - 0.2).powf(1.5));
        assert!(alpha_asymptotics(0.2f64, AlphaBranch::NpsNearPc { c: 2.0, nu: -1.0 }).is_err());
    }
}
