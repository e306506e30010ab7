use crate::error::{domain, Result};
use crate::sim::GeometryKind;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

/// Parity of the code distance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Parity {
    Odd,
    Even,
}

impl Parity {
    pub fn of(l: usize) -> Self {
        if l.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// Whether the `(1−p)` factors of the minimum-weight count are kept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PathCountForm {
    Retained,
    Bare,
}

/// Leading-order path count for the non-post-selected codes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NonPostPathCount {
    /// Coefficient of `p^{⌈L/2⌉}` as `p → 0`.
    pub coefficient: f64,
    /// Leading-order failure probability.
    pub pfail: f64,
    /// `p < 1/(4L²)`.
    pub valid: bool,
}

/// Exact binomial coefficient as `f64`.
pub fn binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as f64
}

/// Γ-function continuation of the binomial coefficient, for plotting at
/// non-integer `n`.
pub fn binomial_continuous(n: f64, k: f64) -> f64 {
    (ln_gamma(n + 1.0) - ln_gamma(k + 1.0) - ln_gamma(n - k + 1.0)).exp()
}

/// Minimum-weight failing-error count at `p → 0`.
pub fn nmin_coefficient(kind: GeometryKind, parity: Parity, l: usize) -> Result<f64> {
    if l < 3 {
        return domain(format!("L = {l} must be at least 3"));
    }
    if Parity::of(l) != parity {
        return domain(format!("parity {parity:?} inconsistent with L = {l}"));
    }
    let lf = l as f64;
    let (lu, floor, ceil) = (l as u64, (l / 2) as u64, l.div_ceil(2) as u64);
    Ok(match (kind, parity) {
        (GeometryKind::Torus, Parity::Odd) => 2.0 * lf * binomial(lu, floor),
        (GeometryKind::Torus, Parity::Even) => lf * binomial(lu, floor),
        (GeometryKind::Planar, Parity::Even) => 0.5 * lf * binomial(lu, floor),
        (GeometryKind::Planar, Parity::Odd) => lf * lf * binomial(lu + 1, ceil) + 0.5 * lf * binomial(lu, floor),
    })
}

/// Leading-order failure probability `N_min (p/(1−p))^{⌈L/2⌉}` with
/// `N_min ∝ (1−p)^{⌊L/2⌋}`, or the bare `N_min p^{⌈L/2⌉}`.
pub fn pathcount_nonpostselected(
    kind: GeometryKind,
    parity: Parity,
    l: usize,
    p: f64,
    form: PathCountForm,
) -> Result<NonPostPathCount> {
    if !(p > 0.0 && p < 1.0) {
        return domain(format!("p = {p} outside (0,1)"));
    }
    let coefficient = nmin_coefficient(kind, parity, l)?;
    let ceil = l.div_ceil(2) as i32;
    let floor = (l / 2) as i32;
    let pfail = match form {
        PathCountForm::Retained => coefficient * (1.0 - p).powi(floor) * (p / (1.0 - p)).powi(ceil),
        PathCountForm::Bare => coefficient * p.powi(ceil),
    };
    Ok(NonPostPathCount { coefficient, pfail, valid: p < nonpost_boundary_p(l) })
}

/// Non-post-selected path-count validity edge `p = 1/(4L²)`.
pub fn nonpost_boundary_p(l: usize) -> f64 {
    1.0 / (4.0 * (l * l) as f64)
}

/// Boundary `p = 1/L²` used for shading simulated path-count curves.
pub fn simulation_boundary_p(l: f64) -> f64 {
    1.0 / (l * l)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn torus_examples() {
        assert_eq!(nmin_coefficient(GeometryKind::Torus, Parity::Odd, 3).unwrap(), 18.0);
        assert_eq!(nmin_coefficient(GeometryKind::Torus, Parity::Odd, 5).unwrap(), 100.0);
        assert_eq!(nmin_coefficient(GeometryKind::Torus, Parity::Even, 4).unwrap(), 24.0);
        let r = pathcount_nonpostselected(GeometryKind::Torus, Parity::Odd, 3, 1e-4, PathCountForm::Bare).unwrap();
        assert_relative_eq!(r.pfail, 18.0 * 1e-8, max_relative = 1e-12);
        assert!(r.valid);
    }

    #[test]
    fn planar_examples() {
        assert_eq!(nmin_coefficient(GeometryKind::Planar, Parity::Even, 4).unwrap(), 12.0);
        assert_eq!(nmin_coefficient(GeometryKind::Planar, Parity::Odd, 3).unwrap(), 9.0 * 6.0 + 4.5);
    }

    #[test]
    fn retained_tends_to_bare() {
        let a = pathcount_nonpostselected(GeometryKind::Planar, Parity::Odd, 5, 1e-6, PathCountForm::Retained).unwrap();
        let b = pathcount_nonpostselected(GeometryKind::Planar, Parity::Odd, 5, 1e-6, PathCountForm::Bare).unwrap();
        assert_relative_eq!(a.pfail, b.pfail, max_relative = 1e-5);
        let a = pathcount_nonpostselected(GeometryKind::Torus, Parity::Odd, 5, 0.05, PathCountForm::Retained).unwrap();
        assert_relative_eq!(a.pfail, 100.0 * 0.95f64.powi(2) * (0.05f64 / 0.95).powi(3), max_relative = 1e-12);
        assert!(!a.valid);
    }

    #[test]
    fn parity_mismatch_rejected() {
        assert!(nmin_coefficient(GeometryKind::Torus, Parity::Even, 5).is_err());
        assert!(nmin_coefficient(GeometryKind::Planar, Parity::Odd, 2).is_err());
    }

    #[test]
    fn continuous_binomial_matches_integers() {
        for n in 0..20u64 {
            for k in 0..=n {
                assert_relative_eq!(binomial_continuous(n as f64, k as f64), binomial(n, k), max_relative = 1e-10);
            }
        }
        let mid = binomial_continuous(7.5, 3.0);
        assert!(mid > binomial(7, 3) && mid < binomial(8, 3));
    }
}
