use crate::error::{domain, Result};
use crate::scalar::Real;
use serde::{Deserialize, Serialize};

/// Tolerance for treating `p` as sitting exactly on the critical point.
pub const CRITICAL_TOL: f64 = 1e-14;

/// Critical bit-flip probability `1/(2+√2)`.
pub fn p_c<T: Real>() -> T {
    T::one() / (T::lit(2.0) + T::SQRT_2())
}

/// Inverse critical temperature `½ ln(1+√2)`.
pub fn beta_c<T: Real>() -> T {
    (T::one() + T::SQRT_2()).ln() / T::lit(2.0)
}

/// Nishimori inverse temperature for bit-flip probability `p` (J = 1).
pub fn nishimori_beta<T: Real>(p: T) -> T {
    ((T::one() - p) / p).ln() / T::lit(2.0)
}

/// A physical error rate with its Nishimori temperature and fermion mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelPoint<T> {
    pub p: T,
    pub beta: T,
    /// `ln √(sinh 2β)`; positive below threshold. For `p > ½` the magnitude of
    /// `sinh 2β` is used.
    pub mu: T,
    /// Sign of `T − T_c`, equal to the sign of `p − p_c`.
    pub temp_side: i8,
}

impl<T: Real> ModelPoint<T> {
    /// `2 sinh² μ`, the squared mass entering the dispersion.
    pub fn mass_sq(&self) -> T {
        let s = self.mu.sinh();
        T::lit(2.0) * s * s
    }

    /// Dispersion gap `ω(0) = asinh(√2 sinh|μ|)`.
    pub fn kappa(&self) -> T {
        self.mass_sq().sqrt().asinh()
    }
}

/// Builds the Nishimori point for `p ∈ (0,1)`.
pub fn nishimori_point<T: Real>(p: T) -> Result<ModelPoint<T>> {
    if !(p > T::zero() && p < T::one()) {
        return domain(format!("p = {p} outside (0,1)"));
    }
    let two = T::lit(2.0);
    let pc = p_c::<T>();
    let beta = nishimori_beta(p);
    let on_critical = (p - pc).abs() <= T::lit(CRITICAL_TOL);
    let temp_side = if on_critical {
        0
    } else if p > pc {
        1
    } else {
        -1
    };
    let mu = if on_critical {
        T::zero()
    } else {
        // sinh 2β − 1 = (p − p_c)(p − 1 − 1/√2) / (p(1 − p)), free of cancellation near p_c.
        let root2 = T::one() + T::one() / T::SQRT_2();
        let s_minus_1 = (p - pc) * (p - root2) / (p * (T::one() - p));
        let s = s_minus_1 + T::one();
        if s > T::zero() {
            s_minus_1.ln_1p() / two
        } else {
            s.abs().ln() / two
        }
    };
    Ok(ModelPoint { p, beta, mu, temp_side })
}
