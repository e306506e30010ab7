use super::sectors::pfail_exact;
use crate::error::{domain, Result};
use crate::scalar::Real;

/// Kramers–Wannier dual error rate `p* = (1−2p)/(2(1−p))`, defined through
/// `tanh β* = p/(1−p) = 1 − 2p*`.
pub fn kw_dual<T: Real>(p: T) -> Result<T> {
    let half = T::lit(0.5);
    if !(p > T::zero() && p < half) {
        return domain(format!("p = {p} outside (0, 1/2)"));
    }
    Ok((T::one() - p - p) / (T::lit(2.0) * (T::one() - p)))
}

/// `(1 − P(p))(1 − P(p*)) − ¼`, which vanishes identically.
pub fn duality_residual<T: Real>(p: T, l: usize) -> Result<T> {
    let dual = kw_dual(p)?;
    let a = T::one() - pfail_exact(p, l)?;
    let b = T::one() - pfail_exact(dual, l)?;
    Ok(a * b - T::lit(0.25))
}
