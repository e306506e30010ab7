use super::stats::linear_least_squares;
use crate::error::{domain, Error, Result};
use serde::{Deserialize, Serialize};

/// Power-law fit `⟨ΔE⟩ = A L^θ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StiffnessFit {
    pub theta: f64,
    pub a: f64,
    pub theta_err: f64,
    pub a_err: f64,
}

/// Least-squares line through `(ln L, ln mean)`.
pub fn stiffness_fit(means: &[(usize, f64)]) -> Result<StiffnessFit> {
    if means.len() < 4 {
        return domain(format!("need at least 4 sizes, got {}", means.len()));
    }
    if let Some(m) = means.iter().find(|m| !(m.1 > 0.0)) {
        return domain(format!("nonpositive mean {} at L = {}", m.1, m.0));
    }
    let x: Vec<Vec<f64>> = means.iter().map(|m| vec![1.0, (m.0 as f64).ln()]).collect();
    let y: Vec<f64> = means.iter().map(|m| m.1.ln()).collect();
    let (c, se) = linear_least_squares(&x, &y, None).ok_or_else(|| Error::Degenerate("repeated sizes".into()))?;
    let a = c[0].exp();
    Ok(StiffnessFit { theta: c[1], a, theta_err: se[1], a_err: a * se[0] })
}
