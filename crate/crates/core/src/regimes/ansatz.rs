use crate::error::{domain, Result};
use crate::exact::nishimori_beta;
use crate::scalar::Real;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erf;

/// Finite-size scaling families for the failure probability.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnsatzFamily {
    /// `½(1 − erf(G/√2))`, `G = A₂x² + A₁x + A₀`.
    ErfQuadratic,
    /// `½(1 − erf(G/√2))`, `G = A₁x + A₀`.
    ErfLinear,
    /// `Ax² + Bx + C`.
    PolySimple,
    /// `Ax² + Bx + C + D·L^{−1/μ}`.
    PolyL,
}

impl AnsatzFamily {
    pub const ALL: [AnsatzFamily; 4] =
        [AnsatzFamily::ErfQuadratic, AnsatzFamily::ErfLinear, AnsatzFamily::PolySimple, AnsatzFamily::PolyL];

    /// Number of shape coefficients, excluding `p_c` and `ν`.
    pub fn coeff_count(self) -> usize {
        match self {
            AnsatzFamily::ErfQuadratic => 3,
            AnsatzFamily::ErfLinear => 2,
            AnsatzFamily::PolySimple => 3,
            AnsatzFamily::PolyL => 5,
        }
    }

    /// Total number of free parameters.
    pub fn param_count(self) -> usize {
        self.coeff_count() + 2
    }

    pub fn coeff_names(self) -> &'static [&'static str] {
        match self {
            AnsatzFamily::ErfQuadratic => &["A2", "A1", "A0"],
            AnsatzFamily::ErfLinear => &["A1", "A0"],
            AnsatzFamily::PolySimple => &["A", "B", "C"],
            AnsatzFamily::PolyL => &["A", "B", "C", "D", "mu_corr"],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            AnsatzFamily::ErfQuadratic => "erf_quadratic",
            AnsatzFamily::ErfLinear => "erf_linear",
            AnsatzFamily::PolySimple => "poly_simple",
            AnsatzFamily::PolyL => "poly_L",
        }
    }

    /// Parses a family name; `erf2`/`erf1` are accepted as aliases.
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "erf_quadratic" | "erf2" => Some(AnsatzFamily::ErfQuadratic),
            "erf_linear" | "erf1" => Some(AnsatzFamily::ErfLinear),
            "poly_simple" | "poly" => Some(AnsatzFamily::PolySimple),
            "poly_L" | "poly_l" => Some(AnsatzFamily::PolyL),
            _ => None,
        }
    }

    pub fn is_erf(self) -> bool {
        matches!(self, AnsatzFamily::ErfQuadratic | AnsatzFamily::ErfLinear)
    }
}

/// A fully specified ansatz.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnsatzSpec {
    pub family: AnsatzFamily,
    pub params: Vec<f64>,
    pub p_c: f64,
    pub nu: f64,
}

/// Scaling-variable inputs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeParams {
    pub p: f64,
    pub l: usize,
    pub p_c: f64,
    pub nu: f64,
    pub x: f64,
}

impl RegimeParams {
    pub fn new(p: f64, l: usize, p_c: f64, nu: f64) -> Result<Self> {
        if !(nu > 0.0) {
            return domain(format!("nu = {nu} must be positive"));
        }
        Ok(Self { p, l, p_c, nu, x: scaling_variable(p, l as f64, p_c, nu) })
    }
}

/// `x = (p − p_c) L^{1/ν}`.
pub fn scaling_variable(p: f64, l: f64, p_c: f64, nu: f64) -> f64 {
    (p - p_c) * l.powf(1.0 / nu)
}

/// `½(1 − erf(g/√2))`, clamped to `[0, 1]`.
pub fn erf_tail(g: f64) -> f64 {
    (0.5 * (1.0 - erf(g / std::f64::consts::SQRT_2))).clamp(0.0, 1.0)
}

impl AnsatzSpec {
    pub fn new(family: AnsatzFamily, params: Vec<f64>, p_c: f64, nu: f64) -> Result<Self> {
        let s = Self { family, params, p_c, nu };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.params.len() != self.family.coeff_count() {
            return domain(format!(
                "{} takes {} coefficients, got {}",
                self.family.name(),
                self.family.coeff_count(),
                self.params.len()
            ));
        }
        if !(self.nu > 0.0) {
            return domain("nu must be positive");
        }
        Ok(())
    }

    /// Evaluates the ansatz at scaling variable `x` for size `l`.
    pub fn eval_x(&self, x: f64, l: f64) -> f64 {
        let c = &self.params;
        match self.family {
            AnsatzFamily::ErfQuadratic => erf_tail(c[0] * x * x + c[1] * x + c[2]),
            AnsatzFamily::ErfLinear => erf_tail(c[0] * x + c[1]),
            AnsatzFamily::PolySimple => c[0] * x * x + c[1] * x + c[2],
            AnsatzFamily::PolyL => c[0] * x * x + c[1] * x + c[2] + c[3] * l.powf(-1.0 / c[4]),
        }
    }
}

/// Evaluates an ansatz at `(p, L)`.
pub fn eval_ansatz(spec: &AnsatzSpec, p: f64, l: usize) -> Result<f64> {
    spec.validate()?;
    let lf = l as f64;
    Ok(spec.eval_x(scaling_variable(p, lf, spec.p_c, spec.nu), lf))
}

/// `2 e^{−β(σ_eff L + δ)}`; β defaults to the Nishimori value at `p`.
pub fn surface_tension_model<T: Real>(p: T, l: usize, sigma_eff: T, delta: T, beta: Option<T>) -> Result<T> {
    if sigma_eff < T::zero() {
        return domain("sigma_eff must be nonnegative");
    }
    let beta = match beta {
        Some(b) => b,
        None => {
            if !(p > T::zero() && p < T::one()) {
                return domain(format!("p = {p} outside (0,1)"));
            }
            nishimori_beta(p)
        }
    };
    let lt = T::from_usize_lossy(l);
    Ok(T::lit(2.0) * (-beta * (sigma_eff * lt + delta)).exp())
}
