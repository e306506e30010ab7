//! Closed-form failure probability of the fully post-selected toric code.
//!
//! The four fermion partition functions of the square-lattice Ising model on an
//! `L × L` torus are combined into the four spin boundary conditions; the
//! failure probability is the weight of the three twisted sectors.

mod critical;
mod duality;
mod nishimori;
mod sectors;

pub use critical::{
    critical_slope, critical_slope_with_terms, eta_abs, eta_i_closed_form, finite_difference_slope,
    near_threshold_pfail, nome_at_i, theta2, theta3, theta4, CriticalConstants,
};
pub use duality::{duality_residual, kw_dual};
pub use nishimori::{beta_c, nishimori_beta, nishimori_point, p_c, ModelPoint, CRITICAL_TOL};
pub use sectors::{
    dispersion, fermion_sector_logs, log_pfail_exact, pfail_direct, pfail_exact, LogMag, SectorLogs, AA, AP, F00,
    F0H, FH0, FHH, PA, PP,
};
