//! Post-processing: gap histograms, envelope fits, Wasserstein distances,
//! stiffness, scaling-collapse fits and model comparison.

mod collapse;
mod fits;
mod gaussian;
mod histogram;
mod lm;
mod stats;
mod stiffness;
mod tension;
mod wasserstein;

pub use collapse::{collapse_spread, DEFAULT_EPSILON};
pub use fits::{
    compare_models, crossing_estimate, fit_failure_ansatz, fit_g_collapse, g_statistic, information_criteria,
    initial_guess, FailurePoint, FitResult, GStat,
};
pub use gaussian::{gaussian_fit, gaussian_fit_pooled, gaussian_fit_weighted, GaussianFit};
pub use histogram::GapHistogram;
pub use lm::{levenberg_marquardt, LmOptions, LmResult};
pub use stats::{bootstrap_se, linear_least_squares, mean, resample, std_dev};
pub use stiffness::{stiffness_fit, StiffnessFit};
pub use tension::{fit_surface_tension, sigma_zero_crossing, TensionFit};
pub use wasserstein::{wasserstein1, wasserstein1_bootstrap, Empirical};
