//! Closed-form approximations for the post-selected and non-post-selected codes.

mod ansatz;
mod nonpost;
mod postselected;

pub use ansatz::{
    erf_tail, eval_ansatz, scaling_variable, surface_tension_model, AnsatzFamily, AnsatzSpec, RegimeParams,
};
pub use nonpost::{
    binomial, binomial_continuous, nmin_coefficient, nonpost_boundary_p, pathcount_nonpostselected,
    simulation_boundary_p, NonPostPathCount, Parity, PathCountForm,
};
pub use postselected::{
    alpha_asymptotics, beta_sigma_clean, capillary_boundary_p, capillary_delta_f, capillary_exponent,
    capillary_pfail, capillary_pfail_full, pathcount_boundary_p, pathcount_postselected, surface_tension_clean,
    AlphaBranch, Estimate,
};
