//! Interaction Morawetz machinery: the convex radial weight, its Hessian and
//! Laplacians, the pair-interaction action evaluated by FFT convolutions, the
//! derivative decomposition with its positivity structure, and the
//! interaction inequality checks at both the `u` and `Iu` levels.

mod action;
mod checks;
mod kernels;
mod weight;

pub use action::{
    action_derivative_terms, action_derivative_terms_with, momentum_density, morawetz_action,
    morawetz_action_with, ActionTermBreakdown,
};
pub use checks::{
    action_identity_check, almost_morawetz_check, interaction_inequality_check,
    AlmostMorawetzReport, IdentityReport, InteractionReport,
};
pub use kernels::KernelTable;
pub use weight::{
    hessian4, hessian_block, laplacian_a, laplacian_a_clamped, min_eig, weight_eval, WeightSpec,
};
