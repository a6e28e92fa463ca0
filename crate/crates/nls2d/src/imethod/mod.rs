//! The smoothing operator `I_N`, its modified energy, the commutator
//! nonlinearity, cutoff sweeps, dyadic region certificates, mixed-norm
//! diagnostics, and scaling arithmetic.

mod commutator;
mod multiplier;
mod regions;
mod scaling;
mod sweep;
mod zdiag;

pub use commutator::{commutator_field, commutator_norm_l1l2, commutator_norm_l1l2_window};
pub use multiplier::{apply_i, modified_energy, IMultiplierSpec};
pub use regions::{region_bound_check, Region, RegionReport};
pub use scaling::{
    choose_lambda, plan_parameters, rescale_gaussian, GridPolicy, LambdaSelection,
    PlannerConstants, ScalingPlan, ENERGY_TARGET,
};
pub use sweep::{increment_sweep, SweepRow, SweepTable};
pub use zdiag::{
    z_diagnostic, z_diagnostic_window, AdmissiblePair, AdmissiblePairSet, TimeExponent,
};
