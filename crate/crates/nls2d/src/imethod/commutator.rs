//! The commutator nonlinearity `I(|u|^2 u) - |Iu|^2 Iu` and its
//! `L^1_t L^2_x` trajectory norm.

use crate::error::{Error, Result};
use crate::field::Field;
use crate::norms::l2_norm;
use crate::solver::Trajectory;
use crate::spectral::cubic_term;

use super::multiplier::{apply_i, IMultiplierSpec};

/// `I(|u|^2 u) - |Iu|^2 (Iu)`, both cubic products dealiased.
pub fn commutator_field(u: &Field, spec: &IMultiplierSpec) -> Field {
    let good = cubic_term(&apply_i(u, spec));
    let bad = apply_i(&cubic_term(u), spec);
    bad.sub(&good).expect("same grid by construction")
}

/// Trapezoid-in-time of the spatial `L^2` norm of the commutator over a
/// window of trajectory samples `[lo, hi]` (inclusive sample indices).
pub fn commutator_norm_l1l2_window(
    traj: &Trajectory,
    spec: &IMultiplierSpec,
    lo: usize,
    hi: usize,
) -> Result<f64> {
    if traj.snapshots.len() != traj.times.len() {
        return Err(Error::TooFewSamples {
            need: traj.times.len(),
            got: traj.snapshots.len(),
        });
    }
    if hi <= lo || hi >= traj.len() {
        return Err(Error::TooFewSamples {
            need: lo + 2,
            got: traj.len(),
        });
    }
    let norms: Vec<f64> = (lo..=hi)
        .map(|i| l2_norm(&commutator_field(&traj.snapshots[i], spec)))
        .collect();
    let mut acc = 0.0;
    for i in 0..norms.len() - 1 {
        let dt = traj.times[lo + i + 1] - traj.times[lo + i];
        acc += 0.5 * dt * (norms[i] + norms[i + 1]);
    }
    Ok(acc)
}

/// `|| I(|u|^2 u) - |Iu|^2 Iu ||_{L^1_t L^2_x}` over the whole trajectory.
pub fn commutator_norm_l1l2(traj: &Trajectory, spec: &IMultiplierSpec) -> Result<f64> {
    commutator_norm_l1l2_window(traj, spec, 0, traj.len().saturating_sub(1))
}
