//! Scaling symmetry `u -> (1/lambda) u(t/lambda^2, x/lambda)` applied to
//! closed-form Gaussian parameters, the lambda selection that normalizes
//! `E(Iu_{0,lambda}) = 2/5`, and the closed-form planner arithmetic.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::norms::homogeneous_sobolev_norm;
use crate::synth::{synthesize_gaussian, GaussianParams};

use super::multiplier::{modified_energy, IMultiplierSpec};

/// Post-rescaling modified-energy target, `E(Iu_{0,lambda}) = 2/5`.
pub const ENERGY_TARGET: f64 = 0.4;
/// Ceiling the bootstrap argument maintains.
pub const ENERGY_CEILING: f64 = 1.0;
/// Normalization target used by the cutoff sweeps so that `E(Iu(0)) <= 1`
/// holds with headroom across the whole ladder.
pub(crate) const SWEEP_ENERGY_CAP: f64 = 0.9;

const LAMBDA_LO: f64 = 1e-6;
const LAMBDA_HI: f64 = 1e6;

/// Apply the scaling map to Gaussian parameters analytically:
/// amplitude `A -> A/lambda`, width `sigma -> lambda sigma`,
/// center `x0 -> lambda x0`, phase velocity `v -> v/lambda`.
pub fn rescale_gaussian(params: &GaussianParams, lambda: f64) -> GaussianParams {
    GaussianParams {
        amplitude: params.amplitude / lambda,
        sigma: params.sigma * lambda,
        center: (params.center.0 * lambda, params.center.1 * lambda),
        velocity: (params.velocity.0 / lambda, params.velocity.1 / lambda),
    }
}

/// Rule for growing the computational box when rescaled data no longer fits.
/// The box doubles (with `n`, keeping `dx`) until `sigma <= L/8`, and refines
/// (doubling `n` at fixed `L`) until `sigma >= 8 dx`.
#[derive(Debug, Clone, Copy)]
pub struct GridPolicy {
    pub base: Grid,
    pub max_n: usize,
}

impl GridPolicy {
    pub fn grid_for(&self, sigma: f64) -> Result<Grid> {
        let mut n = self.base.n();
        let mut length = self.base.length();
        while sigma > length / 8.0 {
            n *= 2;
            length *= 2.0;
            if n > self.max_n {
                return Err(Error::GridPolicyExhausted { max_n: self.max_n });
            }
        }
        while sigma < 8.0 * (length / n as f64) {
            n *= 2;
            if n > self.max_n {
                return Err(Error::GridPolicyExhausted { max_n: self.max_n });
            }
        }
        Grid::new(n, length)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LambdaSelection {
    pub lambda: f64,
    pub grid_n: usize,
    pub grid_length: f64,
    /// `E(Iu_{0,lambda})` at the selected lambda.
    pub e_iu: f64,
    /// Relative error of the measured `||u_{0,lambda}||_{H^s-dot}` against the
    /// exact scaling `lambda^{-s} ||u_0||_{H^s-dot}`. Lattice quadrature of
    /// the homogeneous weight `|xi|^(2s)` carries a cone error at `xi = 0` of
    /// order `(2pi/L)^3 |u_hat(0)|^2`, so this sits near 1e-3 at desk-scale
    /// boxes; it verifies the scaling exponent, not machine precision.
    pub hs_scaling_rel_err: f64,
}

/// Bracket and bisect `lambda` in `[1e-6, 1e6]` until
/// `|E(Iu_{0,lambda}) - 2/5| <= 1e-6`, re-synthesizing the Gaussian on the
/// policy grid at each trial.
pub fn choose_lambda(
    params: &GaussianParams,
    s: f64,
    cutoff: f64,
    policy: &GridPolicy,
) -> Result<LambdaSelection> {
    let spec = IMultiplierSpec::new(s, cutoff)?;
    let energy_at = |lambda: f64| -> Result<f64> {
        let scaled = rescale_gaussian(params, lambda);
        let grid = policy.grid_for(scaled.sigma)?;
        let u = synthesize_gaussian(grid, &scaled)?;
        Ok(modified_energy(&u, &spec, true))
    };

    // scan decades for a sign change of E - target (E decreases in lambda)
    let mut bracket: Option<(f64, f64)> = None;
    let mut prev: Option<(f64, f64)> = None;
    let decades = 25;
    for i in 0..=decades {
        let lambda = LAMBDA_LO * (LAMBDA_HI / LAMBDA_LO).powf(i as f64 / decades as f64);
        let e = match energy_at(lambda) {
            Ok(e) => e,
            Err(_) => continue, // grid policy could not resolve this lambda
        };
        if let Some((pl, pe)) = prev {
            if (pe - ENERGY_TARGET) * (e - ENERGY_TARGET) <= 0.0 {
                bracket = Some((pl, lambda));
                break;
            }
        }
        prev = Some((lambda, e));
    }
    let (mut lo, mut hi) = bracket.ok_or(Error::LambdaBracketing {
        lo: LAMBDA_LO,
        hi: LAMBDA_HI,
        target: ENERGY_TARGET,
    })?;

    let mut e_lo = energy_at(lo)?;
    let mut lambda = lo;
    let mut e_mid = e_lo;
    for _ in 0..200 {
        lambda = (lo * hi).sqrt();
        e_mid = energy_at(lambda)?;
        if (e_mid - ENERGY_TARGET).abs() <= 1e-6 {
            break;
        }
        if (e_lo - ENERGY_TARGET) * (e_mid - ENERGY_TARGET) <= 0.0 {
            hi = lambda;
        } else {
            lo = lambda;
            e_lo = e_mid;
        }
    }

    // side check: homogeneous Sobolev scaling
    let base_grid = policy.grid_for(params.sigma)?;
    let u0 = synthesize_gaussian(base_grid, params)?;
    let hs0 = homogeneous_sobolev_norm(&u0, s);
    let scaled = rescale_gaussian(params, lambda);
    let grid = policy.grid_for(scaled.sigma)?;
    let u_l = synthesize_gaussian(grid, &scaled)?;
    let hs_l = homogeneous_sobolev_norm(&u_l, s);
    let expect = lambda.powf(-s) * hs0;
    let hs_scaling_rel_err = (hs_l - expect).abs() / expect.max(f64::MIN_POSITIVE);

    Ok(LambdaSelection {
        lambda,
        grid_n: grid.n(),
        grid_length: grid.length(),
        e_iu: e_mid,
        hs_scaling_rel_err,
    })
}

/// Constants the closed-form planner takes as inputs; the analysis never
/// instantiates them.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PlannerConstants {
    pub c_prime: f64,
    pub c0: f64,
    /// Realization of the `+` in exponents like `3s/(8s-2)+`.
    pub delta_exp: f64,
}

impl Default for PlannerConstants {
    fn default() -> Self {
        PlannerConstants {
            c_prime: 1.0,
            c0: 1.0,
            delta_exp: 0.01,
        }
    }
}

/// Closed-form experiment plan for horizon `t0` and mass `m0 = ||u0||_2`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScalingPlan {
    pub s: f64,
    pub t0: f64,
    pub m0: f64,
    pub eps: f64,
    /// Frequency cutoff `N(T0)`.
    pub cutoff: f64,
    /// Rescaling factor `lambda = C0 N^((1-s)/s)`.
    pub lambda: f64,
    /// `3s/(8s-2)`, the cutoff exponent before the `+`.
    pub n_exponent: f64,
    /// The exponent actually applied, `3s/(8s-2) + delta_exp`.
    pub n_exponent_applied: f64,
    /// `s(1-s)/(8s-2)`, the Sobolev growth exponent.
    pub growth_exponent: f64,
    /// Number of local intervals `2 C0 lambda^(2/3) T^(1/3) (m0^3 + m0^4) / eps^4`.
    pub partition_count: f64,
    pub energy_initial: f64,
    pub energy_ceiling: f64,
}

/// Pure planner arithmetic; requires `s > 1/4` (the exponent `3s/(8s-2)`
/// degenerates as `s -> 1/4+`).
pub fn plan_parameters(
    s: f64,
    t0: f64,
    m0: f64,
    eps: f64,
    consts: &PlannerConstants,
) -> Result<ScalingPlan> {
    if !(s > 0.25 && s < 1.0) {
        return Err(Error::RegimeError(s));
    }
    let n_exponent = 3.0 * s / (8.0 * s - 2.0);
    let n_exponent_applied = n_exponent + consts.delta_exp;
    let base = 20.0
        * consts.c_prime
        * consts.c0.powf(2.0 / 3.0)
        * t0.powf(1.0 / 3.0)
        * (m0.powi(4) + m0.powi(3))
        / eps.powi(4);
    let cutoff = base.powf(n_exponent_applied).max(1.0);
    let lambda = consts.c0 * cutoff.powf((1.0 - s) / s);
    let partition_count =
        2.0 * consts.c0 * lambda.powf(2.0 / 3.0) * t0.powf(1.0 / 3.0) * (m0.powi(3) + m0.powi(4))
            / eps.powi(4);
    Ok(ScalingPlan {
        s,
        t0,
        m0,
        eps,
        cutoff,
        lambda,
        n_exponent,
        n_exponent_applied,
        growth_exponent: s * (1.0 - s) / (8.0 * s - 2.0),
        partition_count,
        energy_initial: ENERGY_TARGET,
        energy_ceiling: ENERGY_CEILING,
    })
}
