//! The `Z_I` diagnostic: the sup over a finite family of admissible pairs
//! `(q, r)` of the mixed norm `|| <grad> Iu ||_{L^q_t L^r_x}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::norms::lr_norm;
use crate::solver::Trajectory;
use crate::spectral::apply_multiplier_unchecked;

use super::multiplier::IMultiplierSpec;

/// Time exponent of a mixed norm; `q = infinity` takes the sup over samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TimeExponent {
    Finite(f64),
    Infinity,
}

/// Schrödinger-admissible pair: `2/q = 2(1/2 - 1/r)` with `q > 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdmissiblePair {
    pub q: TimeExponent,
    pub r: f64,
}

impl AdmissiblePair {
    pub fn new(q: TimeExponent, r: f64) -> Result<Self> {
        let ok = match q {
            TimeExponent::Infinity => (r - 2.0).abs() < 1e-12,
            TimeExponent::Finite(q) => q > 2.0 && (2.0 / q - 2.0 * (0.5 - 1.0 / r)).abs() < 1e-12,
        };
        if ok {
            Ok(AdmissiblePair { q, r })
        } else {
            let qv = match q {
                TimeExponent::Finite(v) => v,
                TimeExponent::Infinity => f64::INFINITY,
            };
            Err(Error::NonAdmissiblePair { q: qv, r })
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AdmissiblePairSet {
    pairs: Vec<AdmissiblePair>,
}

impl AdmissiblePairSet {
    pub fn new(pairs: Vec<AdmissiblePair>) -> Self {
        AdmissiblePairSet { pairs }
    }

    /// The default family `{(inf,2), (6,3), (4,4), (3,6)}`.
    pub fn default_set() -> Self {
        AdmissiblePairSet {
            pairs: vec![
                AdmissiblePair::new(TimeExponent::Infinity, 2.0).unwrap(),
                AdmissiblePair::new(TimeExponent::Finite(6.0), 3.0).unwrap(),
                AdmissiblePair::new(TimeExponent::Finite(4.0), 4.0).unwrap(),
                AdmissiblePair::new(TimeExponent::Finite(3.0), 6.0).unwrap(),
            ],
        }
    }

    pub fn pairs(&self) -> &[AdmissiblePair] {
        &self.pairs
    }
}

/// `<grad> Iu` with the inhomogeneous symbol `<xi> = (1 + |xi|^2)^(1/2)`.
fn bessel_i(u: &Field, spec: &IMultiplierSpec) -> Field {
    apply_multiplier_unchecked(u, |kx, ky| {
        num_complex::Complex64::new((1.0 + kx * kx + ky * ky).sqrt() * spec.m_value(kx, ky), 0.0)
    })
}

/// `Z_I` over the sample window `[lo, hi]` (inclusive indices).
pub fn z_diagnostic_window(
    traj: &Trajectory,
    spec: &IMultiplierSpec,
    pairs: &AdmissiblePairSet,
    lo: usize,
    hi: usize,
) -> Result<f64> {
    if traj.snapshots.is_empty() || hi >= traj.len() || lo > hi {
        return Err(Error::TooFewSamples {
            need: hi + 1,
            got: traj.snapshots.len(),
        });
    }
    // spatial norms for each needed r, computed once per sample
    let mut rs: Vec<f64> = pairs.pairs().iter().map(|p| p.r).collect();
    rs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    rs.dedup();
    let mut spatial: Vec<Vec<f64>> = vec![Vec::new(); rs.len()];
    for i in lo..=hi {
        let w = bessel_i(&traj.snapshots[i], spec);
        for (j, &r) in rs.iter().enumerate() {
            spatial[j].push(lr_norm(&w, r));
        }
    }
    let times = &traj.times[lo..=hi];
    let mut z: f64 = 0.0;
    for pair in pairs.pairs() {
        let j = rs.iter().position(|&r| r == pair.r).unwrap();
        let vals = &spatial[j];
        let norm = match pair.q {
            TimeExponent::Infinity => vals.iter().cloned().fold(0.0, f64::max),
            TimeExponent::Finite(q) => {
                let mut acc = 0.0;
                for i in 0..vals.len().saturating_sub(1) {
                    let dt = times[i + 1] - times[i];
                    acc += 0.5 * dt * (vals[i].powf(q) + vals[i + 1].powf(q));
                }
                acc.powf(1.0 / q)
            }
        };
        z = z.max(norm);
    }
    Ok(z)
}

/// `Z_I` over the whole trajectory.
pub fn z_diagnostic(
    traj: &Trajectory,
    spec: &IMultiplierSpec,
    pairs: &AdmissiblePairSet,
) -> Result<f64> {
    z_diagnostic_window(traj, spec, pairs, 0, traj.len().saturating_sub(1))
}
