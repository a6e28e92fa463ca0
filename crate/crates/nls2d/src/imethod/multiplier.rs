//! The smooth radial multiplier `m_N` and the operator `I_N`.
//!
//! `m_N(xi) = 1` for `|xi| <= N` and `(|xi|/N)^(s-1)` for `|xi| >= 2N`. On
//! the bridge `N < |xi| < 2N` the two branches are joined by the cubic
//! Hermite interpolant in `(log |xi|, log m)` matching value and slope at
//! both ends, which keeps `m` C^1, nonincreasing, and `m(xi)|xi|`
//! nondecreasing for `s >= 1/4`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::solver::{energy, energy_dealiased};
use crate::spectral::apply_multiplier_unchecked;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct IMultiplierSpec {
    s: f64,
    cutoff: f64,
}

impl IMultiplierSpec {
    /// Regularity `0 < s < 1` and frequency cutoff `N > 0`.
    pub fn new(s: f64, cutoff: f64) -> Result<Self> {
        if !(s > 0.0 && s < 1.0) {
            return Err(Error::InvalidRegularity(s));
        }
        if !cutoff.is_finite() || cutoff <= 0.0 {
            return Err(Error::InvalidCutoff(cutoff));
        }
        Ok(IMultiplierSpec { s, cutoff })
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    /// Radial profile `m(r)`, valid for `r >= 0`.
    pub fn m_radial(&self, r: f64) -> f64 {
        let n = self.cutoff;
        if r <= n {
            1.0
        } else if r >= 2.0 * n {
            (r / n).powf(self.s - 1.0)
        } else {
            // Hermite bridge in log-log coordinates. With t = log2(r/N) in
            // (0, 1), endpoint data (H, H') = (0, 0) at t=0 and
            // ((s-1) ln2, (s-1) ln2) at t=1 collapse to
            // H(t) = (s-1) ln2 * t^2 (2 - t).
            let t = (r / n).ln() / std::f64::consts::LN_2;
            let h = (self.s - 1.0) * std::f64::consts::LN_2 * t * t * (2.0 - t);
            h.exp()
        }
    }

    /// Multiplier value at a lattice frequency.
    pub fn m_value(&self, kx: f64, ky: f64) -> f64 {
        self.m_radial((kx * kx + ky * ky).sqrt())
    }
}

/// Apply `I_N` to a field.
pub fn apply_i(u: &Field, spec: &IMultiplierSpec) -> Field {
    apply_multiplier_unchecked(u, |kx, ky| Complex64::new(spec.m_value(kx, ky), 0.0))
}

/// Modified energy `E(Iu)`.
pub fn modified_energy(u: &Field, spec: &IMultiplierSpec, dealias: bool) -> f64 {
    let iu = apply_i(u, spec);
    if dealias {
        energy_dealiased(&iu)
    } else {
        energy(&iu)
    }
}
