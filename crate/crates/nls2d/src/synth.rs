//! Initial-data synthesis: localized Gaussian wave packets and seeded
//! borderline-rough `H^s` data.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Field, Spectrum};
use crate::grid::Grid;
use crate::spectral::inverse;

/// Closed-form parameters of a Gaussian wave packet
/// `u(x) = A exp(-|x - x0|^2 / (2 sigma^2)) exp(i v . x)`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GaussianParams {
    pub amplitude: f64,
    pub sigma: f64,
    pub center: (f64, f64),
    pub velocity: (f64, f64),
}

impl GaussianParams {
    /// Mass of the continuum packet, `A^2 pi sigma^2`.
    pub fn mass(&self) -> f64 {
        self.amplitude * self.amplitude * std::f64::consts::PI * self.sigma * self.sigma
    }
}

/// Sample a Gaussian packet on the grid. Enforces `sigma <= L/8` so periodic
/// images stay negligible.
pub fn synthesize_gaussian(grid: Grid, params: &GaussianParams) -> Result<Field> {
    let limit = grid.length() / 8.0;
    if !params.sigma.is_finite() || params.sigma <= 0.0 || params.sigma > limit {
        return Err(Error::GaussianTooWide {
            sigma: params.sigma,
            limit,
        });
    }
    let (x0, y0) = params.center;
    let (vx, vy) = params.velocity;
    let inv_two_sigma_sq = 1.0 / (2.0 * params.sigma * params.sigma);
    let a = params.amplitude;
    Ok(Field::from_fn(grid, |x, y| {
        let r2 = (x - x0) * (x - x0) + (y - y0) * (y - y0);
        let envelope = a * (-r2 * inv_two_sigma_sq).exp();
        envelope * Complex64::new(0.0, vx * x + vy * y).exp()
    }))
}

/// splitmix64 step; the standard 64-bit finalizer-style stream.
#[inline]
pub(crate) fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Deterministic per-mode hash of `(seed, mx, my)` mapped to `[0, 1)`.
fn mode_unit(seed: u64, mx: i64, my: i64) -> f64 {
    let mut state = seed
        ^ (mx as u64).wrapping_mul(0xa24baed4963ee407)
        ^ (my as u64).wrapping_mul(0x9fb21c651e98df25);
    let bits = splitmix64(&mut state);
    (bits >> 11) as f64 / (1u64 << 53) as f64
}

/// Synthesize data on the edge of `H^s`: coefficients
/// `u_hat(xi) = A <xi>^-(s + 1.01) exp(i theta_xi)` with phases hashed from
/// the seed per mode. The decay keeps the field in `H^s` but in no
/// `H^(s+0.02)` uniformly as the grid is refined. The same seed reproduces
/// the same phases bit for bit, including across grid refinements.
pub fn synthesize_random_hs(grid: Grid, s: f64, seed: u64, amplitude: f64) -> Field {
    let n = grid.n();
    let decay = -(s + 1.01);
    let mut spec = Spectrum::zeros(grid);
    for iy in 0..n {
        for ix in 0..n {
            let (kx, ky) = grid.xi(ix, iy);
            let weight = (1.0 + kx * kx + ky * ky).powf(decay / 2.0);
            let theta = 2.0 * std::f64::consts::PI * mode_unit(seed, grid.mode(ix), grid.mode(iy));
            spec.coeffs_mut()[iy * n + ix] = amplitude * weight * Complex64::new(0.0, theta).exp();
        }
    }
    inverse(&spec)
}
