//! Lebesgue and Sobolev norms by quadrature and spectral weighting.

use crate::error::{Error, Result};
use crate::field::Field;
use crate::spectral::transform;

/// `L^p` norm by node quadrature, `(dx^2 sum |u|^p)^(1/p)`, for `p in {2, 4}`.
pub fn lp_norm(field: &Field, p: u32) -> Result<f64> {
    match p {
        2 => Ok(l2_norm(field)),
        4 => Ok(l4_norm(field)),
        other => Err(Error::UnsupportedExponent(other)),
    }
}

pub(crate) fn l2_norm(field: &Field) -> f64 {
    l2_norm_sq(field).sqrt()
}

pub(crate) fn l2_norm_sq(field: &Field) -> f64 {
    field.values().iter().map(|v| v.norm_sqr()).sum::<f64>() * field.grid().cell_area()
}

pub(crate) fn l4_norm(field: &Field) -> f64 {
    l4_norm_quartic(field).powf(0.25)
}

/// `int |u|^4 dx` by quadrature.
pub(crate) fn l4_norm_quartic(field: &Field) -> f64 {
    field
        .values()
        .iter()
        .map(|v| {
            let s = v.norm_sqr();
            s * s
        })
        .sum::<f64>()
        * field.grid().cell_area()
}

/// `L^r` norm for arbitrary real `r >= 1`; used internally by the mixed-norm
/// diagnostics that need r in {2, 3, 4, 6}.
pub(crate) fn lr_norm(field: &Field, r: f64) -> f64 {
    let sum: f64 =
        field.values().iter().map(|v| v.norm().powf(r)).sum::<f64>() * field.grid().cell_area();
    sum.powf(1.0 / r)
}

/// Inhomogeneous Sobolev norm `(1/L^2 sum <xi>^(2s) |u_hat|^2)^(1/2)` with
/// `<xi> = (1 + |xi|^2)^(1/2)`.
pub fn sobolev_norm(field: &Field, s: f64) -> f64 {
    let spec = transform(field);
    let grid = *spec.grid();
    let n = grid.n();
    let mut acc = 0.0;
    for iy in 0..n {
        for ix in 0..n {
            let (kx, ky) = grid.xi(ix, iy);
            let weight = (1.0 + kx * kx + ky * ky).powf(s);
            acc += weight * spec.coeffs()[iy * n + ix].norm_sqr();
        }
    }
    (acc / grid.area()).sqrt()
}

/// Homogeneous Sobolev norm `(1/L^2 sum |xi|^(2s) |u_hat|^2)^(1/2)`; the
/// `xi = 0` term is dropped.
pub fn homogeneous_sobolev_norm(field: &Field, s: f64) -> f64 {
    let spec = transform(field);
    let grid = *spec.grid();
    let n = grid.n();
    let mut acc = 0.0;
    for iy in 0..n {
        for ix in 0..n {
            let (kx, ky) = grid.xi(ix, iy);
            let k2 = kx * kx + ky * ky;
            if k2 == 0.0 {
                continue;
            }
            acc += k2.powf(s) * spec.coeffs()[iy * n + ix].norm_sqr();
        }
    }
    (acc / grid.area()).sqrt()
}
