//! Transforms, Fourier multipliers, spectral derivatives, periodic
//! convolution, and dealiased products.
//!
//! The transform pair is fixed as
//!
//! ```text
//! u_hat(xi) = dx^2 * sum_x u(x) exp(-i xi . x)
//! u(x)      = (1/L^2) * sum_xi u_hat(xi) exp(+i xi . x)
//! ```
//!
//! so that coefficients approximate continuum integrals over the box. The
//! node offset `x_0 = -L/2` turns into the parity factor `(-1)^(ix+iy)`
//! relating these sums to the plain DFT.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::{dft2_forward, dft2_inverse};
use crate::field::{Field, Spectrum};
use crate::grid::Grid;

#[inline]
fn parity_sign(ix: usize, iy: usize) -> f64 {
    if (ix + iy).is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

fn apply_parity(data: &mut [Complex64], n: usize) {
    for iy in 0..n {
        for ix in 0..n {
            data[iy * n + ix] *= parity_sign(ix, iy);
        }
    }
}

/// Forward transform of a field to its spectrum.
pub fn transform(field: &Field) -> Spectrum {
    let grid = *field.grid();
    let n = grid.n();
    let mut buf = field.values().to_vec();
    dft2_forward(&mut buf, n);
    let w = grid.cell_area();
    apply_parity(&mut buf, n);
    for v in buf.iter_mut() {
        *v *= w;
    }
    Spectrum::new(grid, buf)
}

/// Inverse transform of a spectrum back to a field.
pub fn inverse(spectrum: &Spectrum) -> Field {
    let grid = *spectrum.grid();
    let n = grid.n();
    let mut buf = spectrum.coeffs().to_vec();
    apply_parity(&mut buf, n);
    dft2_inverse(&mut buf, n);
    let scale = 1.0 / grid.area();
    for v in buf.iter_mut() {
        *v *= scale;
    }
    Field::new(grid, buf)
}

/// Apply the Fourier multiplier `mult(xi)` to a field, checking the symbol is
/// finite on the lattice.
pub fn apply_multiplier(
    field: &Field,
    mut mult: impl FnMut(f64, f64) -> Complex64,
) -> Result<Field> {
    let mut spec = transform(field);
    let grid = *spec.grid();
    let n = grid.n();
    let coeffs = spec.coeffs_mut();
    for iy in 0..n {
        for ix in 0..n {
            let (kx, ky) = grid.xi(ix, iy);
            let m = mult(kx, ky);
            if !m.re.is_finite() || !m.im.is_finite() {
                return Err(Error::NonFiniteMultiplier(kx, ky));
            }
            coeffs[iy * n + ix] *= m;
        }
    }
    Ok(inverse(&spec))
}

/// Infallible multiplier application for symbols known to be finite.
pub(crate) fn apply_multiplier_unchecked(
    field: &Field,
    mut mult: impl FnMut(f64, f64) -> Complex64,
) -> Field {
    let mut spec = transform(field);
    spec.map_modes(|kx, ky, c| c * mult(kx, ky));
    inverse(&spec)
}

/// Spectral gradient `(du/dx, du/dy)`. The Nyquist mode of each odd symbol
/// `i xi_j` is zeroed, which keeps derivatives of real fields real.
pub fn gradient(field: &Field) -> (Field, Field) {
    let spec = transform(field);
    let grid = *spec.grid();
    let nyq = -(grid.n() as i64) / 2;
    let kstep = grid.freq_step();
    let nyq_val = nyq as f64 * kstep;
    let mut sx = spec.clone();
    sx.map_modes(|kx, _, c| {
        if kx == nyq_val {
            Complex64::ZERO
        } else {
            c * Complex64::new(0.0, kx)
        }
    });
    let mut sy = spec;
    sy.map_modes(|_, ky, c| {
        if ky == nyq_val {
            Complex64::ZERO
        } else {
            c * Complex64::new(0.0, ky)
        }
    });
    (inverse(&sx), inverse(&sy))
}

/// Spectral Laplacian, symbol `-|xi|^2` (even; Nyquist kept).
pub fn laplacian(field: &Field) -> Field {
    apply_multiplier_unchecked(field, |kx, ky| Complex64::new(-(kx * kx + ky * ky), 0.0))
}

/// Periodic convolution `(a * b)(x) = dx^2 sum_y a(x - y) b(y)`, computed
/// spectrally via the product of the two spectra.
pub fn convolve(a: &Field, b: &Field) -> Result<Field> {
    a.grid().ensure_same(b.grid())?;
    let sa = transform(a);
    let sb = transform(b);
    Ok(convolve_spectra(&sa, &sb))
}

pub(crate) fn convolve_spectra(a: &Spectrum, b: &Spectrum) -> Field {
    debug_assert!(a.grid().same_as(b.grid()));
    let grid = *a.grid();
    let coeffs: Vec<Complex64> = a
        .coeffs()
        .iter()
        .zip(b.coeffs())
        .map(|(x, y)| x * y)
        .collect();
    inverse(&Spectrum::new(grid, coeffs))
}

/// Embed a spectrum into the `2n` lattice of the refined grid. The Nyquist
/// row/column of the coarse lattice is dropped: its sign is ambiguous, and
/// removing it is what makes cubic products exact after truncation.
fn pad_spectrum(spec: &Spectrum) -> Spectrum {
    let coarse = *spec.grid();
    let fine = coarse.refined();
    let n = coarse.n();
    let half = n as i64 / 2;
    let mut out = Spectrum::zeros(fine);
    for iy in 0..n {
        let my = coarse.mode(iy);
        if my == -half {
            continue;
        }
        for ix in 0..n {
            let mx = coarse.mode(ix);
            if mx == -half {
                continue;
            }
            let c = spec.coeffs()[iy * n + ix];
            let fx = fine.index_of_mode(mx);
            let fy = fine.index_of_mode(my);
            let idx = fine.idx(fx, fy);
            out.coeffs_mut()[idx] = c;
        }
    }
    out
}

/// Restrict a fine-grid spectrum to the coarse lattice.
pub(crate) fn truncate_spectrum(spec: &Spectrum, coarse: Grid) -> Spectrum {
    let fine = *spec.grid();
    let n = coarse.n();
    let mut out = Spectrum::zeros(coarse);
    for iy in 0..n {
        let my = coarse.mode(iy);
        for ix in 0..n {
            let mx = coarse.mode(ix);
            let fidx = fine.idx(fine.index_of_mode(mx), fine.index_of_mode(my));
            let cidx = coarse.idx(ix, iy);
            out.coeffs_mut()[cidx] = spec.coeffs()[fidx];
        }
    }
    out
}

/// Resample a field onto the refined `2n` grid by spectral padding.
pub(crate) fn pad_to_refined(field: &Field) -> Field {
    inverse(&pad_spectrum(&transform(field)))
}

/// Pointwise product of up to three fields, dealiased by zero padding to
/// `2n` per axis. Exact for cubic products of band-limited factors.
pub fn dealias_pad_product(factors: &[&Field]) -> Result<Field> {
    if factors.is_empty() || factors.len() > 3 {
        return Err(Error::UnsupportedProductDegree(factors.len()));
    }
    let grid = *factors[0].grid();
    for f in &factors[1..] {
        grid.ensure_same(f.grid())?;
    }
    let fine_factors: Vec<Field> = factors
        .iter()
        .map(|f| inverse(&pad_spectrum(&transform(f))))
        .collect();
    let mut prod = fine_factors[0].clone();
    for f in &fine_factors[1..] {
        prod = prod.pointwise_mul(f)?;
    }
    let fine_spec = transform(&prod);
    Ok(inverse(&truncate_spectrum(&fine_spec, grid)))
}

/// Dealiased cubic nonlinearity `|u|^2 u`, padded once rather than per factor.
pub(crate) fn cubic_term(u: &Field) -> Field {
    let grid = *u.grid();
    let fine = inverse(&pad_spectrum(&transform(u)));
    let cubed = Field::new(
        *fine.grid(),
        fine.values()
            .iter()
            .map(|v| v * v.norm_sqr())
            .collect::<Vec<_>>(),
    );
    inverse(&truncate_spectrum(&transform(&cubed), grid))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::{l2_norm, lp_norm};
    use approx::assert_relative_eq;
    use num_complex::Complex64;

    fn plane_wave(grid: Grid, mx: i64, my: i64) -> Field {
        let k = grid.freq_step();
        let (kx, ky) = (mx as f64 * k, my as f64 * k);
        Field::from_fn(grid, |x, y| Complex64::new(0.0, kx * x + ky * y).exp())
    }

    fn pseudo_random_field(grid: Grid, seed: u64) -> Field {
        // cheap deterministic filler, independent of the synth module
        let mut state = seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(1);
        let mut next = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let vals: Vec<Complex64> = (0..grid.num_points())
            .map(|_| Complex64::new(next(), next()))
            .collect();
        Field::new(grid, vals)
    }

    #[test]
    fn constant_field_concentrates_at_zero_mode() {
        let grid = Grid::new(16, 5.0).unwrap();
        let c = Complex64::new(1.3, -0.4);
        let spec = transform(&Field::constant(grid, c));
        let expect = c * grid.area();
        assert_relative_eq!(spec.at_mode(0, 0).re, expect.re, max_relative = 1e-12);
        assert_relative_eq!(spec.at_mode(0, 0).im, expect.im, max_relative = 1e-12);
        for iy in 0..16 {
            for ix in 0..16 {
                if (ix, iy) != (0, 0) {
                    assert!(spec.coeffs()[iy * 16 + ix].norm() < 1e-12 * expect.norm());
                }
            }
        }
    }

    #[test]
    fn plane_wave_is_a_single_coefficient() {
        let grid = Grid::new(32, 7.0).unwrap();
        let spec = transform(&plane_wave(grid, 3, -5));
        let expect = grid.area();
        assert_relative_eq!(spec.at_mode(3, -5).re, expect, max_relative = 1e-12);
        assert!(spec.at_mode(3, -5).im.abs() < 1e-12 * expect);
        let total: f64 = spec.coeffs().iter().map(|c| c.norm()).sum();
        assert_relative_eq!(total, expect, max_relative = 1e-10);
    }

    #[test]
    fn round_trip_is_identity() {
        let grid = Grid::new(32, 3.0).unwrap();
        let u = pseudo_random_field(grid, 42);
        let back = inverse(&transform(&u));
        let err: f64 = u
            .values()
            .iter()
            .zip(back.values())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(err <= 1e-12 * u.max_abs(), "round trip error {err}");
    }

    #[test]
    fn parseval_identity() {
        let grid = Grid::new(64, 11.0).unwrap();
        let u = pseudo_random_field(grid, 7);
        let phys = l2_norm(&u).powi(2);
        let spec = transform(&u);
        let spectral: f64 = spec.coeffs().iter().map(|c| c.norm_sqr()).sum::<f64>() / grid.area();
        assert_relative_eq!(phys, spectral, max_relative = 1e-12);
    }

    #[test]
    fn identity_multiplier_returns_input() {
        let grid = Grid::new(16, 2.0).unwrap();
        let u = pseudo_random_field(grid, 3);
        let v = apply_multiplier(&u, |_, _| Complex64::ONE).unwrap();
        let err: f64 = u
            .values()
            .iter()
            .zip(v.values())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(err <= 1e-12 * u.max_abs());
    }

    #[test]
    fn derivative_symbol_on_plane_wave() {
        let grid = Grid::new(32, 2.0 * std::f64::consts::PI).unwrap();
        let u = plane_wave(grid, 4, 0);
        let v = apply_multiplier(&u, |kx, _| Complex64::new(0.0, kx)).unwrap();
        for (a, b) in u.values().iter().zip(v.values()) {
            let expect = Complex64::new(0.0, 4.0) * a;
            assert!((expect - b).norm() < 1e-11);
        }
    }

    #[test]
    fn free_propagator_phase_rotates_plane_wave() {
        let grid = Grid::new(16, 2.0 * std::f64::consts::PI).unwrap();
        let u = plane_wave(grid, 2, 1);
        let t = 0.37;
        let v = apply_multiplier(&u, |kx, ky| {
            (-Complex64::i() * (kx * kx + ky * ky) * t).exp()
        })
        .unwrap();
        let k2 = 5.0;
        let phase = (-Complex64::i() * k2 * t).exp();
        for (a, b) in u.values().iter().zip(v.values()) {
            assert!((a * phase - b).norm() < 1e-12);
        }
    }

    #[test]
    fn non_finite_multiplier_is_reported() {
        let grid = Grid::new(8, 1.0).unwrap();
        let u = Field::constant(grid, Complex64::ONE);
        let err = apply_multiplier(&u, |kx, _| Complex64::new(1.0 / kx, 0.0)).unwrap_err();
        assert!(matches!(err, Error::NonFiniteMultiplier(kx, _) if kx == 0.0));
    }

    #[test]
    fn gradient_and_laplacian_of_plane_wave() {
        let grid = Grid::new(32, 4.0).unwrap();
        let k = grid.freq_step();
        let u = plane_wave(grid, 3, -2);
        let (ux, uy) = gradient(&u);
        let lap = laplacian(&u);
        let (kx, ky) = (3.0 * k, -2.0 * k);
        for i in 0..grid.num_points() {
            let v = u.values()[i];
            assert!((ux.values()[i] - Complex64::new(0.0, kx) * v).norm() < 1e-10);
            assert!((uy.values()[i] - Complex64::new(0.0, ky) * v).norm() < 1e-10);
            assert!((lap.values()[i] + (kx * kx + ky * ky) * v).norm() < 1e-9);
        }
    }

    #[test]
    fn gradient_of_constant_vanishes() {
        let grid = Grid::new(16, 3.0).unwrap();
        let (ux, uy) = gradient(&Field::constant(grid, Complex64::new(2.0, 1.0)));
        assert!(ux.max_abs() < 1e-13);
        assert!(uy.max_abs() < 1e-13);
    }

    #[test]
    fn integration_by_parts_on_gaussian() {
        // int u * lap(u) dx = -int |grad u|^2 dx for a real field
        let grid = Grid::new(64, 20.0).unwrap();
        let u = Field::from_fn(grid, |x, y| {
            Complex64::new((-(x * x + y * y) / 2.0).exp(), 0.0)
        });
        let lap = laplacian(&u);
        let (ux, uy) = gradient(&u);
        let w = grid.cell_area();
        let lhs: f64 = u
            .values()
            .iter()
            .zip(lap.values())
            .map(|(a, b)| (a * b).re)
            .sum::<f64>()
            * w;
        let rhs: f64 = ux
            .values()
            .iter()
            .zip(uy.values())
            .map(|(a, b)| a.norm_sqr() + b.norm_sqr())
            .sum::<f64>()
            * w;
        assert_relative_eq!(lhs, -rhs, max_relative = 1e-10);
    }

    #[test]
    fn convolve_with_discrete_delta_shifts() {
        let grid = Grid::new(16, 4.0).unwrap();
        let a = pseudo_random_field(grid, 9);
        // delta at node (5, 2) with weight 1/dx^2
        let mut delta = Field::zeros(grid);
        let idx = grid.idx(5, 2);
        delta.values_mut()[idx] = Complex64::new(1.0 / grid.cell_area(), 0.0);
        let shifted = convolve(&a, &delta).unwrap();
        // (a * delta)(x) = a(x - y0); node x = j maps to node j - (5,2) + n/2... via
        // physical difference: compare against direct lookup.
        let n = grid.n();
        let mut max_err = 0.0f64;
        for iy in 0..n {
            for ix in 0..n {
                // x - y0 = (-L/2 + ix dx) - (-L/2 + 5 dx) = (ix - 5) dx; as a node of
                // the lattice this is index (ix - 5 + n/2) mod n on each axis.
                let sx = (ix + n - 5 + n / 2) % n;
                let sy = (iy + n - 2 + n / 2) % n;
                let expect = a.values()[grid.idx(sx, sy)];
                let got = shifted.values()[grid.idx(ix, iy)];
                max_err = max_err.max((expect - got).norm());
            }
        }
        assert!(max_err < 1e-11 * a.max_abs(), "delta shift error {max_err}");
    }

    #[test]
    fn odd_kernel_annihilates_constants() {
        let grid = Grid::new(16, 4.0).unwrap();
        // odd kernel: a(-w) = -a(w); zero the self-negating Nyquist row/column
        let n = grid.n();
        let a = Field::from_fn(grid, |x, y| {
            if x == -grid.length() / 2.0 || y == -grid.length() / 2.0 {
                Complex64::ZERO
            } else {
                Complex64::new(x * (y * y + 1.0), 0.0)
            }
        });
        let b = Field::constant(grid, Complex64::new(0.7, 0.0));
        let c = convolve(&a, &b).unwrap();
        let scale = a.max_abs() * 0.7 * grid.area();
        assert!(
            c.max_abs() <= 1e-12 * scale,
            "odd kernel leak {}",
            c.max_abs()
        );
        let _ = n;
    }

    #[test]
    fn convolution_is_symmetric() {
        let grid = Grid::new(16, 2.0).unwrap();
        let a = pseudo_random_field(grid, 1);
        let b = pseudo_random_field(grid, 2);
        let ab = convolve(&a, &b).unwrap();
        let ba = convolve(&b, &a).unwrap();
        let scale = ab.max_abs();
        for (x, y) in ab.values().iter().zip(ba.values()) {
            assert!((x - y).norm() <= 1e-12 * scale);
        }
    }

    #[test]
    fn multiplier_composition() {
        let grid = Grid::new(16, 3.0).unwrap();
        let u = pseudo_random_field(grid, 5);
        let m1 = |kx: f64, ky: f64| Complex64::new((1.0 + kx * kx + ky * ky).powf(-0.3), 0.0);
        let m2 = |kx: f64, _: f64| Complex64::new(0.0, kx).exp();
        let seq = apply_multiplier(&apply_multiplier(&u, m1).unwrap(), m2).unwrap();
        let combined = apply_multiplier(&u, |kx, ky| m1(kx, ky) * m2(kx, ky)).unwrap();
        let scale = combined.max_abs();
        for (a, b) in seq.values().iter().zip(combined.values()) {
            assert!((a - b).norm() <= 1e-12 * scale);
        }
    }

    #[test]
    fn dealiased_plane_wave_product_is_exact() {
        let grid = Grid::new(32, 2.0 * std::f64::consts::PI).unwrap();
        let u1 = plane_wave(grid, 5, 0);
        let u2 = plane_wave(grid, -3, 2).conj(); // e^{-i k2 x}
        let u3 = plane_wave(grid, 6, 1);
        let prod = dealias_pad_product(&[&u1, &u2, &u3]).unwrap();
        // frequencies add: (5,0) + (3,-2) + (6,1) = (14,-1), on-lattice for n=32
        let expect = plane_wave(grid, 14, -1);
        for (a, b) in prod.values().iter().zip(expect.values()) {
            assert!((a - b).norm() < 1e-11);
        }
    }

    #[test]
    fn dealiased_product_with_zero_factor_is_zero() {
        let grid = Grid::new(16, 1.0).unwrap();
        let u = pseudo_random_field(grid, 11);
        let z = Field::zeros(grid);
        let prod = dealias_pad_product(&[&u, &u, &z]).unwrap();
        assert_eq!(prod.max_abs(), 0.0);
    }

    #[test]
    fn product_degree_guard() {
        let grid = Grid::new(8, 1.0).unwrap();
        let u = Field::zeros(grid);
        assert!(matches!(
            dealias_pad_product(&[&u, &u, &u, &u]),
            Err(Error::UnsupportedProductDegree(4))
        ));
        assert!(matches!(
            dealias_pad_product(&[]),
            Err(Error::UnsupportedProductDegree(0))
        ));
    }

    #[test]
    fn cubic_term_matches_generic_product() {
        let grid = Grid::new(16, 2.0).unwrap();
        let u = pseudo_random_field(grid, 21);
        let a = cubic_term(&u);
        let b = dealias_pad_product(&[&u, &u.conj(), &u]).unwrap();
        let scale = a.max_abs();
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((x - y).norm() <= 1e-12 * scale);
        }
    }

    #[test]
    fn sobolev_zero_equals_l2() {
        let grid = Grid::new(32, 5.0).unwrap();
        let u = pseudo_random_field(grid, 13);
        let a = crate::norms::sobolev_norm(&u, 0.0);
        let b = lp_norm(&u, 2).unwrap();
        assert_relative_eq!(a, b, max_relative = 1e-12);
    }
}
