//! Radial kernel tables for the pair-interaction convolutions.
//!
//! Every 4D integral in the Morawetz machinery reduces to 2D convolutions
//! against tabulated radial kernels of the separation `w = x - y`. Tables are
//! immutable after construction and carry their spectra so each convolution
//! costs one forward and one inverse transform.
//!
//! The scalar kernels (Hessian components, `Delta a`, `f'' + f'/r`) have
//! integrable logarithmic singularities at `w = 0`; plain node sampling
//! integrates those poorly. They are therefore tabulated on a refined grid,
//! transformed there, and truncated back to the coarse lattice, with the
//! origin cell evaluated at the radius whose log equals the cell mean of
//! `log |w|`. The gradient kernel is bounded and is sampled directly, which
//! keeps it exactly odd under the wrapped negation.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{Field, Spectrum};
use crate::grid::Grid;
use crate::spectral::{convolve_spectra, inverse, transform, truncate_spectrum};

use super::weight::{weight_eval, WeightSpec};

/// Refinement factor for tabulating the singular scalar kernels.
const REFINE: usize = 4;
/// Mean of `ln |w|` over the unit square `[-1/2, 1/2]^2`; the origin cell is
/// evaluated at `exp` of this times the refined node spacing, which makes the
/// lattice sum of an `a + b ln r` kernel exact over that cell.
const LN_CELL_MEAN: f64 = -1.061_175_421_8;

pub struct KernelTable {
    grid: Grid,
    spec: WeightSpec,
    /// Physical tables on the computational lattice; the direct-sum oracles
    /// read these, so the fast and direct paths share one kernel convention.
    grad_x: Field,
    grad_y: Field,
    h11: Field,
    h12: Field,
    h22: Field,
    lap: Field,
    /// `Delta(Delta a) = 2 Delta_w (Delta a)`, formed spectrally from `lap`.
    bilap: Field,
    /// `f'' + f'/r`, the 2D radial Laplacian entering the nonlinear term.
    d_radial: Field,
    // spectra of the above, for fast convolution
    grad_x_hat: Spectrum,
    grad_y_hat: Spectrum,
    h11_hat: Spectrum,
    h12_hat: Spectrum,
    h22_hat: Spectrum,
    bilap_hat: Spectrum,
    d_hat: Spectrum,
    /// True when the origin cell required the effective-radius clamp
    /// (always, short of a degenerate weight).
    pub clamped: bool,
}

/// Tabulate `eval(wx, wy, r)` on the refined lattice and restrict its
/// spectrum to the coarse lattice. The coarse Nyquist row/column is zeroed:
/// it has no negation partner on the lattice, and dropping it keeps the
/// physical tables exactly even under the wrapped negation, which the
/// `x <-> y` symmetry reductions rely on.
fn refined_spectrum(
    coarse: Grid,
    spec: &WeightSpec,
    eval: impl Fn(&WeightSpec, f64, f64, f64) -> f64,
) -> Result<Spectrum> {
    let fine = Grid::new(coarse.n() * REFINE, coarse.length())?;
    let r_eff = fine.dx() * LN_CELL_MEAN.exp();
    let n = fine.n();
    let mut table = Field::zeros(fine);
    for iy in 0..n {
        for ix in 0..n {
            let (wx, wy) = fine.point(ix, iy);
            let r = (wx * wx + wy * wy).sqrt().max(r_eff);
            table.values_mut()[fine.idx(ix, iy)] = Complex64::new(eval(spec, wx, wy, r), 0.0);
        }
    }
    // drop the odd part under the wrapped negation: the seam lines
    // (w = -L/2) self-negate, where mixed components like H12 sample with an
    // ambiguous orientation sign
    for iy in 0..n {
        for ix in 0..n {
            let j = fine.idx(ix, iy);
            let k = fine.idx((n - ix) % n, (n - iy) % n);
            if j < k {
                let even = 0.5 * (table.values()[j] + table.values()[k]);
                table.values_mut()[j] = even;
                table.values_mut()[k] = even;
            }
        }
    }
    let mut spec_out = truncate_spectrum(&transform(&table), coarse);
    let nc = coarse.n();
    let nyq = -(nc as i64) / 2;
    for iy in 0..nc {
        for ix in 0..nc {
            if coarse.mode(ix) == nyq || coarse.mode(iy) == nyq {
                spec_out.coeffs_mut()[coarse.idx(ix, iy)] = Complex64::ZERO;
            }
        }
    }
    Ok(spec_out)
}

fn eval_h11(spec: &WeightSpec, wx: f64, wy: f64, r: f64) -> f64 {
    let (_, fp, fpp) = weight_eval(spec, r).expect("r > 0");
    if wx == 0.0 && wy == 0.0 {
        return 0.5 * (fpp + fp / r);
    }
    let rr = (wx * wx + wy * wy).sqrt().max(r);
    let (nx, ny) = (wx / rr, wy / rr);
    fpp * nx * nx + (fp / r) * ny * ny
}

fn eval_h22(spec: &WeightSpec, wx: f64, wy: f64, r: f64) -> f64 {
    eval_h11(spec, wy, wx, r)
}

fn eval_h12(spec: &WeightSpec, wx: f64, wy: f64, r: f64) -> f64 {
    if wx == 0.0 && wy == 0.0 {
        return 0.0;
    }
    let (_, fp, fpp) = weight_eval(spec, r).expect("r > 0");
    let rr = (wx * wx + wy * wy).sqrt().max(r);
    let (nx, ny) = (wx / rr, wy / rr);
    (fpp - fp / r) * nx * ny
}

fn eval_lap(spec: &WeightSpec, _wx: f64, _wy: f64, r: f64) -> f64 {
    let (_, fp, fpp) = weight_eval(spec, r).expect("r > 0");
    2.0 * (fpp + fp / r)
}

fn eval_d(spec: &WeightSpec, wx: f64, wy: f64, r: f64) -> f64 {
    0.5 * eval_lap(spec, wx, wy, r)
}

impl KernelTable {
    /// Tabulate all kernels for `spec` on `grid`. Requires `M <= L/4` so the
    /// interaction range is meaningful on the torus.
    pub fn new(grid: Grid, spec: &WeightSpec) -> Result<Self> {
        let limit = grid.length() / 4.0;
        if spec.m_scale() > limit {
            return Err(Error::InteractionScaleTooLarge {
                m_scale: spec.m_scale(),
                limit,
            });
        }
        let n = grid.n();
        let nyq_coord = -0.5 * grid.length();

        // gradient kernel K = f'(r) w/|w|; odd, so K(0) = 0 and the
        // self-negating Nyquist line of each component is zeroed
        let mut grad_x = Field::zeros(grid);
        let mut grad_y = Field::zeros(grid);
        for iy in 0..n {
            for ix in 0..n {
                let (wx, wy) = grid.point(ix, iy);
                let r = (wx * wx + wy * wy).sqrt();
                if r == 0.0 {
                    continue;
                }
                let (_, fp, _) = weight_eval(spec, r)?;
                let idx = grid.idx(ix, iy);
                if wx != nyq_coord {
                    grad_x.values_mut()[idx] = Complex64::new(fp * wx / r, 0.0);
                }
                if wy != nyq_coord {
                    grad_y.values_mut()[idx] = Complex64::new(fp * wy / r, 0.0);
                }
            }
        }

        let h11_hat = refined_spectrum(grid, spec, eval_h11)?;
        let h12_hat = refined_spectrum(grid, spec, eval_h12)?;
        let h22_hat = refined_spectrum(grid, spec, eval_h22)?;
        let lap_hat = refined_spectrum(grid, spec, eval_lap)?;
        let d_hat = refined_spectrum(grid, spec, eval_d)?;

        // Delta(Delta a) on the pair space is 2 Delta_w of the Delta-a table
        let mut bilap_hat = lap_hat.clone();
        bilap_hat.map_modes(|kx, ky, c| c * (-2.0 * (kx * kx + ky * ky)));

        Ok(KernelTable {
            grad_x_hat: transform(&grad_x),
            grad_y_hat: transform(&grad_y),
            h11: inverse(&h11_hat),
            h12: inverse(&h12_hat),
            h22: inverse(&h22_hat),
            lap: inverse(&lap_hat),
            bilap: inverse(&bilap_hat),
            d_radial: inverse(&d_hat),
            h11_hat,
            h12_hat,
            h22_hat,
            bilap_hat,
            d_hat,
            grid,
            spec: *spec,
            grad_x,
            grad_y,
            clamped: true,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn weight_spec(&self) -> &WeightSpec {
        &self.spec
    }

    /// Storage index of the wrapped separation between nodes `j` and `l`
    /// along one axis: `x_j - x_l` reduced into `[-L/2, L/2)` lands on node
    /// `(j - l + n/2) mod n`.
    #[inline]
    pub fn diff_index(&self, j: usize, l: usize) -> usize {
        let n = self.grid.n();
        (j + n - l + n / 2) % n
    }

    #[inline]
    pub fn grad_at(&self, ix: usize, iy: usize) -> (f64, f64) {
        let idx = self.grid.idx(ix, iy);
        (self.grad_x.values()[idx].re, self.grad_y.values()[idx].re)
    }

    #[inline]
    pub fn hessian_at(&self, ix: usize, iy: usize) -> (f64, f64, f64) {
        let idx = self.grid.idx(ix, iy);
        (
            self.h11.values()[idx].re,
            self.h12.values()[idx].re,
            self.h22.values()[idx].re,
        )
    }

    #[inline]
    pub fn lap_at(&self, ix: usize, iy: usize) -> f64 {
        self.lap.values()[self.grid.idx(ix, iy)].re
    }

    #[inline]
    pub fn bilap_at(&self, ix: usize, iy: usize) -> f64 {
        self.bilap.values()[self.grid.idx(ix, iy)].re
    }

    #[inline]
    pub fn d_at(&self, ix: usize, iy: usize) -> f64 {
        self.d_radial.values()[self.grid.idx(ix, iy)].re
    }

    pub(crate) fn conv_grad_x(&self, rhs: &Spectrum) -> Field {
        convolve_spectra(&self.grad_x_hat, rhs)
    }

    pub(crate) fn conv_grad_y(&self, rhs: &Spectrum) -> Field {
        convolve_spectra(&self.grad_y_hat, rhs)
    }

    pub(crate) fn conv_h11(&self, rhs: &Spectrum) -> Field {
        convolve_spectra(&self.h11_hat, rhs)
    }

    pub(crate) fn conv_h12(&self, rhs: &Spectrum) -> Field {
        convolve_spectra(&self.h12_hat, rhs)
    }

    pub(crate) fn conv_h22(&self, rhs: &Spectrum) -> Field {
        convolve_spectra(&self.h22_hat, rhs)
    }

    pub(crate) fn conv_bilap(&self, rhs: &Spectrum) -> Field {
        convolve_spectra(&self.bilap_hat, rhs)
    }

    pub(crate) fn conv_d(&self, rhs: &Spectrum) -> Field {
        convolve_spectra(&self.d_hat, rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_oversized_interaction_scale() {
        let grid = Grid::new(16, 8.0).unwrap();
        let spec = WeightSpec::new(3.0).unwrap(); // > L/4 = 2
        assert!(matches!(
            KernelTable::new(grid, &spec),
            Err(Error::InteractionScaleTooLarge { .. })
        ));
    }

    #[test]
    fn kernel_symmetries() {
        let grid = Grid::new(16, 8.0).unwrap();
        let spec = WeightSpec::new(1.5).unwrap();
        let table = KernelTable::new(grid, &spec).unwrap();
        assert!(table.clamped);
        let n = grid.n();
        // oddness of the gradient kernel under wrapped negation
        for iy in 0..n {
            for ix in 0..n {
                let (kx, ky) = table.grad_at(ix, iy);
                let nx = (n - ix) % n;
                let ny = (n - iy) % n;
                let (mx, my) = table.grad_at(nx, ny);
                assert!(
                    (kx + mx).abs() < 1e-12 && (ky + my).abs() < 1e-12,
                    "gradient kernel not odd at ({ix},{iy})"
                );
            }
        }
        // the odd kernel sums to zero exactly
        let sum_x: f64 = (0..n * n).map(|i| table.grad_x.values()[i].re).sum();
        assert!(sum_x.abs() < 1e-12);
        // Hessian tables are exactly even under the wrapped negation
        for iy in 0..n {
            for ix in 0..n {
                let (a, b, c) = table.hessian_at(ix, iy);
                let (a2, b2, c2) = table.hessian_at((n - ix) % n, (n - iy) % n);
                assert!(
                    (a - a2).abs() < 1e-11 && (b - b2).abs() < 1e-11 && (c - c2).abs() < 1e-11,
                    "hessian table not even at ({ix},{iy})"
                );
            }
        }
    }

    #[test]
    fn diff_index_matches_physical_difference() {
        let grid = Grid::new(8, 4.0).unwrap();
        let spec = WeightSpec::new(1.0).unwrap();
        let table = KernelTable::new(grid, &spec).unwrap();
        for j in 0..8 {
            for l in 0..8 {
                let m = table.diff_index(j, l);
                let diff = grid.coord(j) - grid.coord(l);
                let wrapped = {
                    let mut d = diff;
                    while d < -2.0 {
                        d += 4.0;
                    }
                    while d >= 2.0 {
                        d -= 4.0;
                    }
                    d
                };
                assert!(
                    (grid.coord(m) - wrapped).abs() < 1e-12,
                    "diff index mismatch j={j} l={l}"
                );
            }
        }
    }

    #[test]
    fn lap_kernel_pairing_matches_far_field_formula() {
        // pointwise the band-limited table rings around the radial formula,
        // but paired against a localized density it reproduces the continuum
        // integral: (lap * rho)(x) ~ mass(rho) * 200/|x| far from the support
        let grid = Grid::new(64, 16.0).unwrap();
        let spec = WeightSpec::new(1.0).unwrap();
        let table = KernelTable::new(grid, &spec).unwrap();
        let sigma: f64 = 0.4;
        let rho = crate::field::Field::from_fn(grid, |x, y| {
            num_complex::Complex64::new((-(x * x + y * y) / (2.0 * sigma * sigma)).exp(), 0.0)
        });
        let lap_field = Field::new(
            grid,
            (0..grid.num_points())
                .map(|i| num_complex::Complex64::new(table.lap_at(i % grid.n(), i / grid.n()), 0.0))
                .collect::<Vec<_>>(),
        );
        let conv = crate::spectral::convolve(&lap_field, &rho).unwrap();
        let mass = 2.0 * std::f64::consts::PI * sigma * sigma; // int rho
        let probe = grid.idx(grid.n() / 2 + 16, grid.n() / 2); // x = (4, 0)
        let got = conv.values()[probe].re;
        let expect = mass * 200.0 / 4.0;
        assert!(
            (got - expect).abs() < 2e-2 * expect,
            "pairing {got} vs {expect}"
        );
    }
}
