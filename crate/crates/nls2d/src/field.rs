use num_complex::Complex64;

use crate::error::Result;
use crate::grid::Grid;

/// Complex scalar field sampled at the nodes of a [`Grid`].
///
/// Storage is row-major with x varying fastest: `values[iy * n + ix]`.
#[derive(Debug, Clone)]
pub struct Field {
    grid: Grid,
    values: Vec<Complex64>,
}

impl Field {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Self {
        assert_eq!(values.len(), grid.num_points(), "sample count must be n^2");
        Field { grid, values }
    }

    pub fn zeros(grid: Grid) -> Self {
        Field {
            grid,
            values: vec![Complex64::ZERO; grid.num_points()],
        }
    }

    pub fn constant(grid: Grid, c: Complex64) -> Self {
        Field {
            grid,
            values: vec![c; grid.num_points()],
        }
    }

    /// Sample `f(x, y)` at every node.
    pub fn from_fn(grid: Grid, mut f: impl FnMut(f64, f64) -> Complex64) -> Self {
        let n = grid.n();
        let mut values = Vec::with_capacity(grid.num_points());
        for iy in 0..n {
            let y = grid.coord(iy);
            for ix in 0..n {
                values.push(f(grid.coord(ix), y));
            }
        }
        Field { grid, values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    #[inline]
    pub fn at(&self, ix: usize, iy: usize) -> Complex64 {
        self.values[self.grid.idx(ix, iy)]
    }

    pub fn conj(&self) -> Field {
        Field {
            grid: self.grid,
            values: self.values.iter().map(|v| v.conj()).collect(),
        }
    }

    /// Largest sample magnitude.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.values
            .iter()
            .all(|v| v.re.is_finite() && v.im.is_finite())
    }

    /// Pointwise product with another field on the same grid.
    pub fn pointwise_mul(&self, other: &Field) -> Result<Field> {
        self.grid.ensure_same(&other.grid)?;
        Ok(Field {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a * b)
                .collect(),
        })
    }

    pub fn scaled(&self, c: Complex64) -> Field {
        Field {
            grid: self.grid,
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    pub fn sub(&self, other: &Field) -> Result<Field> {
        self.grid.ensure_same(&other.grid)?;
        Ok(Field {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    /// Real field `|u|^2`, stored with zero imaginary part.
    pub fn abs_squared(&self) -> Field {
        Field {
            grid: self.grid,
            values: self
                .values
                .iter()
                .map(|v| Complex64::new(v.norm_sqr(), 0.0))
                .collect(),
        }
    }
}

/// Fourier coefficients `u_hat(xi)` of a [`Field`], indexed by the frequency
/// lattice of the same grid (storage index `iy * n + ix` with the DFT mode
/// ordering of [`Grid::mode`]).
///
/// Convention: `u_hat(xi) = dx^2 * sum_x u(x) exp(-i xi . x)` so coefficients
/// approximate the continuum transform over the box directly.
#[derive(Debug, Clone)]
pub struct Spectrum {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

impl Spectrum {
    pub fn new(grid: Grid, coeffs: Vec<Complex64>) -> Self {
        assert_eq!(coeffs.len(), grid.num_points());
        Spectrum { grid, coeffs }
    }

    pub fn zeros(grid: Grid) -> Self {
        Spectrum {
            grid,
            coeffs: vec![Complex64::ZERO; grid.num_points()],
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Coefficient at signed mode numbers `(mx, my)`.
    pub fn at_mode(&self, mx: i64, my: i64) -> Complex64 {
        let ix = self.grid.index_of_mode(mx);
        let iy = self.grid.index_of_mode(my);
        self.coeffs[self.grid.idx(ix, iy)]
    }

    /// Apply `f(xi_x, xi_y, coeff)` to every coefficient in place.
    pub fn map_modes(&mut self, mut f: impl FnMut(f64, f64, Complex64) -> Complex64) {
        let n = self.grid.n();
        for iy in 0..n {
            for ix in 0..n {
                let (kx, ky) = self.grid.xi(ix, iy);
                let idx = iy * n + ix;
                self.coeffs[idx] = f(kx, ky, self.coeffs[idx]);
            }
        }
    }
}
