use crate::error::{Error, Result};

/// Periodic square computational domain `[-L/2, L/2)^2` sampled on `n x n`
/// equispaced nodes, together with its dual lattice of angular wavenumbers
/// `xi in (2*pi/L) * {-n/2, ..., n/2 - 1}^2`.
///
/// The lattice is closed under negation except for the Nyquist row/column
/// (mode index `-n/2`), which wraps onto itself.
///
/// `n` must be even and at least 8. Production grids are powers of two (the
/// transforms are fastest there); the small even sizes exist for the
/// direct-sum oracle battery.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    n: usize,
    length: f64,
}

impl Grid {
    /// Build a grid with `n` nodes per axis (even, `n >= 8`) on a box of
    /// side `length`.
    pub fn new(n: usize, length: f64) -> Result<Self> {
        if n < 8 || !n.is_multiple_of(2) {
            return Err(Error::InvalidGridSize(n));
        }
        if !length.is_finite() || length <= 0.0 {
            return Err(Error::InvalidBoxLength(length));
        }
        Ok(Grid { n, length })
    }

    /// Nodes per axis.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Box side length.
    pub fn length(&self) -> f64 {
        self.length
    }

    /// Node spacing `L/n`.
    pub fn dx(&self) -> f64 {
        self.length / self.n as f64
    }

    /// Total number of nodes `n^2`.
    pub fn num_points(&self) -> usize {
        self.n * self.n
    }

    /// Quadrature weight of one node, `dx^2`.
    pub fn cell_area(&self) -> f64 {
        let dx = self.dx();
        dx * dx
    }

    /// Box area `L^2`.
    pub fn area(&self) -> f64 {
        self.length * self.length
    }

    /// Frequency lattice spacing `2*pi/L`.
    pub fn freq_step(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.length
    }

    /// Largest lattice frequency magnitude along one axis, `(2*pi/L) * n/2`.
    pub fn nyquist(&self) -> f64 {
        self.freq_step() * (self.n as f64) / 2.0
    }

    /// Signed mode number for storage index `i in 0..n`:
    /// `i` for `i < n/2`, else `i - n`.
    #[inline]
    pub fn mode(&self, i: usize) -> i64 {
        if i < self.n / 2 {
            i as i64
        } else {
            i as i64 - self.n as i64
        }
    }

    /// Storage index for a signed mode number in `-n/2 .. n/2 - 1`.
    #[inline]
    pub fn index_of_mode(&self, m: i64) -> usize {
        let n = self.n as i64;
        debug_assert!(m >= -n / 2 && m < n / 2);
        if m >= 0 {
            m as usize
        } else {
            (m + n) as usize
        }
    }

    /// True if the signed mode lies on this grid's lattice.
    #[inline]
    pub fn mode_on_lattice(&self, m: i64) -> bool {
        let half = self.n as i64 / 2;
        (-half..half).contains(&m)
    }

    /// Angular frequency pair for storage indices `(ix, iy)`.
    #[inline]
    pub fn xi(&self, ix: usize, iy: usize) -> (f64, f64) {
        let k = self.freq_step();
        (self.mode(ix) as f64 * k, self.mode(iy) as f64 * k)
    }

    /// Physical coordinate of node index `j` along one axis: `-L/2 + j*dx`.
    #[inline]
    pub fn coord(&self, j: usize) -> f64 {
        -0.5 * self.length + j as f64 * self.dx()
    }

    /// Physical coordinates of node `(ix, iy)`.
    #[inline]
    pub fn point(&self, ix: usize, iy: usize) -> (f64, f64) {
        (self.coord(ix), self.coord(iy))
    }

    /// Storage index of node `(ix, iy)`; x varies fastest.
    #[inline]
    pub fn idx(&self, ix: usize, iy: usize) -> usize {
        iy * self.n + ix
    }

    /// Grid with the same box but `2n` nodes per axis (used for dealiasing).
    pub(crate) fn refined(&self) -> Grid {
        Grid {
            n: 2 * self.n,
            length: self.length,
        }
    }

    /// True if `other` is the same lattice.
    pub fn same_as(&self, other: &Grid) -> bool {
        self.n == other.n && self.length == other.length
    }

    pub(crate) fn ensure_same(&self, other: &Grid) -> Result<()> {
        if self.same_as(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch(
                self.n,
                self.length,
                other.n,
                other.length,
            ))
        }
    }
}
