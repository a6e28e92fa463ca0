//! Brute-force validators for the fast convolution paths: literal double-grid
//! sums, a direct spectral triple convolution, and finite-difference energy
//! derivatives. Hard size guards keep the O(n^4) cost impossible to trigger
//! accidentally.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Field, Spectrum};
use crate::imethod::{apply_i, commutator_field, IMultiplierSpec};
use crate::morawetz::{momentum_density, KernelTable, WeightSpec};
use crate::solver::Trajectory;
use crate::spectral::{cubic_term, gradient, laplacian, transform};

/// Size guard for the double-sum action oracle and the cubic spectrum oracle.
pub const MAX_ORACLE_N: usize = 16;
/// Tighter guard for the Hessian-term oracle (nine kernel weights per pair).
pub const MAX_HESSIAN_ORACLE_N: usize = 12;

/// One fast-vs-direct comparison.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OracleReport {
    pub quantity: String,
    pub fast: f64,
    pub direct: f64,
    pub rel_err: f64,
    pub grid_n: usize,
}

impl OracleReport {
    pub fn new(quantity: &str, fast: f64, direct: f64, grid_n: usize) -> Self {
        let rel_err = (fast - direct).abs() / direct.abs().max(1e-300);
        OracleReport {
            quantity: quantity.to_string(),
            fast,
            direct,
            rel_err,
            grid_n,
        }
    }
}

fn guard(n: usize, max_n: usize) -> Result<()> {
    if n > max_n {
        Err(Error::OracleSizeGuard { n, max_n })
    } else {
        Ok(())
    }
}

/// Literal evaluation of the Morawetz action as an O(n^4) double sum over
/// node pairs, sharing the kernel tabulation with the fast path.
pub fn direct_morawetz_action(u: &Field, spec: &WeightSpec) -> Result<f64> {
    let grid = *u.grid();
    let n = grid.n();
    guard(n, MAX_ORACLE_N)?;
    let table = KernelTable::new(grid, spec)?;
    let (px, py) = momentum_density(u);
    let rho = u.abs_squared();
    let w2 = grid.cell_area() * grid.cell_area();
    let mut acc = 0.0;
    for jy in 0..n {
        for jx in 0..n {
            let p = (
                px.values()[grid.idx(jx, jy)].re,
                py.values()[grid.idx(jx, jy)].re,
            );
            let rho_x = rho.values()[grid.idx(jx, jy)].re;
            for ly in 0..n {
                for lx in 0..n {
                    let wx = table.diff_index(jx, lx);
                    let wy = table.diff_index(jy, ly);
                    let (kx, ky) = table.grad_at(wx, wy);
                    let rho_y = rho.values()[grid.idx(lx, ly)].re;
                    let q = (
                        px.values()[grid.idx(lx, ly)].re,
                        py.values()[grid.idx(lx, ly)].re,
                    );
                    // 2 [ K(w).p(x) |u(y)|^2 - K(w).p(y) |u(x)|^2 ]
                    acc += 2.0 * ((kx * p.0 + ky * p.1) * rho_y - (kx * q.0 + ky * q.1) * rho_x);
                }
            }
        }
    }
    Ok(acc * w2)
}

/// Literal evaluation of the Hessian derivative term,
/// `8 sum_jk int int Re(d_j v_bar d_k v) d_j d_k a`, as a double sum with the
/// same kernel tabulation and overall normalization as the fast path.
pub fn direct_hessian_term(u: &Field, spec: &WeightSpec) -> Result<f64> {
    let grid = *u.grid();
    let n = grid.n();
    guard(n, MAX_HESSIAN_ORACLE_N)?;
    let table = KernelTable::new(grid, spec)?;
    let (ux, uy) = gradient(u);
    let w2 = grid.cell_area() * grid.cell_area();

    let mut acc = 0.0;
    for jy in 0..n {
        for jx in 0..n {
            let i1 = grid.idx(jx, jy);
            let u1 = u.values()[i1];
            let g1 = (u1.conj() * ux.values()[i1], u1.conj() * uy.values()[i1]);
            let r1 = (
                ux.values()[i1].norm_sqr(),
                (ux.values()[i1].conj() * uy.values()[i1]).re,
                uy.values()[i1].norm_sqr(),
            );
            let rho1 = u1.norm_sqr();
            for ly in 0..n {
                for lx in 0..n {
                    let i2 = grid.idx(lx, ly);
                    let u2 = u.values()[i2];
                    let g2 = (u2.conj() * ux.values()[i2], u2.conj() * uy.values()[i2]);
                    let r2 = (
                        ux.values()[i2].norm_sqr(),
                        (ux.values()[i2].conj() * uy.values()[i2]).re,
                        uy.values()[i2].norm_sqr(),
                    );
                    let rho2 = u2.norm_sqr();
                    let (h11, h12, h22) =
                        table.hessian_at(table.diff_index(jx, lx), table.diff_index(jy, ly));
                    // same-point blocks (x,x) and (y,y)
                    let same = h11 * (r1.0 * rho2 + rho1 * r2.0)
                        + 2.0 * h12 * (r1.1 * rho2 + rho1 * r2.1)
                        + h22 * (r1.2 * rho2 + rho1 * r2.2);
                    // cross blocks carry -H against Re(G_bar_j(x) G_k(y)), twice
                    let cross = h11 * (g1.0.conj() * g2.0).re
                        + h12 * ((g1.0.conj() * g2.1).re + (g1.1.conj() * g2.0).re)
                        + h22 * (g1.1.conj() * g2.1).re;
                    acc += 4.0 * (same - 2.0 * cross);
                }
            }
        }
    }
    Ok(acc * w2)
}

/// Direct triple convolution of `u_hat`, conj-flipped `u_hat`, `u_hat`: the
/// spectrum of `|u|^2 u` restricted to exact on-lattice frequency sums.
/// Nyquist modes of the input are dropped, matching the dealiased fast path.
pub fn direct_cubic_spectrum(u: &Field) -> Result<Spectrum> {
    let grid = *u.grid();
    let n = grid.n();
    guard(n, MAX_ORACLE_N)?;
    let spec = transform(u);
    let half = n as i64 / 2;
    // gather non-Nyquist modes once
    let mut modes: Vec<(i64, i64, Complex64)> = Vec::new();
    for iy in 0..n {
        let my = grid.mode(iy);
        if my == -half {
            continue;
        }
        for ix in 0..n {
            let mx = grid.mode(ix);
            if mx == -half {
                continue;
            }
            let c = spec.coeffs()[grid.idx(ix, iy)];
            if c.norm_sqr() > 0.0 {
                modes.push((mx, my, c));
            }
        }
    }
    let inv_area_sq = 1.0 / (grid.area() * grid.area());
    let mut out = Spectrum::zeros(grid);
    for &(ax, ay, ca) in &modes {
        for &(bx, by, cb) in &modes {
            // conj-flip: F[u_bar](xi2) = conj(u_hat(-xi2)); sum runs over the
            // support of u_hat at (bx, by), contributing at xi2 = (-bx, -by)
            let w = cb.conj();
            for &(cx, cy, cc) in &modes {
                let sx = ax - bx + cx;
                let sy = ay - by + cy;
                if grid.mode_on_lattice(sx) && grid.mode_on_lattice(sy) {
                    let idx = grid.idx(grid.index_of_mode(sx), grid.index_of_mode(sy));
                    out.coeffs_mut()[idx] += ca * w * cc * inv_area_sq;
                }
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FdEnergyReport {
    /// `max |FD(E(Iu)) - RHS| / scale` with `scale = max(|FD|, |RHS|)`.
    pub max_residual: f64,
    pub max_lhs: f64,
    pub max_rhs: f64,
    pub samples: usize,
}

/// Certify that the measured modified-energy increments are the commutator's
/// doing: compare centered differences of `E(Iu)` against
/// `-Re int (Iu_t) conj(I(|u|^2 u) - |Iu|^2 Iu) dx` with `Iu_t` taken from
/// the equation, `Iu_t = i (Delta Iu - I(|u|^2 u))`.
pub fn fd_energy_derivative(traj: &Trajectory, ispec: &IMultiplierSpec) -> Result<FdEnergyReport> {
    if traj.snapshots.len() < 3 {
        return Err(Error::TooFewSamples {
            need: 3,
            got: traj.snapshots.len(),
        });
    }
    let grid = *traj.snapshots[0].grid();
    let energies: Vec<f64> = traj
        .snapshots
        .iter()
        .map(|u| crate::solver::energy_dealiased(&apply_i(u, ispec)))
        .collect();
    let mut max_lhs = 0.0f64;
    let mut max_rhs = 0.0f64;
    let mut pairs = Vec::new();
    for i in 1..traj.len() - 1 {
        let lhs = (energies[i + 1] - energies[i - 1]) / (traj.times[i + 1] - traj.times[i - 1]);
        let u = &traj.snapshots[i];
        let iu = apply_i(u, ispec);
        let icubic = apply_i(&cubic_term(u), ispec);
        let lap_iu = laplacian(&iu);
        let comm = commutator_field(u, ispec);
        let mut rhs = 0.0;
        for idx in 0..grid.num_points() {
            let iu_t = Complex64::i() * (lap_iu.values()[idx] - icubic.values()[idx]);
            rhs += (iu_t * comm.values()[idx].conj()).re;
        }
        rhs *= -grid.cell_area();
        max_lhs = max_lhs.max(lhs.abs());
        max_rhs = max_rhs.max(rhs.abs());
        pairs.push((lhs, rhs));
    }
    let scale = max_lhs.max(max_rhs).max(f64::MIN_POSITIVE);
    let max_residual = pairs
        .iter()
        .map(|(l, r)| (l - r).abs() / scale)
        .fold(0.0, f64::max);
    Ok(FdEnergyReport {
        max_residual,
        max_lhs,
        max_rhs,
        samples: traj.len(),
    })
}
