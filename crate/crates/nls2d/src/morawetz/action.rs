//! The Morawetz action `M_a = 2 int grad a . Im(v_bar grad v) dz` over the
//! tensor product `v(x, y) = u(x) u(y)`, and its time-derivative
//! decomposition, both reduced exactly to 2D FFT convolutions.
//!
//! With the odd radial kernel `K(w) = f'(|w|) w/|w|` the action separates as
//!
//! ```text
//! M_a = 4 int Im(u_bar grad u)(x) . (K * |u|^2)(x) dx
//! ```
//!
//! and `d/dt M_a = term_bilaplacian + term_hessian + term_nonlinear`:
//!
//! ```text
//! term_bilaplacian = -   int |u|^2 (B * |u|^2),        B = Delta(Delta a)
//! term_hessian     =   8 sum_jk [ int R_jk (H_jk * rho)
//!                                 - int Re(G_bar_j (H_jk * G_k)) ]
//! term_nonlinear   =   2 int |u|^4 (D * |u|^2),        D = f'' + f'/r
//! ```
//!
//! with `rho = |u|^2`, `R_jk = Re(d_j u_bar d_k u)`, `G_j = u_bar d_j u`.
//! The Hessian and nonlinear terms are nonnegative: the first is the
//! quadratic form of the positive-definite pair Hessian, the second pairs
//! nonnegative densities against the nonnegative kernel `D`.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::field::Field;
use crate::grid::Grid;
use crate::spectral::{gradient, transform};

use super::kernels::KernelTable;
use super::weight::WeightSpec;

/// Momentum density `Im(u_bar grad u)` (without the conventional factor 2).
pub fn momentum_density(u: &Field) -> (Field, Field) {
    let (ux, uy) = gradient(u);
    let grid = *u.grid();
    let px: Vec<_> = u
        .values()
        .iter()
        .zip(ux.values())
        .map(|(v, d)| num_complex::Complex64::new((v.conj() * d).im, 0.0))
        .collect();
    let py: Vec<_> = u
        .values()
        .iter()
        .zip(uy.values())
        .map(|(v, d)| num_complex::Complex64::new((v.conj() * d).im, 0.0))
        .collect();
    (Field::new(grid, px), Field::new(grid, py))
}

fn quadrature_dot(a: &Field, b: &Field) -> f64 {
    a.values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| x.re * y.re + x.im * y.im)
        .sum::<f64>()
        * a.grid().cell_area()
}

/// Morawetz action against a prebuilt kernel table.
pub fn morawetz_action_with(u: &Field, table: &KernelTable) -> f64 {
    let rho_hat = transform(&u.abs_squared());
    let conv_x = table.conv_grad_x(&rho_hat);
    let conv_y = table.conv_grad_y(&rho_hat);
    let (px, py) = momentum_density(u);
    4.0 * (quadrature_dot(&px, &conv_x) + quadrature_dot(&py, &conv_y))
}

/// Morawetz action of a field for the given weight. Builds the kernel table
/// on the fly; use [`morawetz_action_with`] to amortize it.
pub fn morawetz_action(u: &Field, spec: &WeightSpec) -> Result<f64> {
    let table = KernelTable::new(*u.grid(), spec)?;
    Ok(morawetz_action_with(u, &table))
}

/// The three time-derivative contributions and their sum.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ActionTermBreakdown {
    pub term_bilaplacian: f64,
    pub term_hessian: f64,
    pub term_nonlinear: f64,
    pub total: f64,
}

impl ActionTermBreakdown {
    /// Magnitude scale for positivity tolerances.
    pub fn scale(&self) -> f64 {
        self.term_bilaplacian
            .abs()
            .max(self.term_hessian.abs())
            .max(self.term_nonlinear.abs())
    }
}

/// Evaluate the derivative decomposition against a prebuilt kernel table.
pub fn action_derivative_terms_with(u: &Field, table: &KernelTable) -> ActionTermBreakdown {
    let grid: Grid = *u.grid();
    let rho = u.abs_squared();
    let rho_hat = transform(&rho);

    // bilaplacian term: -int rho (B * rho)
    let term_bilaplacian = -quadrature_dot(&rho, &table.conv_bilap(&rho_hat));

    // Hessian term
    let (ux, uy) = gradient(u);
    let r11 = Field::new(
        grid,
        ux.values()
            .iter()
            .map(|d| num_complex::Complex64::new(d.norm_sqr(), 0.0))
            .collect::<Vec<_>>(),
    );
    let r22 = Field::new(
        grid,
        uy.values()
            .iter()
            .map(|d| num_complex::Complex64::new(d.norm_sqr(), 0.0))
            .collect::<Vec<_>>(),
    );
    let r12 = Field::new(
        grid,
        ux.values()
            .iter()
            .zip(uy.values())
            .map(|(a, b)| num_complex::Complex64::new((a.conj() * b).re, 0.0))
            .collect::<Vec<_>>(),
    );
    let g1 = Field::new(
        grid,
        u.values()
            .iter()
            .zip(ux.values())
            .map(|(v, d)| v.conj() * d)
            .collect::<Vec<_>>(),
    );
    let g2 = Field::new(
        grid,
        u.values()
            .iter()
            .zip(uy.values())
            .map(|(v, d)| v.conj() * d)
            .collect::<Vec<_>>(),
    );
    let g1_hat = transform(&g1);
    let g2_hat = transform(&g2);

    let same_point = quadrature_dot(&r11, &table.conv_h11(&rho_hat))
        + 2.0 * quadrature_dot(&r12, &table.conv_h12(&rho_hat))
        + quadrature_dot(&r22, &table.conv_h22(&rho_hat));

    let cross_dot = |a: &Field, b: &Field| -> f64 {
        // Re sum conj(a) b dx^2
        a.values()
            .iter()
            .zip(b.values())
            .map(|(x, y)| (x.conj() * y).re)
            .sum::<f64>()
            * grid.cell_area()
    };
    let cross = cross_dot(&g1, &table.conv_h11(&g1_hat))
        + cross_dot(&g1, &table.conv_h12(&g2_hat))
        + cross_dot(&g2, &table.conv_h12(&g1_hat))
        + cross_dot(&g2, &table.conv_h22(&g2_hat));

    let term_hessian = 8.0 * (same_point - cross);

    // nonlinear term: 2 int |u|^4 (D * rho)
    let rho4 = Field::new(
        grid,
        u.values()
            .iter()
            .map(|v| {
                let s = v.norm_sqr();
                num_complex::Complex64::new(s * s, 0.0)
            })
            .collect::<Vec<_>>(),
    );
    let term_nonlinear = 2.0 * quadrature_dot(&rho4, &table.conv_d(&rho_hat));

    ActionTermBreakdown {
        term_bilaplacian,
        term_hessian,
        term_nonlinear,
        total: term_bilaplacian + term_hessian + term_nonlinear,
    }
}

/// Derivative decomposition for the given weight; builds the table on the fly.
pub fn action_derivative_terms(u: &Field, spec: &WeightSpec) -> Result<ActionTermBreakdown> {
    let table = KernelTable::new(*u.grid(), spec)?;
    Ok(action_derivative_terms_with(u, &table))
}
