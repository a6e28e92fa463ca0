//! The three-branch convex radial weight `f` at interaction scale `M` and the
//! derived Hessian/Laplacian quantities of `a(x, y) = f(|x - y|)`.
//!
//! Branches:
//!
//! - inner,  `r < M/sqrt(e)`: `f = r^2 (1 - log(r/M)) / (2M)`
//! - bridge, `M/sqrt(e) <= r <= M`: `f'` follows the smoothstep
//!   `f'(a) + (100 - f'(a)) S(t)`, `S = 3t^2 - 2t^3`, and `f` integrates it
//! - outer,  `r > M`: `f' = 100`, `f'' = 0`
//!
//! The outer branch slope matches the `100 r` profile; `f` itself is anchored
//! by `f(0) = 0` and continuous integration outward, which is the only choice
//! compatible with a C^2 convex profile (only `f'` and `f''` enter any
//! computed quantity, so the anchor is a pure normalization).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slope of the far-field branch.
pub const OUTER_SLOPE: f64 = 100.0;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct WeightSpec {
    m_scale: f64,
}

impl WeightSpec {
    pub fn new(m_scale: f64) -> Result<Self> {
        if !m_scale.is_finite() || m_scale <= 0.0 {
            return Err(Error::InvalidBoxLength(m_scale));
        }
        Ok(WeightSpec { m_scale })
    }

    pub fn m_scale(&self) -> f64 {
        self.m_scale
    }

    /// Inner join `M / sqrt(e)`.
    pub fn inner_join(&self) -> f64 {
        self.m_scale * (-0.5f64).exp()
    }

    /// `f'` at the inner join, `exp(-1/2)`; independent of `M`.
    pub fn inner_slope(&self) -> f64 {
        (-0.5f64).exp()
    }

    fn inner(&self, r: f64) -> (f64, f64, f64) {
        if r == 0.0 {
            // r^2 log r -> 0 but f'' diverges logarithmically
            return (0.0, 0.0, f64::INFINITY);
        }
        let m = self.m_scale;
        let log_ratio = (r / m).ln();
        let f = r * r * (1.0 - log_ratio) / (2.0 * m);
        let fp = r * (1.0 - 2.0 * log_ratio) / (2.0 * m);
        let fpp = (-1.0 - 2.0 * log_ratio) / (2.0 * m);
        (f, fp, fpp)
    }

    fn bridge(&self, r: f64) -> (f64, f64, f64) {
        let a = self.inner_join();
        let b = self.m_scale;
        let width = b - a;
        let t = (r - a) / width;
        let fp_a = self.inner_slope();
        let gap = OUTER_SLOPE - fp_a;
        let s = t * t * (3.0 - 2.0 * t);
        let fp = fp_a + gap * s;
        let fpp = gap * 6.0 * t * (1.0 - t) / width;
        // f(a) + integral of the smoothstep slope from a to r
        let (f_a, _, _) = self.inner(a);
        let f = f_a + fp_a * (r - a) + gap * width * (t * t * t - 0.5 * t * t * t * t);
        (f, fp, fpp)
    }

    /// `f` at the outer join, where the bridge hands over to slope 100.
    fn f_at_outer_join(&self) -> f64 {
        self.bridge(self.m_scale).0
    }
}

/// Evaluate `(f, f', f'')` at radius `r >= 0`.
pub fn weight_eval(spec: &WeightSpec, r: f64) -> Result<(f64, f64, f64)> {
    if r < 0.0 || !r.is_finite() {
        return Err(Error::NegativeRadius(r));
    }
    let a = spec.inner_join();
    let b = spec.m_scale();
    Ok(if r < a {
        spec.inner(r)
    } else if r <= b {
        spec.bridge(r)
    } else {
        (
            spec.f_at_outer_join() + OUTER_SLOPE * (r - b),
            OUTER_SLOPE,
            0.0,
        )
    })
}

/// 2x2 Hessian block `H(w) = f'' w^ w^T + (f'/r)(I - w^ w^T)` of the radial
/// weight, for a separation `w = x - y` with `|w| > 0`.
pub fn hessian_block(spec: &WeightSpec, w: [f64; 2]) -> Result<[[f64; 2]; 2]> {
    let r = (w[0] * w[0] + w[1] * w[1]).sqrt();
    if r == 0.0 {
        return Err(Error::SingularSeparation);
    }
    let (_, fp, fpp) = weight_eval(spec, r)?;
    let (nx, ny) = (w[0] / r, w[1] / r);
    let tangential = fp / r;
    let h11 = fpp * nx * nx + tangential * (1.0 - nx * nx);
    let h12 = (fpp - tangential) * nx * ny;
    let h22 = fpp * ny * ny + tangential * (1.0 - ny * ny);
    Ok([[h11, h12], [h12, h22]])
}

/// Full 4x4 Hessian of `a(x, y) = f(|x - y|)` in block form
/// `[[H, -H], [-H, H]]`.
pub fn hessian4(spec: &WeightSpec, w: [f64; 2]) -> Result<[[f64; 4]; 4]> {
    let h = hessian_block(spec, w)?;
    let mut out = [[0.0; 4]; 4];
    for j in 0..2 {
        for k in 0..2 {
            out[j][k] = h[j][k];
            out[j][k + 2] = -h[j][k];
            out[j + 2][k] = -h[j][k];
            out[j + 2][k + 2] = h[j][k];
        }
    }
    Ok(out)
}

/// Smallest eigenvalue of the 4x4 Hessian. The block structure gives the
/// spectrum `{0, 0, 2 lambda_1(H), 2 lambda_2(H)}` with `lambda(H)` the
/// eigenvalues `{f'', f'/r}` of the 2x2 block, so the minimum is available in
/// closed form.
pub fn min_eig(spec: &WeightSpec, w: [f64; 2]) -> Result<f64> {
    let r = (w[0] * w[0] + w[1] * w[1]).sqrt();
    if r == 0.0 {
        return Err(Error::SingularSeparation);
    }
    let (_, fp, fpp) = weight_eval(spec, r)?;
    Ok((2.0 * fpp).min(2.0 * fp / r).min(0.0))
}

/// The 4D Laplacian of `a` as a radial function: `Delta a = 2 (f'' + f'/r)`.
/// On the inner branch this equals `(4/M) log(M/r)`.
pub fn laplacian_a(spec: &WeightSpec, r: f64) -> Result<f64> {
    if r.is_nan() || r <= 0.0 {
        return Err(Error::SingularSeparation);
    }
    let (_, fp, fpp) = weight_eval(spec, r)?;
    Ok(2.0 * (fpp + fp / r))
}

/// `Delta a` with the logarithmic singularity at `r = 0` clamped to
/// `r_floor`; the boolean flags that the clamp fired.
pub fn laplacian_a_clamped(spec: &WeightSpec, r: f64, r_floor: f64) -> (f64, bool) {
    let clamped = r < r_floor;
    let rr = if clamped { r_floor } else { r };
    (laplacian_a(spec, rr).expect("r_floor > 0"), clamped)
}
