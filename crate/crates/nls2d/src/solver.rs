//! Time integration of `i u_t + Delta u = |u|^2 u` by Strang-split exponential
//! substeps: half a kinetic flow (exact Fourier phase), one exact nonlinear
//! phase rotation, half a kinetic flow. Both substeps are unitary, so mass is
//! conserved to roundoff and the scheme is second order in `dt`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft::{dft2_forward, dft2_inverse};
use crate::field::Field;
use crate::grid::Grid;
use crate::norms::{l2_norm_sq, l4_norm_quartic};
use crate::spectral::transform;

/// Relative mass drift beyond which a run is declared unstable.
pub const MASS_DRIFT_ABORT: f64 = 1e-6;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Time step.
    pub dt: f64,
    /// Final time; the run takes `round(t_final/dt)` steps.
    pub t_final: f64,
    /// Steps between recorded diagnostic samples.
    pub record_stride: usize,
    /// Use the padded (dealiased) quartic quadrature inside the energy.
    pub dealias: bool,
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.dt > 0.0
            && self.dt.is_finite()
            && self.t_final.is_finite()
            && self.dt <= self.t_final
            && self.record_stride >= 1;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidSolverConfig {
                dt: self.dt,
                t_final: self.t_final,
                stride: self.record_stride,
            })
        }
    }

    pub fn num_steps(&self) -> usize {
        ((self.t_final / self.dt).round() as usize).max(1)
    }
}

/// Per-sample conserved-quantity record. The optional slots are filled by the
/// I-method and Morawetz layers.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct DiagnosticsRecord {
    pub mass: f64,
    pub energy: f64,
    pub e_iu: Option<f64>,
    pub morawetz_action: Option<f64>,
    pub commutator_l2: Option<f64>,
}

/// Recorded history of one run: sample times, field snapshots, diagnostics,
/// and the running spacetime `L^4` integral.
///
/// `snapshots` either parallels `times` one-to-one or is empty (when the run
/// was driven through [`evolve_with`] with `store_snapshots = false`);
/// consumers that need fields validate the former.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub snapshots: Vec<Field>,
    pub records: Vec<DiagnosticsRecord>,
    /// `int_0^t int |u|^4 dx dt'` at each sample time (trapezoid in t, per step).
    pub l4_running: Vec<f64>,
    /// Final value of the spacetime integral over `[0, T]`.
    pub l4x4_total: f64,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn t_final(&self) -> f64 {
        *self.times.last().unwrap_or(&0.0)
    }

    /// Write the solver-level CSV schema `(t, mass, energy, l4x4_accum)`.
    pub fn write_csv(&self, mut w: impl std::io::Write) -> std::io::Result<()> {
        writeln!(w, "t,mass,energy,l4x4_accum")?;
        for i in 0..self.len() {
            writeln!(
                w,
                "{},{},{},{}",
                self.times[i], self.records[i].mass, self.records[i].energy, self.l4_running[i]
            )?;
        }
        Ok(())
    }
}

/// Mass `M(u) = int |u|^2 dx`.
pub fn mass(u: &Field) -> f64 {
    l2_norm_sq(u)
}

/// Kinetic part of the energy, `1/2 (1/L^2) sum |xi|^2 |u_hat|^2`, evaluated
/// over the full lattice (same quadratic form the kinetic substep rotates).
fn kinetic_energy(u: &Field) -> f64 {
    let spec = transform(u);
    let grid = *spec.grid();
    let n = grid.n();
    let mut acc = 0.0;
    for iy in 0..n {
        for ix in 0..n {
            let (kx, ky) = grid.xi(ix, iy);
            acc += (kx * kx + ky * ky) * spec.coeffs()[iy * n + ix].norm_sqr();
        }
    }
    0.5 * acc / grid.area()
}

/// Energy `E(u) = 1/2 int |grad u|^2 + 1/4 int |u|^4` with the quartic term
/// by plain node quadrature.
pub fn energy(u: &Field) -> f64 {
    kinetic_energy(u) + 0.25 * l4_norm_quartic(u)
}

/// Energy with the quartic term evaluated on the zero-padded `2n` grid.
pub fn energy_dealiased(u: &Field) -> f64 {
    kinetic_energy(u) + 0.25 * quartic_dealiased(u)
}

/// `int |u|^4 dx` with the integrand sampled on the refined grid.
pub fn quartic_dealiased(u: &Field) -> f64 {
    let fine = crate::spectral::pad_to_refined(u);
    l4_norm_quartic(&fine)
}

fn energy_for(u: &Field, dealias: bool) -> f64 {
    if dealias {
        energy_dealiased(u)
    } else {
        energy(u)
    }
}

/// Precomputed kinetic half-step multiplier `exp(-i |xi|^2 dt/2) / n^2`; the
/// `1/n^2` absorbs the unnormalized DFT round trip.
fn kinetic_table(grid: &Grid, half_dt: f64) -> Vec<Complex64> {
    let n = grid.n();
    let scale = 1.0 / (n * n) as f64;
    let mut table = Vec::with_capacity(grid.num_points());
    for iy in 0..n {
        for ix in 0..n {
            let (kx, ky) = grid.xi(ix, iy);
            let phase = -(kx * kx + ky * ky) * half_dt;
            table.push(Complex64::from_polar(scale, phase));
        }
    }
    table
}

fn apply_kinetic(buf: &mut [Complex64], table: &[Complex64], n: usize) {
    dft2_forward(buf, n);
    for (v, t) in buf.iter_mut().zip(table) {
        *v *= t;
    }
    dft2_inverse(buf, n);
}

fn apply_nonlinear(buf: &mut [Complex64], dt: f64) {
    for v in buf.iter_mut() {
        let phase = -v.norm_sqr() * dt;
        *v *= Complex64::from_polar(1.0, phase);
    }
}

/// One Strang step `exp(i dt/2 Delta) . exp(-i dt |u|^2) . exp(i dt/2 Delta)`.
pub fn strang_step(u: &Field, dt: f64) -> Result<Field> {
    let grid = *u.grid();
    let table = kinetic_table(&grid, dt / 2.0);
    let mut buf = u.values().to_vec();
    let n = grid.n();
    apply_kinetic(&mut buf, &table, n);
    apply_nonlinear(&mut buf, dt);
    apply_kinetic(&mut buf, &table, n);
    let out = Field::new(grid, buf);
    if out.is_finite() {
        Ok(out)
    } else {
        Err(Error::IntegrationFailure { step: 1, t: dt })
    }
}

/// Combined `(mass, int |u|^4)` quadrature pass.
fn mass_and_quartic(values: &[Complex64], cell: f64) -> (f64, f64) {
    let mut m = 0.0;
    let mut q = 0.0;
    for v in values {
        let s = v.norm_sqr();
        m += s;
        q += s * s;
    }
    (m * cell, q * cell)
}

/// Evolve `u0` to `t_final`, recording diagnostics every `record_stride`
/// steps (plus the initial and final states). `store_snapshots` controls
/// whether sampled fields are kept; `on_sample` fires at every sample either
/// way.
pub fn evolve_with(
    u0: &Field,
    cfg: &SolverConfig,
    store_snapshots: bool,
    mut on_sample: impl FnMut(f64, &Field),
) -> Result<Trajectory> {
    cfg.validate()?;
    let grid = *u0.grid();
    let n = grid.n();
    let cell = grid.cell_area();
    let steps = cfg.num_steps();
    let table = kinetic_table(&grid, cfg.dt / 2.0);

    let mut buf = u0.values().to_vec();
    let (mass0, mut quartic_prev) = mass_and_quartic(&buf, cell);
    if !mass0.is_finite() {
        return Err(Error::IntegrationFailure { step: 0, t: 0.0 });
    }

    let mut traj = Trajectory {
        times: Vec::new(),
        snapshots: Vec::new(),
        records: Vec::new(),
        l4_running: Vec::new(),
        l4x4_total: 0.0,
    };
    let mut l4_accum = 0.0;

    let record = |traj: &mut Trajectory,
                  t: f64,
                  values: &[Complex64],
                  m: f64,
                  l4: f64,
                  on_sample: &mut dyn FnMut(f64, &Field)| {
        let field = Field::new(grid, values.to_vec());
        traj.times.push(t);
        traj.records.push(DiagnosticsRecord {
            mass: m,
            energy: energy_for(&field, cfg.dealias),
            ..DiagnosticsRecord::default()
        });
        traj.l4_running.push(l4);
        on_sample(t, &field);
        if store_snapshots {
            traj.snapshots.push(field);
        }
    };

    record(&mut traj, 0.0, &buf, mass0, 0.0, &mut on_sample);

    for step in 1..=steps {
        apply_kinetic(&mut buf, &table, n);
        apply_nonlinear(&mut buf, cfg.dt);
        apply_kinetic(&mut buf, &table, n);

        let t = step as f64 * cfg.dt;
        let (m, quartic) = mass_and_quartic(&buf, cell);
        if !m.is_finite() {
            return Err(Error::IntegrationFailure { step, t });
        }
        let drift = (m - mass0).abs() / mass0.max(f64::MIN_POSITIVE);
        if drift > MASS_DRIFT_ABORT {
            return Err(Error::MassDrift { step, drift });
        }
        l4_accum += 0.5 * cfg.dt * (quartic_prev + quartic);
        quartic_prev = quartic;

        if step % cfg.record_stride == 0 || step == steps {
            record(&mut traj, t, &buf, m, l4_accum, &mut on_sample);
        }
    }

    traj.l4x4_total = l4_accum;
    Ok(traj)
}

/// Evolve and keep every sampled snapshot.
pub fn evolve(u0: &Field, cfg: &SolverConfig) -> Result<Trajectory> {
    evolve_with(u0, cfg, true, |_, _| {})
}
