//! Subcommand implementations. Every command takes a parsed configuration,
//! writes its artifacts under the output directory, and returns the list of
//! files it produced. Outputs are byte-deterministic for a fixed config and
//! seed.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use nls2d::field::Field;
use nls2d::grid::Grid;
use nls2d::imethod::{
    commutator_field, increment_sweep, modified_energy, plan_parameters, region_bound_check,
    IMultiplierSpec, PlannerConstants, Region, RegionReport, ScalingPlan, SweepTable,
};
use nls2d::morawetz::{
    action_derivative_terms_with, almost_morawetz_check, interaction_inequality_check,
    morawetz_action_with, ActionTermBreakdown, AlmostMorawetzReport, InteractionReport,
    KernelTable, WeightSpec,
};
use nls2d::norms::lp_norm;
use nls2d::oracle::{
    direct_cubic_spectrum, direct_hessian_term, direct_morawetz_action, OracleReport,
    MAX_HESSIAN_ORACLE_N,
};
use nls2d::snapshot::write_snapshot;
use nls2d::solver::{evolve, SolverConfig};
use nls2d::spectral::{dealias_pad_product, transform};
use nls2d::synth::{synthesize_gaussian, synthesize_random_hs, GaussianParams};

use crate::config::{DataKind, ExperimentConfig, MPolicy, OutputFormat};
use crate::error::CliError;

/// Optional command-line overrides applied on top of the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out_dir: Option<PathBuf>,
    pub seed: Option<u64>,
}

fn out_dir(cfg: &ExperimentConfig, ov: &Overrides) -> PathBuf {
    ov.out_dir
        .clone()
        .unwrap_or_else(|| PathBuf::from(&cfg.output.directory))
}

fn effective_seed(cfg: &ExperimentConfig, ov: &Overrides) -> u64 {
    ov.seed.unwrap_or(cfg.data.seed)
}

fn build_grid(cfg: &ExperimentConfig) -> Result<Grid, CliError> {
    Ok(Grid::new(cfg.grid.n, cfg.grid.length)?)
}

fn synthesize(cfg: &ExperimentConfig, grid: Grid, seed: u64) -> Result<Field, CliError> {
    match cfg.data.kind {
        DataKind::Gaussian => Ok(synthesize_gaussian(
            grid,
            &GaussianParams {
                amplitude: cfg.data.amplitude,
                sigma: cfg.data.sigma,
                center: cfg.data.center,
                velocity: cfg.data.velocity,
            },
        )?),
        DataKind::RandomHs => Ok(synthesize_random_hs(
            grid,
            cfg.data.s,
            seed,
            cfg.data.amplitude,
        )),
    }
}

fn solver_config(cfg: &ExperimentConfig) -> SolverConfig {
    SolverConfig {
        dt: cfg.solver.dt,
        t_final: cfg.solver.t_final,
        record_stride: cfg.solver.record_stride,
        dealias: cfg.solver.dealias,
    }
}

/// Cutoff ladder in absolute wavenumber units.
fn cutoffs(cfg: &ExperimentConfig, grid: &Grid) -> Vec<f64> {
    cfg.imethod
        .n_lattice
        .iter()
        .map(|m| m * grid.freq_step())
        .collect()
}

/// Interaction scale per policy, clamped to `L/4`.
fn m_scale(cfg: &ExperimentConfig, grid: &Grid) -> (f64, bool) {
    let raw = match cfg.morawetz.m_policy {
        MPolicy::TCubedRoot => cfg.solver.t_final.cbrt(),
        MPolicy::Fixed => cfg.morawetz.m_fixed,
    };
    let limit = grid.length() / 4.0;
    if raw > limit {
        (limit, true)
    } else {
        (raw, false)
    }
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir)?;
    Ok(())
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text)?;
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io {
        message: format!("json encoding failed: {e}"),
    })?;
    text.push('\n');
    write_text(path, &text)
}

const GNUPLOT_SCRIPT: &str = "\
set datafile separator ','
set key autotitle columnhead
set terminal pngcairo size 1280,900
set output 'trajectory.png'
set multiplot layout 2,2
set xlabel 't'
plot 'trajectory.csv' using 1:2 with lines title 'mass'
plot 'trajectory.csv' using 1:3 with lines title 'energy'
plot 'trajectory.csv' using 1:4 with lines title 'E(Iu)'
plot 'trajectory.csv' using 1:5 with lines title 'Morawetz action'
unset multiplot
";

#[derive(Debug, Serialize)]
struct RunSummary {
    config: ExperimentConfig,
    seed: u64,
    samples: usize,
    t_final: f64,
    mass_initial: f64,
    mass_drift_max: f64,
    energy_initial: f64,
    energy_drift_max: f64,
    e_iu_initial: f64,
    e_iu_sup_increment: f64,
    l4x4_total: f64,
    morawetz_m_scale: f64,
    morawetz_m_clamped: bool,
    cutoff: f64,
}

/// Evolve one trajectory and emit trajectory CSV, summary JSON, the gnuplot
/// script, and initial/final snapshots, per the configured formats.
pub fn cmd_run(cfg: &ExperimentConfig, ov: &Overrides) -> Result<Vec<PathBuf>, CliError> {
    let dir = out_dir(cfg, ov);
    ensure_dir(&dir)?;
    let seed = effective_seed(cfg, ov);
    let grid = build_grid(cfg)?;
    let u0 = synthesize(cfg, grid, seed)?;
    let mut traj = evolve(&u0, &solver_config(cfg))?;

    let ispec = IMultiplierSpec::new(cfg.imethod.s, cutoffs(cfg, &grid)[0])?;
    let (m, clamped) = m_scale(cfg, &grid);
    let table = KernelTable::new(grid, &WeightSpec::new(m)?)?;
    for i in 0..traj.len() {
        let u = &traj.snapshots[i];
        traj.records[i].e_iu = Some(modified_energy(u, &ispec, cfg.solver.dealias));
        traj.records[i].morawetz_action = Some(morawetz_action_with(u, &table));
        traj.records[i].commutator_l2 = Some(lp_norm(&commutator_field(u, &ispec), 2)?);
    }

    let mut written = Vec::new();
    for format in &cfg.output.formats {
        match format {
            OutputFormat::Csv => {
                let path = dir.join("trajectory.csv");
                let mut text = String::from("t,mass,energy,e_iu,morawetz_action,commutator_l2\n");
                for i in 0..traj.len() {
                    let r = &traj.records[i];
                    text.push_str(&format!(
                        "{},{},{},{},{},{}\n",
                        traj.times[i],
                        r.mass,
                        r.energy,
                        r.e_iu.unwrap(),
                        r.morawetz_action.unwrap(),
                        r.commutator_l2.unwrap()
                    ));
                }
                write_text(&path, &text)?;
                written.push(path);
            }
            OutputFormat::Json => {
                let m0 = traj.records[0].mass;
                let e0 = traj.records[0].energy;
                let eiu0 = traj.records[0].e_iu.unwrap();
                let summary = RunSummary {
                    config: cfg.clone(),
                    seed,
                    samples: traj.len(),
                    t_final: traj.t_final(),
                    mass_initial: m0,
                    mass_drift_max: traj
                        .records
                        .iter()
                        .map(|r| (r.mass - m0).abs() / m0.max(f64::MIN_POSITIVE))
                        .fold(0.0, f64::max),
                    energy_initial: e0,
                    energy_drift_max: traj
                        .records
                        .iter()
                        .map(|r| (r.energy - e0).abs())
                        .fold(0.0, f64::max),
                    e_iu_initial: eiu0,
                    e_iu_sup_increment: traj
                        .records
                        .iter()
                        .map(|r| (r.e_iu.unwrap() - eiu0).abs())
                        .fold(0.0, f64::max),
                    l4x4_total: traj.l4x4_total,
                    morawetz_m_scale: m,
                    morawetz_m_clamped: clamped,
                    cutoff: ispec.cutoff(),
                };
                let path = dir.join("summary.json");
                write_json(&path, &summary)?;
                written.push(path);
            }
            OutputFormat::Gnuplot => {
                let path = dir.join("plot.gp");
                write_text(&path, GNUPLOT_SCRIPT)?;
                written.push(path);
            }
            OutputFormat::Snapshots => {
                let first = dir.join("snapshot_initial.bin");
                write_snapshot(&traj.snapshots[0], &first)?;
                written.push(first);
                let last = dir.join("snapshot_final.bin");
                write_snapshot(traj.snapshots.last().unwrap(), &last)?;
                written.push(last);
            }
        }
    }
    Ok(written)
}

#[derive(Debug, Serialize)]
struct SweepSummary {
    config: ExperimentConfig,
    seed: u64,
    increment_slope: f64,
    commutator_slope: f64,
    table: SweepTable,
}

/// Drive the cutoff ladder: one trajectory per `N`, almost-conservation
/// increments and commutator norms, with fitted slopes.
pub fn cmd_sweep_n(cfg: &ExperimentConfig, ov: &Overrides) -> Result<Vec<PathBuf>, CliError> {
    let dir = out_dir(cfg, ov);
    ensure_dir(&dir)?;
    let seed = effective_seed(cfg, ov);
    let grid = build_grid(cfg)?;
    let u0 = synthesize(cfg, grid, seed)?;
    let ladder = cutoffs(cfg, &grid);
    let table = increment_sweep(
        &u0,
        cfg.imethod.s,
        &ladder,
        &solver_config(cfg),
        cfg.imethod.normalize,
    )?;

    let mut written = Vec::new();
    let path = dir.join("sweep.csv");
    let mut text = String::from("n_cutoff,sup_increment,commutator_l1l2\n");
    for row in &table.rows {
        text.push_str(&format!(
            "{},{},{}\n",
            row.cutoff, row.sup_increment, row.commutator_l1l2
        ));
    }
    write_text(&path, &text)?;
    written.push(path);

    let path = dir.join("increments.csv");
    let mut text = String::from("n_cutoff,sup_increment,slope_so_far\n");
    for row in &table.rows {
        text.push_str(&format!(
            "{},{},{}\n",
            row.cutoff, row.sup_increment, row.slope_so_far
        ));
    }
    write_text(&path, &text)?;
    written.push(path);

    let path = dir.join("commutator.csv");
    let mut text = String::from("n_cutoff,commutator_l1l2\n");
    for row in &table.rows {
        text.push_str(&format!("{},{}\n", row.cutoff, row.commutator_l1l2));
    }
    write_text(&path, &text)?;
    written.push(path);

    let path = dir.join("summary.json");
    write_json(
        &path,
        &SweepSummary {
            config: cfg.clone(),
            seed,
            increment_slope: table.increment_slope,
            commutator_slope: table.commutator_slope,
            table,
        },
    )?;
    written.push(path);
    Ok(written)
}

#[derive(Debug, Serialize)]
struct PositivitySummary {
    min_term_hessian: f64,
    min_term_nonlinear: f64,
    all_nonnegative: bool,
    tolerance: f64,
}

#[derive(Debug, Serialize)]
struct MorawetzSummary {
    config: ExperimentConfig,
    seed: u64,
    u_level: InteractionReport,
    iu_level: Vec<AlmostMorawetzReport>,
    positivity: PositivitySummary,
}

/// Interaction inequality for `u`, almost-Morawetz reports along the cutoff
/// ladder, and the per-sample positivity breakdown.
pub fn cmd_morawetz(cfg: &ExperimentConfig, ov: &Overrides) -> Result<Vec<PathBuf>, CliError> {
    let dir = out_dir(cfg, ov);
    ensure_dir(&dir)?;
    let seed = effective_seed(cfg, ov);
    let grid = build_grid(cfg)?;
    let u0 = synthesize(cfg, grid, seed)?;
    let traj = evolve(&u0, &solver_config(cfg))?;
    let t_horizon = cfg.solver.t_final;

    let u_level = interaction_inequality_check(&traj, t_horizon)?;
    let mut iu_level = Vec::new();
    for &cutoff in &cutoffs(cfg, &grid) {
        let ispec = IMultiplierSpec::new(cfg.imethod.s, cutoff)?;
        iu_level.push(almost_morawetz_check(
            &traj,
            &ispec,
            t_horizon,
            cfg.morawetz.eps,
            cfg.morawetz.suite_constant,
        )?);
    }

    let (m, _clamped) = m_scale(cfg, &grid);
    let table = KernelTable::new(grid, &WeightSpec::new(m)?)?;
    let breakdowns: Vec<ActionTermBreakdown> = traj
        .snapshots
        .iter()
        .map(|u| action_derivative_terms_with(u, &table))
        .collect();

    let mut written = Vec::new();
    let path = dir.join("breakdown.csv");
    let mut text = String::from("t,term_bilaplacian,term_hessian,term_nonlinear,total\n");
    for (t, b) in traj.times.iter().zip(&breakdowns) {
        text.push_str(&format!(
            "{},{},{},{},{}\n",
            t, b.term_bilaplacian, b.term_hessian, b.term_nonlinear, b.total
        ));
    }
    write_text(&path, &text)?;
    written.push(path);

    let scale = breakdowns.iter().map(|b| b.scale()).fold(0.0, f64::max);
    let tolerance = 1e-10 * scale.max(1e-30);
    let min_h = breakdowns
        .iter()
        .map(|b| b.term_hessian)
        .fold(f64::INFINITY, f64::min);
    let min_n = breakdowns
        .iter()
        .map(|b| b.term_nonlinear)
        .fold(f64::INFINITY, f64::min);
    let summary = MorawetzSummary {
        config: cfg.clone(),
        seed,
        u_level,
        iu_level,
        positivity: PositivitySummary {
            min_term_hessian: min_h,
            min_term_nonlinear: min_n,
            all_nonnegative: min_h >= -tolerance && min_n >= -tolerance,
            tolerance,
        },
    };
    let path = dir.join("morawetz_report.json");
    write_json(&path, &summary)?;
    written.push(path);
    Ok(written)
}

/// Region certificates for the four dyadic frequency regions.
pub fn cmd_regions(
    cfg: &ExperimentConfig,
    ov: &Overrides,
    samples: usize,
) -> Result<Vec<PathBuf>, CliError> {
    let dir = out_dir(cfg, ov);
    ensure_dir(&dir)?;
    let seed = effective_seed(cfg, ov);
    let grid = build_grid(cfg)?;
    let ispec = IMultiplierSpec::new(cfg.imethod.s, cutoffs(cfg, &grid)[0])?;
    let mut written = Vec::new();
    for region in [
        Region::AllLow,
        Region::OneHigh,
        Region::TwoHigh,
        Region::ThreeHigh,
    ] {
        let report: RegionReport = region_bound_check(&ispec, region, samples, seed)?;
        let path = dir.join(format!("region{}.json", region.index()));
        write_json(&path, &report)?;
        written.push(path);
    }
    Ok(written)
}

/// Closed-form planner arithmetic; returns the plan for printing and
/// optionally writes `plan.json`.
pub fn cmd_plan(
    s: f64,
    t0: f64,
    m0: f64,
    eps: f64,
    consts: &PlannerConstants,
    dir: Option<&Path>,
) -> Result<(ScalingPlan, Vec<PathBuf>), CliError> {
    let plan = plan_parameters(s, t0, m0, eps, consts)?;
    let mut written = Vec::new();
    if let Some(dir) = dir {
        ensure_dir(dir)?;
        let path = dir.join("plan.json");
        write_json(&path, &plan)?;
        written.push(path);
    }
    Ok((plan, written))
}

/// Oracle tolerance from the acceptance gate.
pub const ORACLE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Serialize)]
pub struct BatteryOutcome {
    pub reports: Vec<OracleReport>,
    pub failures: usize,
}

/// Deterministic probe projection of a spectrum: a fixed pseudo-random
/// functional that differs whenever any coefficient differs.
fn probe_projection(spec: &nls2d::Spectrum, seed: u64) -> f64 {
    let mut state = seed;
    let mut acc = 0.0;
    for c in spec.coeffs() {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        let w = ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5;
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        let v = ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5;
        acc += w * c.re + v * c.im;
    }
    acc
}

/// Run the full oracle battery at n in {8, 12, 16} (the Hessian oracle stops
/// at its n <= 12 cost guard). `inject_sign_fault` is a test fixture that
/// flips the sign of the fast action value so the battery's discrimination
/// can itself be exercised.
pub fn oracle_battery(inject_sign_fault: bool) -> Result<BatteryOutcome, CliError> {
    let mut reports = Vec::new();
    let weight = WeightSpec::new(1.3)?;
    for &n in &[8usize, 12, 16] {
        let grid = Grid::new(n, 8.0)?;
        let u = synthesize_random_hs(grid, 0.4, 1000 + n as u64, 1.0);

        let fault = if inject_sign_fault { -1.0 } else { 1.0 };
        let fast_action = fault * nls2d::morawetz::morawetz_action(&u, &weight)?;
        let direct_action = direct_morawetz_action(&u, &weight)?;
        reports.push(OracleReport::new(
            "morawetz_action",
            fast_action,
            direct_action,
            n,
        ));

        let fast_cubic = transform(&dealias_pad_product(&[&u, &u.conj(), &u])?);
        let direct_cubic = direct_cubic_spectrum(&u)?;
        reports.push(OracleReport::new(
            "cubic_spectrum_probe",
            probe_projection(&fast_cubic, 99),
            probe_projection(&direct_cubic, 99),
            n,
        ));

        if n <= MAX_HESSIAN_ORACLE_N {
            let fast_hessian = nls2d::morawetz::action_derivative_terms(&u, &weight)?.term_hessian;
            let direct_hessian = direct_hessian_term(&u, &weight)?;
            reports.push(OracleReport::new(
                "term_hessian",
                fast_hessian,
                direct_hessian,
                n,
            ));
        }
    }
    // NaN comparisons are failures too
    let failures = reports
        .iter()
        .filter(|r| r.rel_err.is_nan() || r.rel_err > ORACLE_TOLERANCE)
        .count();
    Ok(BatteryOutcome { reports, failures })
}

/// Run the battery, emit JSON lines, and convert failures into the oracle
/// exit code.
pub fn cmd_oracle_validate(dir: Option<&Path>) -> Result<(BatteryOutcome, Vec<PathBuf>), CliError> {
    let outcome = oracle_battery(false)?;
    let mut written = Vec::new();
    let mut lines = String::new();
    for r in &outcome.reports {
        lines.push_str(&serde_json::to_string(r).map_err(|e| CliError::Io {
            message: format!("json encoding failed: {e}"),
        })?);
        lines.push('\n');
    }
    if let Some(dir) = dir {
        ensure_dir(dir)?;
        let path = dir.join("oracle_reports.jsonl");
        write_text(&path, &lines)?;
        written.push(path);
    }
    if outcome.failures > 0 {
        return Err(CliError::OracleViolation {
            failures: outcome.failures,
            message: "fast paths disagree with direct sums".to_string(),
        });
    }
    Ok((outcome, written))
}

/// Helper shared with tests: the number of reports the battery emits.
pub fn battery_size() -> usize {
    // action + cubic at {8,12,16}, hessian at {8,12}
    3 + 3 + 2
}
