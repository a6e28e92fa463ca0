//! The experiment configuration format: a flat, line-oriented key-value text
//! file with sections mirroring the library modules.
//!
//! Grammar (one construct per line):
//!
//! ```text
//! file     := line*
//! line     := blank | comment | section | entry
//! comment  := '#' <anything>
//! section  := '[' name ']'
//! entry    := key '=' value          (whitespace around tokens ignored)
//! ```
//!
//! Sections and keys:
//!
//! ```text
//! [grid]      n, length
//! [data]      kind (gaussian | random_hs), amplitude, sigma, center_x,
//!             center_y, velocity_x, velocity_y, s, seed
//! [solver]    dt, t_final, record_stride, dealias
//! [imethod]   s, n_lattice (comma-separated cutoff ladder, in units of the
//!             frequency step 2*pi/L), normalize (true rescales each sweep
//!             rung to the modified-energy hypothesis boundary)
//! [morawetz]  m_policy (t_cubed_root | fixed), m_fixed, eps, suite_constant
//! [planner]   c_prime, c0, eps, delta_exp
//! [output]    directory, formats (comma-separated subset of
//!             csv, json, gnuplot, snapshots)
//! ```
//!
//! Unknown sections or keys are errors; every diagnostic carries the line
//! number. A config round-trips losslessly through `to_text` / `parse`.

use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    pub n: usize,
    pub length: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DataKind {
    Gaussian,
    RandomHs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataConfig {
    pub kind: DataKind,
    pub amplitude: f64,
    pub sigma: f64,
    pub center: (f64, f64),
    pub velocity: (f64, f64),
    /// Roughness exponent for `random_hs` data.
    pub s: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverSection {
    pub dt: f64,
    pub t_final: f64,
    pub record_stride: usize,
    pub dealias: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImethodConfig {
    pub s: f64,
    /// Cutoff ladder in lattice units (multiples of `2*pi/L`).
    pub n_lattice: Vec<f64>,
    /// Normalize each sweep rung to the `E(Iu(0))` hypothesis boundary.
    pub normalize: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MPolicy {
    TCubedRoot,
    Fixed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MorawetzConfig {
    pub m_policy: MPolicy,
    /// Interaction scale when `m_policy = fixed`.
    pub m_fixed: f64,
    /// Smallness parameter for the almost-Morawetz partition cells.
    pub eps: f64,
    /// Suite constant `C` in `lhs <= C (rhs + error)`.
    pub suite_constant: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlannerConfig {
    pub c_prime: f64,
    pub c0: f64,
    pub eps: f64,
    pub delta_exp: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OutputFormat {
    Csv,
    Json,
    Gnuplot,
    Snapshots,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputConfig {
    pub directory: String,
    pub formats: Vec<OutputFormat>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub grid: GridConfig,
    pub data: DataConfig,
    pub solver: SolverSection,
    pub imethod: ImethodConfig,
    pub morawetz: MorawetzConfig,
    pub planner: PlannerConfig,
    pub output: OutputConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            grid: GridConfig {
                n: 256,
                length: 32.0,
            },
            data: DataConfig {
                kind: DataKind::Gaussian,
                amplitude: 1.0,
                sigma: 1.0,
                center: (0.0, 0.0),
                velocity: (0.5, 0.0),
                s: 0.3,
                seed: 7,
            },
            solver: SolverSection {
                dt: 1e-3,
                t_final: 1.0,
                record_stride: 10,
                dealias: true,
            },
            imethod: ImethodConfig {
                s: 0.3,
                n_lattice: vec![4.0, 8.0, 16.0, 32.0],
                normalize: true,
            },
            morawetz: MorawetzConfig {
                m_policy: MPolicy::TCubedRoot,
                m_fixed: 1.0,
                eps: 0.5,
                suite_constant: 5.0,
            },
            planner: PlannerConfig {
                c_prime: 1.0,
                c0: 1.0,
                eps: 0.1,
                delta_exp: 0.01,
            },
            output: OutputConfig {
                directory: "out".to_string(),
                formats: vec![
                    OutputFormat::Csv,
                    OutputFormat::Json,
                    OutputFormat::Gnuplot,
                    OutputFormat::Snapshots,
                ],
            },
        }
    }
}

fn config_err(line: usize, msg: impl Into<String>) -> CliError {
    CliError::Config {
        line: Some(line),
        message: msg.into(),
    }
}

struct Entry {
    line: usize,
    key: String,
    value: String,
    used: bool,
}

struct Section {
    line: usize,
    name: String,
    entries: Vec<Entry>,
}

fn tokenize(text: &str) -> Result<Vec<Section>, CliError> {
    let mut sections: Vec<Section> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| config_err(line_no, "unterminated section header"))?
                .trim();
            if name.is_empty() {
                return Err(config_err(line_no, "empty section name"));
            }
            sections.push(Section {
                line: line_no,
                name: name.to_string(),
                entries: Vec::new(),
            });
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| config_err(line_no, "expected `key = value`"))?;
        let section = sections
            .last_mut()
            .ok_or_else(|| config_err(line_no, "entry before any [section]"))?;
        section.entries.push(Entry {
            line: line_no,
            key: key.trim().to_string(),
            value: value.trim().to_string(),
            used: false,
        });
    }
    Ok(sections)
}

struct SectionReader<'a> {
    section: Option<&'a mut Section>,
    name: &'static str,
}

impl<'a> SectionReader<'a> {
    fn take(&mut self, key: &str) -> Option<(usize, String)> {
        let section = self.section.as_deref_mut()?;
        for e in section.entries.iter_mut() {
            if e.key == key && !e.used {
                e.used = true;
                return Some((e.line, e.value.clone()));
            }
        }
        None
    }

    fn required(&mut self, key: &str) -> Result<(usize, String), CliError> {
        self.take(key).ok_or_else(|| CliError::Config {
            line: self.section.as_deref().map(|s| s.line),
            message: format!("missing key `{key}` in section [{}]", self.name),
        })
    }

    fn f64(&mut self, key: &str) -> Result<f64, CliError> {
        let (line, v) = self.required(key)?;
        let parsed: f64 = v
            .parse()
            .map_err(|_| config_err(line, format!("`{key}` expects a real number, got `{v}`")))?;
        if parsed.is_finite() {
            Ok(parsed)
        } else {
            Err(config_err(line, format!("`{key}` must be finite")))
        }
    }

    fn usize(&mut self, key: &str) -> Result<usize, CliError> {
        let (line, v) = self.required(key)?;
        v.parse().map_err(|_| {
            config_err(
                line,
                format!("`{key}` expects a nonnegative integer, got `{v}`"),
            )
        })
    }

    fn u64(&mut self, key: &str) -> Result<u64, CliError> {
        let (line, v) = self.required(key)?;
        v.parse().map_err(|_| {
            config_err(
                line,
                format!("`{key}` expects an unsigned integer, got `{v}`"),
            )
        })
    }

    fn bool(&mut self, key: &str) -> Result<bool, CliError> {
        let (line, v) = self.required(key)?;
        match v.as_str() {
            "true" => Ok(true),
            "false" => Ok(false),
            _ => Err(config_err(
                line,
                format!("`{key}` expects true or false, got `{v}`"),
            )),
        }
    }

    fn string(&mut self, key: &str) -> Result<String, CliError> {
        Ok(self.required(key)?.1)
    }

    fn f64_list(&mut self, key: &str) -> Result<Vec<f64>, CliError> {
        let (line, v) = self.required(key)?;
        let mut out = Vec::new();
        for part in v.split(',') {
            let item = part.trim();
            if item.is_empty() {
                return Err(config_err(line, format!("empty item in `{key}` list")));
            }
            let x: f64 = item.parse().map_err(|_| {
                config_err(
                    line,
                    format!("`{key}` expects comma-separated reals, got `{item}`"),
                )
            })?;
            if !x.is_finite() {
                return Err(config_err(line, format!("`{key}` entries must be finite")));
            }
            out.push(x);
        }
        Ok(out)
    }
}

/// Parse a configuration from its text form.
pub fn parse(text: &str) -> Result<ExperimentConfig, CliError> {
    let mut sections = tokenize(text)?;
    // reject duplicate sections up front
    for i in 0..sections.len() {
        for j in i + 1..sections.len() {
            if sections[i].name == sections[j].name {
                return Err(config_err(
                    sections[j].line,
                    format!("duplicate section [{}]", sections[j].name),
                ));
            }
        }
    }
    let known = [
        "grid", "data", "solver", "imethod", "morawetz", "planner", "output",
    ];
    for s in &sections {
        if !known.contains(&s.name.as_str()) {
            return Err(config_err(s.line, format!("unknown section [{}]", s.name)));
        }
    }
    fn reader_for<'a>(sections: &'a mut [Section], name: &'static str) -> SectionReader<'a> {
        let section = sections.iter_mut().find(|s| s.name == name);
        SectionReader { section, name }
    }

    let mut grid = reader_for(&mut sections, "grid");
    let grid_cfg = GridConfig {
        n: grid.usize("n")?,
        length: grid.f64("length")?,
    };

    let mut data = reader_for(&mut sections, "data");
    let (kind_line, kind_raw) = data.required("kind")?;
    let kind = match kind_raw.as_str() {
        "gaussian" => DataKind::Gaussian,
        "random_hs" => DataKind::RandomHs,
        other => {
            return Err(config_err(
                kind_line,
                format!("data kind must be gaussian or random_hs, got `{other}`"),
            ))
        }
    };
    let data_cfg = DataConfig {
        kind,
        amplitude: data.f64("amplitude")?,
        sigma: data.f64("sigma")?,
        center: (data.f64("center_x")?, data.f64("center_y")?),
        velocity: (data.f64("velocity_x")?, data.f64("velocity_y")?),
        s: data.f64("s")?,
        seed: data.u64("seed")?,
    };

    let mut solver = reader_for(&mut sections, "solver");
    let solver_cfg = SolverSection {
        dt: solver.f64("dt")?,
        t_final: solver.f64("t_final")?,
        record_stride: solver.usize("record_stride")?,
        dealias: solver.bool("dealias")?,
    };

    let mut imethod = reader_for(&mut sections, "imethod");
    let imethod_cfg = ImethodConfig {
        s: imethod.f64("s")?,
        n_lattice: imethod.f64_list("n_lattice")?,
        normalize: imethod.bool("normalize")?,
    };

    let mut morawetz = reader_for(&mut sections, "morawetz");
    let (policy_line, policy_raw) = morawetz.required("m_policy")?;
    let m_policy = match policy_raw.as_str() {
        "t_cubed_root" => MPolicy::TCubedRoot,
        "fixed" => MPolicy::Fixed,
        other => {
            return Err(config_err(
                policy_line,
                format!("m_policy must be t_cubed_root or fixed, got `{other}`"),
            ))
        }
    };
    let morawetz_cfg = MorawetzConfig {
        m_policy,
        m_fixed: morawetz.f64("m_fixed")?,
        eps: morawetz.f64("eps")?,
        suite_constant: morawetz.f64("suite_constant")?,
    };

    let mut planner = reader_for(&mut sections, "planner");
    let planner_cfg = PlannerConfig {
        c_prime: planner.f64("c_prime")?,
        c0: planner.f64("c0")?,
        eps: planner.f64("eps")?,
        delta_exp: planner.f64("delta_exp")?,
    };

    let mut output = reader_for(&mut sections, "output");
    let directory = output.string("directory")?;
    let (fmt_line, fmt_raw) = output.required("formats")?;
    let mut formats = Vec::new();
    for part in fmt_raw.split(',') {
        formats.push(match part.trim() {
            "csv" => OutputFormat::Csv,
            "json" => OutputFormat::Json,
            "gnuplot" => OutputFormat::Gnuplot,
            "snapshots" => OutputFormat::Snapshots,
            other => {
                return Err(config_err(
                    fmt_line,
                    format!("unknown output format `{other}`"),
                ))
            }
        });
    }

    // every entry must have been consumed
    for s in &sections {
        for e in &s.entries {
            if !e.used {
                return Err(config_err(
                    e.line,
                    format!("unknown key `{}` in section [{}]", e.key, s.name),
                ));
            }
        }
    }

    let cfg = ExperimentConfig {
        grid: grid_cfg,
        data: data_cfg,
        solver: solver_cfg,
        imethod: imethod_cfg,
        morawetz: morawetz_cfg,
        planner: planner_cfg,
        output: OutputConfig { directory, formats },
    };
    validate(&cfg)?;
    Ok(cfg)
}

/// Semantic validation beyond the grammar.
fn validate(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let fail = |msg: String| {
        Err(CliError::Config {
            line: None,
            message: msg,
        })
    };
    if cfg.grid.n < 8 || !cfg.grid.n.is_multiple_of(2) || cfg.grid.n > 4096 {
        return fail(format!(
            "grid.n must be even with 8 <= n <= 4096, got {}",
            cfg.grid.n
        ));
    }
    if cfg.grid.length <= 0.0 {
        return fail(format!(
            "grid.length must be positive, got {}",
            cfg.grid.length
        ));
    }
    if !(cfg.solver.dt > 0.0 && cfg.solver.dt <= cfg.solver.t_final) {
        return fail(format!(
            "solver requires 0 < dt <= t_final, got dt = {}, t_final = {}",
            cfg.solver.dt, cfg.solver.t_final
        ));
    }
    if cfg.solver.record_stride == 0 {
        return fail("solver.record_stride must be at least 1".to_string());
    }
    if !(cfg.imethod.s > 0.0 && cfg.imethod.s < 1.0) {
        return fail(format!(
            "imethod.s must lie in (0, 1), got {}",
            cfg.imethod.s
        ));
    }
    if cfg.imethod.n_lattice.is_empty() || cfg.imethod.n_lattice.iter().any(|&x| x <= 0.0) {
        return fail("imethod.n_lattice must be a nonempty list of positive values".to_string());
    }
    if cfg.data.kind == DataKind::Gaussian && cfg.data.sigma <= 0.0 {
        return fail(format!(
            "data.sigma must be positive, got {}",
            cfg.data.sigma
        ));
    }
    if cfg.morawetz.m_fixed <= 0.0 {
        return fail("morawetz.m_fixed must be positive".to_string());
    }
    if cfg.morawetz.eps <= 0.0 {
        return fail("morawetz.eps must be positive".to_string());
    }
    if cfg.morawetz.suite_constant <= 0.0 {
        return fail("morawetz.suite_constant must be positive".to_string());
    }
    if cfg.planner.eps <= 0.0 {
        return fail("planner.eps must be positive".to_string());
    }
    Ok(())
}

fn kind_str(kind: DataKind) -> &'static str {
    match kind {
        DataKind::Gaussian => "gaussian",
        DataKind::RandomHs => "random_hs",
    }
}

fn policy_str(p: MPolicy) -> &'static str {
    match p {
        MPolicy::TCubedRoot => "t_cubed_root",
        MPolicy::Fixed => "fixed",
    }
}

fn format_str(f: OutputFormat) -> &'static str {
    match f {
        OutputFormat::Csv => "csv",
        OutputFormat::Json => "json",
        OutputFormat::Gnuplot => "gnuplot",
        OutputFormat::Snapshots => "snapshots",
    }
}

fn join_f64(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// Canonical text form; `parse(to_text(c)) == c`.
pub fn to_text(cfg: &ExperimentConfig) -> String {
    let mut s = String::new();
    s.push_str("[grid]\n");
    s.push_str(&format!("n = {}\n", cfg.grid.n));
    s.push_str(&format!("length = {}\n\n", cfg.grid.length));
    s.push_str("[data]\n");
    s.push_str(&format!("kind = {}\n", kind_str(cfg.data.kind)));
    s.push_str(&format!("amplitude = {}\n", cfg.data.amplitude));
    s.push_str(&format!("sigma = {}\n", cfg.data.sigma));
    s.push_str(&format!("center_x = {}\n", cfg.data.center.0));
    s.push_str(&format!("center_y = {}\n", cfg.data.center.1));
    s.push_str(&format!("velocity_x = {}\n", cfg.data.velocity.0));
    s.push_str(&format!("velocity_y = {}\n", cfg.data.velocity.1));
    s.push_str(&format!("s = {}\n", cfg.data.s));
    s.push_str(&format!("seed = {}\n\n", cfg.data.seed));
    s.push_str("[solver]\n");
    s.push_str(&format!("dt = {}\n", cfg.solver.dt));
    s.push_str(&format!("t_final = {}\n", cfg.solver.t_final));
    s.push_str(&format!("record_stride = {}\n", cfg.solver.record_stride));
    s.push_str(&format!("dealias = {}\n\n", cfg.solver.dealias));
    s.push_str("[imethod]\n");
    s.push_str(&format!("s = {}\n", cfg.imethod.s));
    s.push_str(&format!(
        "n_lattice = {}\n",
        join_f64(&cfg.imethod.n_lattice)
    ));
    s.push_str(&format!("normalize = {}\n\n", cfg.imethod.normalize));
    s.push_str("[morawetz]\n");
    s.push_str(&format!(
        "m_policy = {}\n",
        policy_str(cfg.morawetz.m_policy)
    ));
    s.push_str(&format!("m_fixed = {}\n", cfg.morawetz.m_fixed));
    s.push_str(&format!("eps = {}\n", cfg.morawetz.eps));
    s.push_str(&format!(
        "suite_constant = {}\n\n",
        cfg.morawetz.suite_constant
    ));
    s.push_str("[planner]\n");
    s.push_str(&format!("c_prime = {}\n", cfg.planner.c_prime));
    s.push_str(&format!("c0 = {}\n", cfg.planner.c0));
    s.push_str(&format!("eps = {}\n", cfg.planner.eps));
    s.push_str(&format!("delta_exp = {}\n\n", cfg.planner.delta_exp));
    s.push_str("[output]\n");
    s.push_str(&format!("directory = {}\n", cfg.output.directory));
    s.push_str(&format!(
        "formats = {}\n",
        cfg.output
            .formats
            .iter()
            .map(|f| format_str(*f))
            .collect::<Vec<_>>()
            .join(",")
    ));
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_round_trips() {
        let cfg = ExperimentConfig::default();
        let text = to_text(&cfg);
        let back = parse(&text).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn reports_line_numbers() {
        let text = "[grid]\nn = 64\nlength = 16\n[data]\nkind = banana\n";
        let err = parse(text).unwrap_err();
        match err {
            CliError::Config { line, message } => {
                assert_eq!(line, Some(5));
                assert!(message.contains("banana"));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn rejects_unknown_keys_and_sections() {
        let mut cfg = ExperimentConfig::default();
        cfg.output.directory = "x".into();
        let mut text = to_text(&cfg);
        text.push_str("\n[mystery]\nfoo = 1\n");
        assert!(parse(&text).is_err());
        let text2 = to_text(&cfg).replace("[solver]\ndt", "[solver]\nturbo = on\ndt");
        assert!(parse(&text2).is_err());
    }

    #[test]
    fn rejects_zero_dt() {
        let cfg = ExperimentConfig::default();
        let text = to_text(&cfg).replace("dt = 0.001", "dt = 0");
        let err = parse(&text).unwrap_err();
        assert!(matches!(err, CliError::Config { .. }));
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let cfg = ExperimentConfig::default();
        let mut text = String::from("# experiment provenance header\n\n");
        text.push_str(&to_text(&cfg));
        assert_eq!(parse(&text).unwrap(), cfg);
    }
}
