//! Figure presets, evaluation commands, the verification runner and their
//! serialization.

mod figures;
mod verify;

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::linear_cs::{CsLabel, LinearCs, LinearModel, MotionIntegralCoeffs};
use crate::numerics::QuadratureSpec;
use crate::paa_cs::{NormalLawModel, PaaCsLabel};

pub use figures::{linear_eval, paa_eval, run_fig1, run_fig2, run_fig3};
pub use verify::{run_verify, Check, Status, VerifyReport};

/// Process exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NON_CONVERGENCE: i32 = 3;

/// Environment variable overriding the default quadrature tolerance.
pub const TOL_ENV: &str = "WAVECS_TOL";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Fig1,
    Fig2,
    Fig3,
    LinearEval,
    PaaEval,
    Verify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Deliberate corruption used to check that `verify` can fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fault {
    /// The state is built with `b (1 + 1e-3)` and checked against `b`.
    PerturbB,
}

/// Everything a run depends on. Echoed as the metadata header of every
/// output file, so equal configs give equal bytes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub b: f64,
    pub c1: Complex64,
    pub c2: Complex64,
    pub x0: f64,
    pub p0: f64,
    /// Overrides `x0`, `p0` when set.
    pub z: Option<Complex64>,
    pub eps: f64,
    pub eta: f64,
    pub sigma: f64,
    #[serde(rename = "J")]
    pub j: f64,
    pub gamma: f64,
    /// Angle values of the fig3 curves.
    pub gammas: Vec<f64>,
    pub grids: Vec<GridSpec>,
    pub format: Format,
    pub tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fault: Option<Fault>,
}

fn axis(min: f64, max: f64, count: usize) -> GridSpec {
    GridSpec { min, max, count }
}

impl RunConfig {
    /// Defaults for each command; fig1-fig3 carry the figure parameters.
    pub fn preset(command: Command) -> Self {
        let mut c = Self {
            command,
            b: 180.0,
            c1: Complex64::new(3.0, 0.0),
            c2: Complex64::new(8f64.sqrt(), 0.0),
            x0: 0.0,
            p0: 15.0,
            z: None,
            eps: 1.0,
            eta: 1.0,
            sigma: 1.0,
            j: 0.0,
            gamma: 0.0,
            gammas: Vec::new(),
            grids: Vec::new(),
            format: Format::Csv,
            tol: None,
            fault: None,
        };
        match command {
            Command::Fig1 => c.grids = vec![axis(0.0, 0.05, 51), axis(-3.0, 3.0, 601)],
            Command::Fig2 => c.grids = vec![axis(-5.0, 5.0, 101), axis(-5.0, 5.0, 101)],
            Command::Fig3 => {
                c.eps = 2.0;
                c.gammas = vec![-4.0, -2.0, 0.0];
                c.grids = vec![axis(-20.0, 40.0, 601)];
            }
            Command::LinearEval => c.grids = vec![axis(0.0, 0.05, 6), axis(-3.0, 3.0, 61)],
            Command::PaaEval => c.grids = vec![axis(-10.0, 10.0, 201)],
            Command::Verify => {}
        }
        c
    }

    /// Number of grid axes the command consumes.
    pub fn axes(&self) -> usize {
        match self.command {
            Command::Fig1 | Command::Fig2 | Command::LinearEval => 2,
            Command::Fig3 | Command::PaaEval => 1,
            Command::Verify => 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.grids.len() != self.axes() {
            return Err(Error::Config(format!(
                "{:?} takes {} grid axes, got {}",
                self.command,
                self.axes(),
                self.grids.len()
            )));
        }
        for g in &self.grids {
            GridSpec::new(g.min, g.max, g.count)?;
        }
        if let Some(t) = self.tol {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::Config(format!("tolerance must be > 0, got {t}")));
            }
        }
        match self.command {
            Command::Fig1 | Command::LinearEval => {
                self.linear_state()?;
            }
            Command::Fig2 | Command::Fig3 | Command::PaaEval => {
                self.normal_law()?;
                if self.command == Command::Fig3 && self.gammas.is_empty() {
                    return Err(Error::Config("fig3 needs at least one gamma".into()));
                }
            }
            Command::Verify => {}
        }
        Ok(())
    }

    pub fn quadrature(&self) -> QuadratureSpec {
        match self.tol {
            // the default keeps rel_tol = 100 abs_tol
            Some(t) => QuadratureSpec::default().with_tolerances(t, 100.0 * t),
            None => QuadratureSpec::default(),
        }
    }

    pub fn linear_state(&self) -> Result<LinearCs> {
        let model = LinearModel::new(self.b)?;
        let coeffs = MotionIntegralCoeffs::new(self.c1, self.c2)?;
        match self.z {
            Some(z) => LinearCs::new(model, coeffs, CsLabel::new(z)),
            None => LinearCs::from_initial_data(model, coeffs, self.x0, self.p0),
        }
    }

    pub fn normal_law(&self) -> Result<NormalLawModel> {
        Ok(NormalLawModel::new(self.eps, self.eta, self.sigma)?.with_quadrature(self.quadrature()))
    }

    pub fn paa_label(&self) -> PaaCsLabel {
        PaaCsLabel::new(self.j, self.gamma)
    }
}

/// Exit code for a failed run.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::NonConvergence { .. } | Error::SlowDecay { .. } | Error::NonFinite(_) => EXIT_NON_CONVERGENCE,
        _ => EXIT_CONFIG,
    }
}

/// One named block of rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str], rows: Vec<Vec<f64>>) -> Self {
        Self {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows,
        }
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }
}

/// Output of a figure or evaluation command. The first table is the primary
/// one; fig1 adds the classical trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FigureData {
    pub config: RunConfig,
    pub tables: Vec<Table>,
}

fn config_line(config: &RunConfig) -> String {
    format!("# {}\n", serde_json::to_string(config).expect("config serializes"))
}

fn csv_body(out: &mut String, table: &Table) {
    out.push_str(&table.columns.join(","));
    out.push('\n');
    for row in &table.rows {
        for (k, v) in row.iter().enumerate() {
            if k > 0 {
                out.push(',');
            }
            // 17 significant digits round-trip any double
            write!(out, "{v:.16e}").expect("write to string");
        }
        out.push('\n');
    }
}

/// `#`-prefixed JSON config line, then the header row and the records.
pub fn table_csv(config: &RunConfig, table: &Table) -> String {
    let mut s = config_line(config);
    csv_body(&mut s, table);
    s
}

/// All tables in one CSV stream, each after a `# table: NAME` line.
pub fn stream_csv(data: &FigureData) -> String {
    let mut s = config_line(&data.config);
    for (k, t) in data.tables.iter().enumerate() {
        if k > 0 {
            writeln!(s, "# table: {}", t.name).expect("write to string");
        }
        csv_body(&mut s, t);
    }
    s
}

pub fn to_json(data: &FigureData) -> String {
    let mut s = serde_json::to_string_pretty(data).expect("figure data serializes");
    s.push('\n');
    s
}

fn io_error(path: &Path, e: std::io::Error) -> Error {
    Error::Config(format!("cannot write {}: {e}", path.display()))
}

/// `<dir>/<stem>_<suffix>.<ext>` next to `path`.
pub fn sibling_path(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    let name = match path.extension().and_then(|e| e.to_str()) {
        Some(ext) => format!("{stem}_{suffix}.{ext}"),
        None => format!("{stem}_{suffix}"),
    };
    path.with_file_name(name)
}

/// Writes figure data to `out` (or stdout) and returns the paths written.
/// With CSV output to a file, secondary tables go to sibling files named
/// `<stem>_<table>.csv`.
pub fn write_figure(data: &FigureData, out: Option<&Path>) -> Result<Vec<PathBuf>> {
    let Some(path) = out else {
        let text = match data.config.format {
            Format::Csv => stream_csv(data),
            Format::Json => to_json(data),
        };
        let mut stdout = std::io::stdout().lock();
        stdout
            .write_all(text.as_bytes())
            .map_err(|e| Error::Config(format!("cannot write stdout: {e}")))?;
        return Ok(Vec::new());
    };
    let mut written = Vec::new();
    match data.config.format {
        Format::Json => {
            fs::write(path, to_json(data)).map_err(|e| io_error(path, e))?;
            written.push(path.to_path_buf());
        }
        Format::Csv => {
            for (k, t) in data.tables.iter().enumerate() {
                let p = if k == 0 { path.to_path_buf() } else { sibling_path(path, &t.name) };
                fs::write(&p, table_csv(&data.config, t)).map_err(|e| io_error(&p, e))?;
                written.push(p);
            }
        }
    }
    Ok(written)
}

/// Runs a figure or evaluation command.
pub fn run_figure(config: &RunConfig) -> Result<FigureData> {
    config.validate()?;
    match config.command {
        Command::Fig1 => run_fig1(config),
        Command::Fig2 => run_fig2(config),
        Command::Fig3 => run_fig3(config),
        Command::LinearEval => linear_eval(config),
        Command::PaaEval => paa_eval(config),
        Command::Verify => Err(Error::Config("verify is not a figure command".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate() {
        for c in [
            Command::Fig1,
            Command::Fig2,
            Command::Fig3,
            Command::LinearEval,
            Command::PaaEval,
            Command::Verify,
        ] {
            RunConfig::preset(c).validate().unwrap();
        }
    }

    #[test]
    fn bad_configs_are_rejected() {
        let mut c = RunConfig::preset(Command::Fig1);
        c.c2 = Complex64::new(1.0, 0.0);
        assert!(matches!(c.validate(), Err(Error::DeltaNotUnit { .. })));
        let mut c = RunConfig::preset(Command::Fig3);
        c.grids.push(axis(0.0, 1.0, 3));
        assert!(matches!(c.validate(), Err(Error::Config(_))));
        let mut c = RunConfig::preset(Command::Fig2);
        c.eta = -1.0;
        assert!(c.validate().is_err());
        assert_eq!(exit_code(&c.validate().unwrap_err()), EXIT_CONFIG);
    }

    #[test]
    fn csv_layout() {
        let c = RunConfig::preset(Command::Fig2);
        let t = Table::new("main", &["Jp", "gammap", "density"], vec![vec![0.1, -2.0, 1.0 / 3.0]]);
        let s = table_csv(&c, &t);
        let lines: Vec<&str> = s.lines().collect();
        assert!(lines[0].starts_with("# {"));
        let echoed: RunConfig = serde_json::from_str(&lines[0][2..]).unwrap();
        assert_eq!(echoed, c);
        assert_eq!(lines[1], "Jp,gammap,density");
        let v: Vec<f64> = lines[2].split(',').map(|x| x.parse().unwrap()).collect();
        assert_eq!(v, vec![0.1, -2.0, 1.0 / 3.0]);
    }

    #[test]
    fn sibling_names() {
        assert_eq!(
            sibling_path(Path::new("/tmp/a/fig1.csv"), "trajectory"),
            PathBuf::from("/tmp/a/fig1_trajectory.csv")
        );
        assert_eq!(sibling_path(Path::new("f"), "t"), PathBuf::from("f_t"));
    }
}
