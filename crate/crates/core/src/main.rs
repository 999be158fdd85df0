use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use num_complex::Complex64;

use wavecs::figio::{
    exit_code, run_figure, run_verify, write_figure, Command, Fault, Format, RunConfig, EXIT_CONFIG, EXIT_OK,
    EXIT_VERIFY_FAILED, TOL_ENV,
};
use wavecs::grid::parse_axes;
use wavecs::Error;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Cmd {
    Fig1,
    Fig2,
    Fig3,
    LinearEval,
    PaaEval,
    Verify,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Fig1 => Command::Fig1,
            Cmd::Fig2 => Command::Fig2,
            Cmd::Fig3 => Command::Fig3,
            Cmd::LinearEval => Command::LinearEval,
            Cmd::PaaEval => Command::PaaEval,
            Cmd::Verify => Command::Verify,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OutFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum InjectedFault {
    PerturbB,
}

fn complex(s: &str) -> Result<Complex64, String> {
    s.trim()
        .replace(' ', "")
        .parse::<Complex64>()
        .map_err(|_| format!("`{s}` is not a complex number of the form a+bi"))
}

/// Coherent-state figures, evaluations and verification.
#[derive(Debug, Parser)]
#[command(name = "wavecs", version, allow_negative_numbers = true)]
struct Cli {
    #[arg(value_enum)]
    command: Cmd,
    /// Dimensionless slope of the linear potential.
    #[arg(long)]
    b: Option<f64>,
    /// Integral-of-motion coefficient, `a+bi`.
    #[arg(long, value_parser = complex, allow_hyphen_values = true)]
    c1: Option<Complex64>,
    #[arg(long, value_parser = complex, allow_hyphen_values = true)]
    c2: Option<Complex64>,
    /// Eigenvalue label; overrides --x0/--p0.
    #[arg(long, value_parser = complex, allow_hyphen_values = true)]
    z: Option<Complex64>,
    #[arg(long)]
    x0: Option<f64>,
    #[arg(long)]
    p0: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    sigma: Option<f64>,
    /// Pseudo-action of the state (reference state for fig2).
    #[arg(long = "J")]
    j: Option<f64>,
    /// Pseudo-angle; for fig3 replaces the preset list of curves.
    #[arg(long)]
    gamma: Option<f64>,
    /// `MIN:MAX:N[,MIN:MAX:N]`.
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: OutFormat,
    /// Absolute quadrature tolerance (relative is 100x).
    #[arg(long, env = TOL_ENV)]
    tol: Option<f64>,
    #[arg(long, value_enum, hide = true)]
    inject_fault: Option<InjectedFault>,
}

fn build_config(cli: &Cli) -> Result<RunConfig, Error> {
    let mut c = RunConfig::preset(cli.command.into());
    macro_rules! set {
        ($($field:ident <- $flag:ident),*) => {
            $(if let Some(v) = cli.$flag { c.$field = v; })*
        };
    }
    set!(b <- b, c1 <- c1, c2 <- c2, x0 <- x0, p0 <- p0, eps <- eps, eta <- eta, sigma <- sigma, j <- j);
    c.z = cli.z;
    if let Some(g) = cli.gamma {
        c.gamma = g;
        if c.command == Command::Fig3 {
            c.gammas = vec![g];
        }
    }
    if let Some(g) = &cli.grid {
        c.grids = parse_axes(g)?;
    }
    c.format = match cli.format {
        OutFormat::Csv => Format::Csv,
        OutFormat::Json => Format::Json,
    };
    c.tol = cli.tol;
    c.fault = cli.inject_fault.map(|InjectedFault::PerturbB| Fault::PerturbB);
    c.validate()?;
    Ok(c)
}

fn verify(config: &RunConfig, out: Option<&PathBuf>) -> i32 {
    let report = run_verify(config);
    let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
    text.push('\n');
    match out {
        Some(p) => {
            if let Err(e) = std::fs::write(p, text) {
                eprintln!("error: cannot write {}: {e}", p.display());
                return EXIT_CONFIG;
            }
        }
        None => print!("{text}"),
    }
    let failed: Vec<&str> = report.failures().map(|c| c.name.as_str()).collect();
    if failed.is_empty() {
        eprintln!("verify: {} checks, all assertions passed", report.checks.len());
        EXIT_OK
    } else {
        eprintln!("verify: FAILED {}", failed.join(", "));
        EXIT_VERIFY_FAILED
    }
}

fn run(cli: &Cli) -> i32 {
    let config = match build_config(cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    if config.command == Command::Verify {
        return verify(&config, cli.out.as_ref());
    }
    let result = run_figure(&config).and_then(|data| write_figure(&data, cli.out.as_deref()));
    match result {
        Ok(paths) => {
            for p in paths {
                eprintln!("wrote {}", p.display());
            }
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    ExitCode::from(run(&cli) as u8)
}
