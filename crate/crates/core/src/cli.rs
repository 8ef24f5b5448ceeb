//! Command-line front end. Every command builds a [`Table`] and renders it as
//! CSV or JSON; errors carry their own exit codes.

use crate::asymptotics::leading_asymptote;
use crate::checks;
use crate::conic::{AzimuthalNumber, ConicConfig, ConicFunction};
use crate::error::{Error, Result};
use crate::output::{Cell, Format, Table};
use crate::zeeman::{
    electronic_period, g_factor_with, zeeman_splitting, PotentialCurve, ZeemanParams,
};
use clap::{Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(
    name = "conic",
    version,
    about = "Crossing wave function F_c(m; rho) and the anomalous Zeeman factor g(m)",
    after_help = "Set CONIC_WIDE=1 to sum the series in double-double arithmetic."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl From<OutputFormat> for Format {
    fn from(f: OutputFormat) -> Self {
        match f {
            OutputFormat::Csv => Format::Csv,
            OutputFormat::Json => Format::Json,
        }
    }
}

fn parse_m(s: &str) -> std::result::Result<AzimuthalNumber, String> {
    s.parse::<AzimuthalNumber>().map_err(|e| match e {
        Error::Parse(msg) => msg,
        other => other.to_string(),
    })
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate F_c on a uniform rho grid.
    Eval {
        /// Azimuthal number as ±k/2 with k odd.
        #[arg(long, value_parser = parse_m, allow_hyphen_values = true)]
        m: AzimuthalNumber,
        #[arg(long, default_value_t = 0.0)]
        rho_min: f64,
        #[arg(long, default_value_t = 10.0)]
        rho_max: f64,
        #[arg(long, default_value_t = 101)]
        steps: usize,
        #[arg(long, value_enum, default_value = "csv")]
        format: OutputFormat,
    },
    /// Write F_c and its leading asymptote on [0, 10] (1000 points) to a file.
    Figure {
        #[arg(long, value_parser = parse_m, allow_hyphen_values = true)]
        m: AzimuthalNumber,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: OutputFormat,
    },
    /// Zeeman factor g(m).
    G {
        #[arg(long, value_parser = parse_m, allow_hyphen_values = true)]
        m: AzimuthalNumber,
        /// Absolute tolerance, in [1e-10, 1e-2].
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, value_enum, default_value = "csv")]
        format: OutputFormat,
    },
    /// Electronic period T_e of a lower surface.
    Te {
        /// parabolic-cone:a=<a> | vee:depth=<d>,width=<w> | file:<path>
        #[arg(long)]
        potential: String,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, value_enum, default_value = "csv")]
        format: OutputFormat,
    },
    /// Zeeman splitting M^(-1/6) g(m) B / T_e.
    Zeeman {
        #[arg(long, value_parser = parse_m, allow_hyphen_values = true)]
        m: AzimuthalNumber,
        /// Mass ratio M.
        #[arg(long = "mass-ratio")]
        mass_ratio: f64,
        /// Gap parameter B in atomic units.
        #[arg(long)]
        field: f64,
        /// Electronic period; computed from --potential when absent.
        #[arg(long, conflicts_with = "potential", required_unless_present = "potential")]
        te: Option<f64>,
        #[arg(long)]
        potential: Option<String>,
        /// Use this g instead of computing g(m).
        #[arg(long, allow_hyphen_values = true)]
        g: Option<f64>,
        #[arg(long, value_enum, default_value = "csv")]
        format: OutputFormat,
    },
    /// Run the built-in consistency checks.
    Check,
}

/// What a command produced.
#[derive(Debug)]
pub struct Outcome {
    pub stdout: String,
    pub success: bool,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Self {
            stdout,
            success: true,
        }
    }
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Eval {
            m,
            rho_min,
            rho_max,
            steps,
            format,
        } => {
            let t = eval_table(*m, *rho_min, *rho_max, *steps)?;
            Ok(Outcome::ok(t.render((*format).into())))
        }
        Command::Figure { m, out, format } => {
            let t = figure_table(*m)?;
            std::fs::write(out, t.render((*format).into())).map_err(|e| {
                Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", out.display())))
            })?;
            Ok(Outcome::ok(String::new()))
        }
        Command::G { m, tol, format } => {
            let f = ConicFunction::new(*m, &ConicConfig::from_env())?;
            let g = g_factor_with(&f, *tol)?;
            let mut t = Table::new(vec!["m", "value", "error", "tail_bound", "rho_max"]);
            t.push(vec![
                Cell::Text(m.to_string()),
                Cell::Num(g.value),
                Cell::Num(g.quadrature_error),
                Cell::Num(g.tail_bound),
                Cell::Num(g.rho_max),
            ]);
            Ok(Outcome::ok(t.render((*format).into())))
        }
        Command::Te {
            potential,
            tol,
            format,
        } => {
            let curve = PotentialCurve::from_spec(potential)?;
            let te = electronic_period(&curve, *tol)?;
            let (a, b) = curve.turning_points();
            let mut t = Table::new(vec!["r_left", "r_right", "t_e"]);
            t.push(vec![Cell::Num(a), Cell::Num(b), Cell::Num(te)]);
            Ok(Outcome::ok(t.render((*format).into())))
        }
        Command::Zeeman {
            m,
            mass_ratio,
            field,
            te,
            potential,
            g,
            format,
        } => {
            let te = match (te, potential) {
                (Some(te), _) => *te,
                (None, Some(spec)) => electronic_period(&PotentialCurve::from_spec(spec)?, 1e-10)?,
                (None, None) => return Err(Error::Parse("give --te or --potential".into())),
            };
            let params = ZeemanParams::new(*mass_ratio, *field, te)?;
            let g = match g {
                Some(g) => *g,
                None => {
                    let f = ConicFunction::new(*m, &ConicConfig::from_env())?;
                    g_factor_with(&f, 1e-8)?.value
                }
            };
            let mut t = Table::new(vec!["m", "M", "B", "T_e", "delta_E"]);
            t.push(vec![
                Cell::Text(m.to_string()),
                Cell::Num(params.mass_ratio_m),
                Cell::Num(params.field_b),
                Cell::Num(params.t_e),
                Cell::Num(zeeman_splitting(*m, &params, g)),
            ]);
            Ok(Outcome::ok(t.render((*format).into())))
        }
        Command::Check => {
            let results = checks::run_all();
            let mut out = String::new();
            for r in &results {
                let tag = if r.passed { "PASS" } else { "FAIL" };
                out.push_str(&format!("{tag} {}: {}\n", r.name, r.detail));
            }
            let success = results.iter().all(|r| r.passed);
            Ok(Outcome { stdout: out, success })
        }
    }
}

pub fn eval_table(m: AzimuthalNumber, rho_min: f64, rho_max: f64, steps: usize) -> Result<Table> {
    if !(rho_min >= 0.0 && rho_min < rho_max && rho_max.is_finite()) {
        return Err(Error::Domain(format!(
            "need 0 <= rho_min < rho_max, got {rho_min}, {rho_max}"
        )));
    }
    if steps < 2 {
        return Err(Error::Domain(format!("need at least 2 steps, got {steps}")));
    }
    let f = ConicFunction::new(m, &ConicConfig::from_env())?;
    let mut t = Table::new(vec!["rho", "phi1", "phi2"]);
    for i in 0..steps {
        let rho = rho_min + (rho_max - rho_min) * i as f64 / (steps - 1) as f64;
        let s = f.eval(rho)?;
        t.push(vec![Cell::Num(rho), Cell::Num(s.phi1), Cell::Num(s.phi2)]);
    }
    Ok(t)
}

/// 1000 points on [0, 10]; the asymptote columns are empty below ρ = 0.5.
pub fn figure_table(m: AzimuthalNumber) -> Result<Table> {
    let f = ConicFunction::new(m, &ConicConfig::from_env())?;
    let mut t = Table::new(vec!["rho", "phi1", "phi2", "asym1", "asym2"]);
    for i in 0..1000 {
        let rho = 10.0 * i as f64 / 999.0;
        let s = f.eval(rho)?;
        let (a1, a2) = if rho >= 0.5 {
            let a = leading_asymptote(m, rho)?;
            (Cell::Num(a.phi1), Cell::Num(a.phi2))
        } else {
            (Cell::Empty, Cell::Empty)
        };
        t.push(vec![Cell::Num(rho), Cell::Num(s.phi1), Cell::Num(s.phi2), a1, a2]);
    }
    Ok(t)
}
