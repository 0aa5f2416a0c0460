//! Argument parsing, the resolved run configuration and output plumbing.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use knalg::exactnum::HalfInteger;
use knalg::geometry::{CycleClass, Geometry, MarkedSphere};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("cannot write output: {0}")]
    Output(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Output(_) => 2,
            CliError::Verification(_) => 3,
        }
    }
}

/// Shorthand for turning library errors into configuration errors.
pub fn config_err(e: impl std::fmt::Display) -> CliError {
    CliError::Config(e.to_string())
}

pub const DEFAULT_SEED: u64 = 20240601;

#[derive(Debug, Parser)]
#[command(name = "knalg", version, about = "Exact Krichever–Novikov algebras on the N-point Riemann sphere")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Geometry JSON: {"in_points": [...], "projective_connection": "...", "affine_connection": "..."}.
    /// Defaults to the classical sphere with in-point 0.
    #[arg(long, global = true, value_name = "FILE")]
    pub geometry: Option<PathBuf>,
    /// Weight λ (integer or half-integer such as 1/2).
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub lambda: Option<String>,
    /// Second weight ν.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub nu: Option<String>,
    /// Degree window LO:HI.
    #[arg(long, global = true, allow_hyphen_values = true, value_name = "LO:HI")]
    pub window: Option<String>,
    /// Cycle multiplicities m1,m2,… (default: the separating cycle).
    #[arg(long, global = true, allow_hyphen_values = true, value_name = "M1,M2,…")]
    pub cycle: Option<String>,
    /// Output file (default: stdout).
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Seed for randomized suites.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads.
    #[arg(long, global = true, env = "KNALG_JOBS")]
    pub jobs: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Op {
    Bracket,
    Product,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Basis elements f^λ_{n,p} with their factorization data.
    Basis,
    /// KN pairing table ⟨f^λ_{n,p}, f^{1−λ}_{−m,r}⟩.
    Pairing,
    /// Structure constants of f^λ_{n,p} ⋆ f^ν_{m,r}.
    Structconsts {
        #[arg(long, value_enum, default_value_t = Op::Bracket)]
        op: Op,
    },
    /// Values of a geometric cocycle on basis pairs.
    Cocycle {
        /// psi1 | psi2 | psi3 | psi4 | phi
        #[arg(long)]
        kind: String,
        /// Finite-dimensional Lie algebra for psi2 (name such as sl2, or a JSON file).
        #[arg(long, default_value = "sl2")]
        algebra: String,
    },
    /// Certify a cocycle and tabulate the central terms of the extension.
    Extend {
        #[arg(long)]
        kind: String,
        #[arg(long, default_value = "sl2")]
        algebra: String,
        /// Factor applied to the cocycle: a scalar, or "virasoro" for −1/12.
        #[arg(long, allow_hyphen_values = true)]
        rescale: Option<String>,
    },
    /// Regularized b–c action on wedge forms and extracted central scalars.
    Fock {
        /// Vacuum degree T (default λ).
        #[arg(long, allow_hyphen_values = true)]
        vacuum: Option<String>,
        /// Vector-field part of the operator, as an expression in z.
        #[arg(long, allow_hyphen_values = true)]
        vector: Option<String>,
        /// Function part of the operator, as an expression in z.
        #[arg(long, allow_hyphen_values = true)]
        function: Option<String>,
    },
    /// Lax operator algebras with Tyurin data.
    Lax {
        #[command(subcommand)]
        action: LaxAction,
    },
    /// Run the invariant suite on the geometry.
    Verify,
}

#[derive(Debug, Subcommand)]
pub enum LaxAction {
    /// Membership report for a matrix of rational functions.
    Check {
        /// gl<n> | sl<n> | so<n> | sp<2n>; overrides the type in the Tyurin file.
        #[arg(long = "type")]
        kind: Option<String>,
        /// Tyurin data JSON: {"type": "gl2", "points": [{"gamma": "3", "alpha": ["1","0"]}]}.
        #[arg(long, value_name = "FILE")]
        tyurin: PathBuf,
        /// Element JSON: {"entries": [["...", "..."], ...]}.
        #[arg(long, value_name = "FILE")]
        element: PathBuf,
    },
    /// Randomized closure certification.
    CloseCheck {
        #[arg(long = "type")]
        kind: String,
        #[arg(long, default_value_t = 20)]
        pairs: usize,
    },
}

/// Flags after parsing and validation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub geometry: Geometry,
    pub lambda: Option<HalfInteger>,
    pub nu: Option<HalfInteger>,
    pub window: Option<(i64, i64)>,
    pub cycle: Option<CycleClass>,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub seed: u64,
}

fn parse_weight(flag: &str, s: &Option<String>) -> Result<Option<HalfInteger>, CliError> {
    s.as_deref()
        .map(|v| {
            v.parse::<HalfInteger>()
                .map_err(|_| CliError::Config(format!("--{flag} {v:?} is not an integer or half-integer")))
        })
        .transpose()
}

pub fn parse_window(s: &str) -> Result<(i64, i64), CliError> {
    let bad = || CliError::Config(format!("--window {s:?} must be LO:HI with integers LO ≤ HI"));
    let (lo, hi) = s.split_once(':').ok_or_else(bad)?;
    let lo: i64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: i64 = hi.trim().parse().map_err(|_| bad())?;
    if lo > hi {
        return Err(bad());
    }
    Ok((lo, hi))
}

impl GlobalArgs {
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let geometry = match &self.geometry {
            Some(path) => Geometry::from_json_file(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?,
            None => Geometry::with_default_connections(MarkedSphere::classical()),
        };
        let cycle = self
            .cycle
            .as_deref()
            .map(|s| {
                let ms = s
                    .split(',')
                    .map(|t| t.trim().parse::<i64>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|_| CliError::Config(format!("--cycle {s:?} must be comma-separated integers")))?;
                CycleClass::new(&geometry.sphere, ms).map_err(config_err)
            })
            .transpose()?;
        Ok(RunConfig {
            lambda: parse_weight("lambda", &self.lambda)?,
            nu: parse_weight("nu", &self.nu)?,
            window: self.window.as_deref().map(parse_window).transpose()?,
            cycle,
            out: self.out.clone(),
            format: self.format,
            seed: self.seed.unwrap_or(DEFAULT_SEED),
            geometry,
        })
    }
}

impl RunConfig {
    pub fn window_or(&self, lo: i64, hi: i64) -> (i64, i64) {
        self.window.unwrap_or((lo, hi))
    }

    pub fn sphere(&self) -> &MarkedSphere {
        &self.geometry.sphere
    }

    /// Writes JSON or CSV to `--out` or stdout.
    pub fn emit(&self, json: &serde_json::Value, csv: String) -> Result<(), CliError> {
        let mut text = match self.format {
            Format::Json => serde_json::to_string_pretty(json).expect("serializable"),
            Format::Csv => csv,
        };
        if !text.ends_with('\n') {
            text.push('\n');
        }
        match &self.out {
            Some(path) => fs::write(path, text)?,
            None => std::io::stdout().lock().write_all(text.as_bytes())?,
        }
        Ok(())
    }
}

/// Joins CSV fields, quoting those that contain separators.
pub fn csv_row(fields: &[String]) -> String {
    let quoted: Vec<String> = fields
        .iter()
        .map(|f| {
            if f.contains([',', '"', '\n']) {
                format!("\"{}\"", f.replace('"', "\"\""))
            } else {
                f.clone()
            }
        })
        .collect();
    quoted.join(",") + "\n"
}
