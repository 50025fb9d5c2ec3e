//! `fockdyn`: reproducible experiments on identical particles in linear optics.
//!
//! Exit codes: 0 success, 2 argument error, 3 numerical-contract violation,
//! 1 I/O failure.

mod commands;
mod render;

use std::io::{IsTerminal, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::commands::CliError;

#[derive(Parser, Debug)]
#[command(name = "fockdyn", version, about = "Identical particles through beamsplitters and measurements")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[arg(long, value_enum, default_value_t = Format::Table, global = true)]
    format: Format,

    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Csv,
    Json,
}

impl Format {
    fn name(self) -> &'static str {
        match self {
            Format::Table => "table",
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Where the single-particle unitary comes from. Without any of these the
/// command's default applies.
#[derive(Args, Debug, Clone)]
pub struct UnitarySource {
    /// JSON unitary `{n, rows: [[[re, im], ...], ...]}`.
    #[arg(long, conflicts_with_all = ["fourier", "t", "r"])]
    pub matrix: Option<PathBuf>,

    /// Discrete Fourier transform on this many modes.
    #[arg(long, conflicts_with_all = ["t", "r"])]
    pub fourier: Option<usize>,

    /// Beamsplitter transmission amplitude.
    #[arg(long)]
    pub t: Option<f64>,

    /// Beamsplitter reflection amplitude.
    #[arg(long)]
    pub r: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Two-mode output statistics behind a beamsplitter.
    Hom {
        #[arg(long)]
        t: Option<f64>,
        #[arg(long)]
        r: Option<f64>,
        /// Input occupation, e.g. `1,1`.
        #[arg(long)]
        input: String,
    },
    /// One transition amplitude between occupation vectors.
    Amplitude {
        #[arg(long)]
        input: String,
        /// Output occupation.
        #[arg(long)]
        to: String,
        #[arg(long, value_enum, default_value_t = Kind::Boson)]
        kind: Kind,
        #[command(flatten)]
        unitary: UnitarySource,
    },
    /// Bunching enhancement of bosons from distinct modes into one mode.
    Bunching {
        /// Distinct input modes, e.g. `0,1,2`.
        #[arg(long)]
        inputs: String,
        #[arg(long, default_value_t = 0)]
        target: usize,
        #[command(flatten)]
        unitary: UnitarySource,
    },
    /// Iterate the same/diff transfer matrix of two bosons.
    Thermalize {
        #[arg(long)]
        steps: usize,
        /// Initial `(P_same, P_diff)`.
        #[arg(long, default_value = "0,1")]
        initial: String,
        #[arg(long, default_value_t = 2)]
        modes: usize,
        #[command(flatten)]
        unitary: UnitarySource,
    },
    /// Fixed point of a phase step followed by dephasing in a second basis.
    Fixedpoint {
        #[arg(long)]
        dim: usize,
        /// One phase per level, e.g. `0,1.0`.
        #[arg(long, allow_hyphen_values = true)]
        phases: String,
        #[arg(long, value_enum, default_value_t = DephasingBasis::Fourier)]
        basis: DephasingBasis,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Boson,
    Fermion,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum DephasingBasis {
    Fourier,
    Identity,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let result = match cli.command {
        Command::Hom { t, r, input } => commands::hom(t, r, &input)?,
        Command::Amplitude { input, to, kind, unitary } => commands::amplitude(&input, &to, kind, &unitary)?,
        Command::Bunching { inputs, target, unitary } => commands::bunching(&inputs, target, &unitary)?,
        Command::Thermalize { steps, initial, modes, unitary } => {
            commands::thermalize(steps, &initial, modes, &unitary)?
        }
        Command::Fixedpoint { dim, phases, basis } => commands::fixedpoint(dim, &phases, basis)?,
    };

    let mut config = result.config;
    config["format"] = cli.format.name().into();
    config["output"] = cli.output.as_ref().map(|p| p.display().to_string()).into();
    eprintln!("config: {config}");

    let text = match cli.format {
        Format::Table => {
            let styled = cli.output.is_none()
                && std::env::var_os("NO_COLOR").is_none()
                && std::io::stdout().is_terminal();
            result.table.render(styled)
        }
        Format::Csv => result.csv,
        Format::Json => render::json(&serde_json::json!({ "config": config, "result": result.json })),
    };
    match cli.output {
        Some(path) => std::fs::write(&path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(e.to_string())),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
