//! Argument parsing and dispatch.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};

use crate::commands::{self, FitMode};
use crate::config::RunConfig;
use crate::error::CliResult;

#[derive(Debug, Parser)]
#[command(name = "lzsm", version, about = "Driven charge-qubit interferometry: simulate, transform, fit, render")]
pub struct Cli {
    /// JSON run configuration; defaults apply when absent.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output file. Reports go to stdout when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long, global = true, value_name = "INT")]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Lineshape,
    T1,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Phase map (grid CSV + sidecar) from the configured model.
    Simulate {
        /// Write an adiabatic gate-voltage lineshape instead of a map.
        #[arg(long)]
        lineshape: bool,
    },
    /// 2-D spectrum of a phase map and the T2 decay fit.
    Fft { input: PathBuf },
    /// Fit a lineshape (delta_c, v_g0, scale) or a map (T1).
    Fit {
        input: PathBuf,
        #[arg(long, value_enum)]
        mode: ModeArg,
    },
    /// Closed form against the time-domain Bloch integration.
    CompareOracle {
        /// Truncate the photon sum of the closed form (negative control).
        #[arg(long, value_name = "N")]
        n_max: Option<usize>,
    },
    /// 8-bit PGM heatmap of a grid file.
    Render { input: PathBuf },
    /// Driving regime from f_mw and T2.
    Classify {
        /// GHz; defaults to the config drive frequency.
        #[arg(long, value_name = "GHZ")]
        f_mw: Option<f64>,
        /// ps; defaults to the config T2.
        #[arg(long, value_name = "PS")]
        t2: Option<f64>,
    },
}

pub fn dispatch(cli: &Cli) -> CliResult<()> {
    let mut cfg = RunConfig::load(cli.config.as_deref())?;
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Simulate { lineshape } => commands::cmd_simulate(&cfg, out, *lineshape),
        Command::Fft { input } => commands::cmd_fft(&cfg, input, out),
        Command::Fit { input, mode } => {
            let mode = match mode {
                ModeArg::Lineshape => FitMode::Lineshape,
                ModeArg::T1 => FitMode::T1,
            };
            commands::cmd_fit(&cfg, input, mode, out)
        }
        Command::CompareOracle { n_max } => commands::cmd_compare_oracle(&cfg, *n_max, out),
        Command::Render { input } => commands::cmd_render(input, out),
        Command::Classify { f_mw, t2 } => commands::cmd_classify(&cfg, *f_mw, *t2, out),
    }
}

/// Parse, run, report; returns the process exit code.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
        }
    };
    match dispatch(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
