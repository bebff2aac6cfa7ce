//! Command-line front end.

mod commands;
pub mod config;
mod output;

use std::io::Write;
use std::path::PathBuf;

use anyhow::Result;
use clap::{ArgGroup, Args, Parser, Subcommand};
use rydmagic::atomdata::LevelKey;
use rydmagic::heating::TrapFrequencyUnit;
use rydmagic::units::RB87_MASS_AMU;

use config::{parse_label, parse_tail, OutputFormat, RunConfig};

#[derive(Debug, Parser)]
#[command(
    name = "rydmagic",
    version,
    about = "Dynamic polarizabilities, magic frequencies, transition coincidences and release heating",
    allow_negative_numbers = true
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

/// Settings shared by all subcommands. Each also reads `RYDMAGIC_<KEY>`
/// from the environment and `key = value` lines from `--config`.
#[derive(Debug, Default, Args)]
pub struct GlobalArgs {
    /// Level table (CSV). Defaults to the bundled Rb data.
    #[arg(long, global = true, value_name = "PATH")]
    pub levels: Option<PathBuf>,
    /// Reduced dipole table (CSV).
    #[arg(long, global = true, value_name = "PATH")]
    pub dipoles: Option<PathBuf>,
    /// key = value file.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,
    /// Unit of ω arguments: au, hz, rad/s or nm.
    #[arg(long, global = true, value_name = "UNIT")]
    pub omega_unit: Option<String>,
    /// Highest n of intermediate p levels.
    #[arg(long, global = true)]
    pub n_max: Option<u32>,
    /// Core polarizability, a₀³.
    #[arg(long, global = true)]
    pub core_alpha: Option<f64>,
    /// Relative uncertainty of the core polarizability.
    #[arg(long, global = true)]
    pub core_unc: Option<f64>,
    /// Tail constant of the dataset ground state, a₀³.
    #[arg(long, global = true)]
    pub ground_tail: Option<f64>,
    /// Tail constant for a target, e.g. 15s1/2=-0.4. Repeatable.
    #[arg(long, global = true, value_name = "LABEL=V", value_parser = tail_arg)]
    pub tail: Vec<(LevelKey, f64)>,
    /// Half-width of the resonance exclusion windows, a.u.
    #[arg(long, global = true)]
    pub exclusion_halfwidth: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate α(ω) of one state over a frequency grid.
    Scan(ScanArgs),
    /// Find frequencies where two polarizabilities agree.
    Magic(MagicArgs),
    /// Find zero crossings of α(ω); same as `magic --zero`.
    Zero(ZeroArgs),
    /// Term-by-term contributions at one frequency.
    Breakdown(BreakdownArgs),
    /// Level pairs whose gap nearly equals a reference transition.
    Coincide(CoincideArgs),
    /// Heating from switching the trap off for a gate time.
    Heat(HeatArgs),
    /// Convert a frequency, polarizability or energy between units.
    Convert(ConvertArgs),
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[arg(long, value_parser = label_arg)]
    pub state: LevelKey,
    /// A:B in the --omega-unit unit.
    #[arg(long, value_name = "A:B", value_parser = range_arg)]
    pub omega: (f64, f64),
    /// Grid step, same unit as --omega.
    #[arg(long, conflicts_with = "count")]
    pub step: Option<f64>,
    /// Number of grid points (default 101).
    #[arg(long)]
    pub count: Option<usize>,
    /// Evaluate inside exclusion windows too; such rows stay flagged.
    #[arg(long)]
    pub allow_excluded: bool,
}

#[derive(Debug, Args)]
pub struct SolverArgs {
    /// Search range A:B in the --omega-unit unit. Defaults to the gap
    /// between the two lowest ground-state resonances.
    #[arg(long, value_name = "A:B", value_parser = range_arg)]
    pub omega: Option<(f64, f64)>,
    /// Sign-change scan step, a.u.
    #[arg(long)]
    pub scan_step: Option<f64>,
    /// Bracket half-width tolerance, a.u.
    #[arg(long)]
    pub omega_tol: Option<f64>,
    /// Residual tolerance, a₀³.
    #[arg(long)]
    pub alpha_tol: Option<f64>,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("partner").args(["rydberg", "zero", "free_electron"])))]
pub struct MagicArgs {
    /// Defaults to the dataset ground state.
    #[arg(long, value_parser = label_arg)]
    pub ground: Option<LevelKey>,
    #[arg(long, value_parser = label_arg)]
    pub rydberg: Option<LevelKey>,
    /// Match against α = 0.
    #[arg(long)]
    pub zero: bool,
    /// Match against the free-electron value −1/ω².
    #[arg(long)]
    pub free_electron: bool,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug, Args)]
pub struct ZeroArgs {
    #[arg(long, value_parser = label_arg)]
    pub ground: Option<LevelKey>,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug, Args)]
pub struct BreakdownArgs {
    #[arg(long, value_parser = label_arg)]
    pub state: LevelKey,
    /// Frequency in the --omega-unit unit.
    #[arg(long)]
    pub omega: f64,
    /// CSV with columns np,d_au,delta_e_au used instead of the dataset.
    #[arg(long, value_name = "PATH")]
    pub terms: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CoincideArgs {
    /// Reference transition, e.g. 5s1/2:5p3/2.
    #[arg(long, value_name = "A:B", value_parser = pair_arg)]
    pub pair: (LevelKey, LevelKey),
    /// Largest accepted mismatch, cm⁻¹.
    #[arg(long, default_value_t = 100.0)]
    pub tol: f64,
    /// Include pairs that are not dipole-allowed.
    #[arg(long)]
    pub all_pairs: bool,
    /// One row per configuration pair (e.g. 6s-15p).
    #[arg(long)]
    pub by_configuration: bool,
}

#[derive(Debug, Args)]
pub struct HeatArgs {
    #[arg(long)]
    pub trap_freq: f64,
    /// hz or rad/s.
    #[arg(long, default_value = "rad/s")]
    pub unit: TrapFrequencyUnit,
    #[arg(long, default_value_t = RB87_MASS_AMU)]
    pub mass_amu: f64,
    /// Trap-off time, s.
    #[arg(long)]
    pub gate_time: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Quantity {
    Omega,
    Alpha,
    Energy,
}

#[derive(Debug, Args)]
pub struct ConvertArgs {
    pub value: f64,
    #[arg(long)]
    pub from: String,
    #[arg(long)]
    pub to: String,
    #[arg(long, value_enum, default_value = "omega")]
    pub kind: Quantity,
}

fn label_arg(s: &str) -> Result<LevelKey, String> {
    parse_label(s).map_err(|e| e.to_string())
}

fn tail_arg(s: &str) -> Result<(LevelKey, f64), String> {
    parse_tail(s).map_err(|e| e.to_string())
}

fn range_arg(s: &str) -> Result<(f64, f64), String> {
    let num = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|_| format!("'{t}' is not a number"))
    };
    match s.split_once(':') {
        Some((a, b)) => Ok((num(a)?, num(b)?)),
        None => Err(format!("expected A:B, got '{s}'")),
    }
}

fn pair_arg(s: &str) -> Result<(LevelKey, LevelKey), String> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| format!("expected LABEL:LABEL, got '{s}'"))?;
    Ok((label_arg(a)?, label_arg(b)?))
}

pub fn run<W: Write>(cli: Cli, out: &mut W) -> Result<()> {
    let cfg = RunConfig::resolve(&cli.global)?;
    match cli.command {
        Command::Scan(a) => commands::scan(&cfg, &a, out),
        Command::Magic(a) => commands::magic(&cfg, &a, out),
        Command::Zero(a) => {
            let a = MagicArgs {
                ground: a.ground,
                rydberg: None,
                zero: true,
                free_electron: false,
                solver: a.solver,
            };
            commands::magic(&cfg, &a, out)
        }
        Command::Breakdown(a) => commands::breakdown(&cfg, &a, out),
        Command::Coincide(a) => commands::coincide(&cfg, &a, out),
        Command::Heat(a) => commands::heat(&cfg, &a, out),
        Command::Convert(a) => commands::convert(&cfg, &a, out),
    }
}
