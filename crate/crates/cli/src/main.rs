mod limits;
mod scan;
mod setup;
mod tables;
mod threshold;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ionscatter_core::Error;

#[derive(Parser)]
#[command(
    name = "ionscatter",
    version,
    about = "Raman and Rayleigh scattering error budgets for trapped-ion qubits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Gate errors, Lamb-Dicke factor and required power over a detuning grid, as CSV.
    Scan(ScanArgs),
    /// Qubit and gate characteristics for all species, beside reference values.
    Tables(TablesArgs),
    /// Detuning at which a gate's Raman error reaches a target.
    Threshold(ThresholdArgs),
    /// Elastic cross-section checks against the Thomson and Rayleigh limits.
    Limits(LimitsArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum EncodingArg {
    G,
    M,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GateArg {
    #[value(name = "1q")]
    One,
    #[value(name = "2q")]
    Two,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Full,
    Simplified,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OnOff {
    On,
    Off,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum EtaArg {
    Eq,
    Table2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SideArg {
    Red,
    Blue,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RelativeTo {
    /// g qubits: red detunings from P1/2, blue from P3/2. m qubits: P3/2.
    Auto,
    /// Everything from the P3/2 line.
    P32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TableArg {
    Table1,
    Table2,
}

/// Physics settings shared by every subcommand that evaluates gates.
#[derive(Args, Clone, Debug)]
pub struct Common {
    /// Built-in species name (e.g. Ca43) or path to a species JSON file.
    #[arg(long)]
    pub species: String,
    #[arg(long, value_enum, default_value = "g")]
    pub encoding: EncodingArg,
    #[arg(long, value_enum, default_value = "2q")]
    pub gate: GateArg,
    #[arg(long, value_enum, default_value = "full")]
    pub model: ModelArg,
    #[arg(long, value_enum, default_value = "on")]
    pub higher_levels: OnOff,
    #[arg(long, value_enum, default_value = "eq")]
    pub eta_convention: EtaArg,
    /// Axial trap frequency, MHz.
    #[arg(long, default_value_t = 5.0)]
    pub trap_mhz: f64,
    /// Gaussian beam waist, µm.
    #[arg(long, default_value_t = 20.0)]
    pub waist_um: f64,
    /// Gate duration the power columns are solved for, µs.
    #[arg(long, default_value_t = 10.0)]
    pub gate_time_us: f64,
}

#[derive(Args)]
struct ScanArgs {
    #[command(flatten)]
    common: Common,
    /// First grid detuning /2π, THz.
    #[arg(long, allow_negative_numbers = true)]
    from_thz: f64,
    /// Last grid detuning /2π, THz.
    #[arg(long, allow_negative_numbers = true)]
    to_thz: f64,
    #[arg(long, default_value_t = 201)]
    points: usize,
    #[arg(long, value_enum, default_value = "auto")]
    relative_to: RelativeTo,
    /// Power of each Raman beam used for the tau_2q_us column, W.
    #[arg(long, default_value_t = 1.0)]
    beam_power_w: f64,
    /// Output CSV path; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TablesArgs {
    #[arg(value_enum)]
    which: TableArg,
    /// Comma-separated species; all built-ins when absent.
    #[arg(long, value_delimiter = ',')]
    species: Vec<String>,
    #[arg(long, value_enum, default_value = "eq")]
    eta_convention: EtaArg,
    #[arg(long, default_value_t = 5.0)]
    trap_mhz: f64,
    #[arg(long, default_value_t = 20.0)]
    waist_um: f64,
    #[arg(long, default_value_t = 10.0)]
    gate_time_us: f64,
    /// Also write the table as CSV.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ThresholdArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 1e-4)]
    target: f64,
    #[arg(long, value_enum, default_value = "red")]
    side: SideArg,
}

#[derive(Args)]
struct LimitsArgs {
    /// Comma-separated species; all built-ins when absent.
    #[arg(long, value_delimiter = ',')]
    species: Vec<String>,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NoSolution { .. } => 3,
        Error::Io(_) => 4,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.command {
        Command::Scan(a) => scan::run(
            &a.common,
            a.from_thz,
            a.to_thz,
            a.points,
            a.relative_to,
            a.beam_power_w,
            a.out.as_deref(),
        ),
        Command::Tables(a) => tables::run(
            a.which,
            &a.species,
            &tables::Settings {
                eta: a.eta_convention,
                trap_mhz: a.trap_mhz,
                waist_um: a.waist_um,
                gate_time_us: a.gate_time_us,
            },
            a.out.as_deref(),
        ),
        Command::Threshold(a) => threshold::run(&a.common, a.target, a.side),
        Command::Limits(a) => limits::run(&a.species),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
