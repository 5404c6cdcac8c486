mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ferriq::ffft::MomentumPairing;
use ferriq::perm::{AGroupMode, CascadeMode, CompileOptions, Strategy, DEFAULT_EXACT_THRESHOLD};
use ferriq::syk::RoundLayout;
use serde::Serialize;

/// Compiles fermionic circuits to qubits with dynamically reordered
/// Jordan-Wigner encodings.
///
/// Exit codes: 0 success, 1 I/O error, 2 invalid input or exceeded cap,
/// 3 a requested verification failed.
#[derive(Parser)]
#[command(name = "ferriq", version)]
struct Cli {
    /// Worker threads for parallel stages; defaults to one per core.
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(1..))]
    jobs: Option<u32>,
    /// Largest qubit count simulated densely; overrides FERRIQ_ORACLE_CAP.
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(1..))]
    oracle_cap: Option<u32>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compile the fermionic permutation of a list of mode images.
    CompilePerm(PermArgs),
    /// Compile a Majorana permutation given as images of all 2N Majoranas.
    CompileMperm(PermArgs),
    /// Build the fermionic fast Fourier transform on 2^n modes (or 2^n × 2^n).
    CompileFfft(FfftArgs),
    /// Compile a momentum-pairing reordering of an L × L grid.
    CompilePairing(PairingArgs),
    /// Sample, compile and analyze SYK models.
    #[command(subcommand)]
    Syk(SykCommand),
    /// Print cost tables as CSV.
    Tables(TablesArgs),
    /// Check a circuit file against the encodings it should map between.
    Verify(VerifyArgs),
}

#[derive(Subcommand)]
enum SykCommand {
    /// Write a sampled instance as JSON.
    Sample(SykSampleArgs),
    /// Compile one Trotter cycle.
    Compile(SykCompileArgs),
    /// Disorder-averaged spectral form factor as CSV (t, mean, stderr).
    Sff(SykSffArgs),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Args, Serialize)]
struct OutputArgs {
    /// Output file, written atomically; stdout when omitted.
    #[arg(long, short)]
    #[serde(skip)]
    out: Option<PathBuf>,
    /// Artifact format; the per-command default applies when omitted.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, Debug, Default, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum StrategyArg {
    #[default]
    Auto,
    Mergesort,
    Structured,
    Fswap,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Auto => Strategy::Auto,
            StrategyArg::Mergesort => Strategy::Mergesort,
            StrategyArg::Structured => Strategy::Structured,
            StrategyArg::Fswap => Strategy::Fswap,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum CascadeArg {
    #[default]
    ConstantDepth,
    Serial,
}

#[derive(Clone, Copy, Debug, Default, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum AGroupArg {
    #[default]
    SecondaryCascade,
    DirectCz,
}

#[derive(Args, Clone, Serialize)]
struct CircuitFlags {
    /// CNOT cascade realization.
    #[arg(long, value_enum, default_value_t)]
    cascade: CascadeArg,
    /// Coupling of A modes that share one B partner.
    #[arg(long, value_enum, default_value_t)]
    a_group: AGroupArg,
    /// Largest row count solved exactly when planning ancilla CZ circuits.
    #[arg(long, default_value_t = DEFAULT_EXACT_THRESHOLD)]
    exact_threshold: usize,
}

impl CircuitFlags {
    fn options(&self) -> CompileOptions {
        CompileOptions {
            cascade: match self.cascade {
                CascadeArg::ConstantDepth => CascadeMode::ConstantDepth,
                CascadeArg::Serial => CascadeMode::Serial,
            },
            a_group: match self.a_group {
                AGroupArg::SecondaryCascade => AGroupMode::SecondaryCascade,
                AGroupArg::DirectCz => AGroupMode::DirectCz,
            },
            exact_threshold: self.exact_threshold,
        }
    }
}

#[derive(Args, Serialize)]
struct PermArgs {
    /// Comma-separated images, e.g. "1,0".
    #[arg(long)]
    perm: String,
    #[arg(long, value_enum, default_value_t)]
    strategy: StrategyArg,
    #[command(flatten)]
    circuit: CircuitFlags,
    /// Check the Majorana action symbolically; exit 3 on mismatch.
    #[arg(long)]
    verify: bool,
    /// Replace free relabelings by explicit SWAP gates.
    #[arg(long)]
    materialize_swaps: bool,
    /// Recorded in the artifact.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Serialize)]
struct FfftArgs {
    /// log2 of the modes per dimension.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=20))]
    n: u32,
    /// 1 for a chain, 2 for a square grid.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
    dim: u8,
    /// Check the k-particle sector against the discrete Fourier transform; exit 3 on mismatch.
    #[arg(long)]
    verify_sector: Option<usize>,
    #[command(flatten)]
    circuit: CircuitFlags,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum PairingArg {
    KxNegate,
    FullKNegate,
    SpinSplit,
}

impl From<PairingArg> for MomentumPairing {
    fn from(p: PairingArg) -> Self {
        match p {
            PairingArg::KxNegate => MomentumPairing::KxNegate,
            PairingArg::FullKNegate => MomentumPairing::FullKNegate,
            PairingArg::SpinSplit => MomentumPairing::SpinSplit,
        }
    }
}

#[derive(Args, Serialize)]
struct PairingArgs {
    /// Grid side.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    l: u32,
    #[arg(long, value_enum)]
    kind: PairingArg,
    #[arg(long)]
    verify: bool,
    #[command(flatten)]
    circuit: CircuitFlags,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Clone, Copy, Debug, Default, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum ModelArg {
    #[default]
    Sparse,
    Complete,
    Interleave,
}

#[derive(Clone, Copy, Debug, Default, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum LayoutArg {
    #[default]
    Blocks,
    Chain,
}

impl From<LayoutArg> for RoundLayout {
    fn from(l: LayoutArg) -> Self {
        match l {
            LayoutArg::Blocks => RoundLayout::Blocks,
            LayoutArg::Chain => RoundLayout::Chain,
        }
    }
}

#[derive(Args, Serialize)]
struct ModelArgs {
    #[arg(long, value_enum, default_value_t)]
    model: ModelArg,
    /// Majorana count.
    #[arg(long)]
    n: usize,
    /// Interactions per Majorana (sparse model).
    #[arg(long, default_value_t = 4)]
    d: usize,
    /// Keep quadruples independently instead of stacking perfect matchings (sparse model).
    #[arg(long)]
    erdos_renyi: bool,
    /// Interleave rounds (interleave model).
    #[arg(long, default_value_t = 1)]
    rounds: usize,
    /// Slot grouping of an interleave round.
    #[arg(long, value_enum, default_value_t)]
    layout: LayoutArg,
    /// Coupling scale J.
    #[arg(long, default_value_t = 1.0)]
    j: f64,
    /// Seed of the (first) instance.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Serialize)]
struct SykSampleArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Serialize)]
struct SykCompileArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Trotter step.
    #[arg(long, default_value_t = 0.1)]
    dt: f64,
    /// Leave the last class frame in place instead of returning to the input encoding.
    #[arg(long)]
    open_frame: bool,
    #[arg(long, value_enum, default_value_t)]
    strategy: StrategyArg,
    #[command(flatten)]
    circuit: CircuitFlags,
    /// Compare every measurement branch with the dense product of exponentials; exit 3 on mismatch.
    #[arg(long)]
    verify: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Serialize)]
struct SykSffArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Disorder instances, seeded consecutively from --seed.
    #[arg(long, default_value_t = 50, value_parser = clap::value_parser!(u64).range(1..))]
    instances: u64,
    #[arg(long, default_value_t = 0.1)]
    tmin: f64,
    #[arg(long, default_value_t = 1000.0)]
    tmax: f64,
    /// Log-spaced time points.
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(2..))]
    points: u64,
    /// Inverse temperature.
    #[arg(long, default_value_t = 0.0)]
    beta: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum TableArg {
    /// Two-qubit gates per qubit of transforms and reflections on L × L grids.
    Table1Asymptotics,
    /// CCZ count of one transform layer and its per-mode value.
    S1Ccz,
    /// Interleave cost of the transform, FSWAP network versus dynamic encoding, divided by 3.
    S2Interleave,
}

#[derive(Args, Serialize)]
struct TablesArgs {
    #[arg(long, value_enum)]
    which: TableArg,
    /// Rows up to 2^n-max modes (grid side 2^n-max for the asymptotic table).
    #[arg(long)]
    n_max: Option<u32>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Serialize)]
struct VerifyArgs {
    /// Circuit JSON, either bare or inside a compile artifact.
    circuit: PathBuf,
    /// Input encoding as positions of each mode; identity when omitted.
    #[arg(long)]
    m0: Option<String>,
    /// Output encoding as positions of each mode.
    #[arg(long, conflicts_with = "majorana")]
    m1: Option<String>,
    /// Expected Majorana images instead of an output encoding.
    #[arg(long)]
    majorana: Option<String>,
    #[command(flatten)]
    output: OutputArgs,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(cap) = cli.oracle_cap {
        std::env::set_var("FERRIQ_ORACLE_CAP", cap.to_string());
    }
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs as usize).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
