//! `fvault`: feature transformation, key binding and benchmarks from the
//! command line.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error,
//! 3 data or format error.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "fvault", version, about = "Unlinkable fuzzy vault toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate synthetic training and evaluation feature files.
    Synth(SynthArgs),
    /// Fit a quantiser on training features.
    FitQuantiser(FitArgs),
    /// Print the feature set of every sample.
    Transform(TransformArgs),
    /// Bind a fresh key to one sample and write the vault record.
    Enroll(EnrollArgs),
    /// Try to retrieve the key of a record with one probe sample.
    Verify(VerifyArgs),
    /// Compare binarisation schemes by EER and decidability.
    BenchBinarise(BenchBinariseArgs),
    /// Run a vault experiment over key lengths and decoders.
    BenchVault(BenchVaultArgs),
    /// Evaluate FAS, linkage probability or the correlation attack.
    SecurityReport(SecurityArgs),
    /// Validate a vault record and print its header.
    RecordInspect(InspectArgs),
}

#[derive(Args)]
struct SynthArgs {
    /// TOML file with the synthetic parameters; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    /// Evaluation subjects.
    #[arg(long)]
    subjects: Option<usize>,
    #[arg(long)]
    train_subjects: Option<usize>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    sigma_within: Option<f64>,
    #[arg(long)]
    sigma_between: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    train_out: PathBuf,
    #[arg(long)]
    eval_out: PathBuf,
}

#[derive(Args)]
struct FitArgs {
    /// Training features (refused if tagged `eval`).
    #[arg(long)]
    train: PathBuf,
    /// Intervals per element.
    #[arg(long, short)]
    d: u16,
    /// equal_probable or equal_size.
    #[arg(long, default_value = "equal_probable")]
    quantisation: String,
    /// Equal-size range as LO,HI.
    #[arg(long, value_delimiter = ',', num_args = 2, allow_negative_numbers = true, conflicts_with = "range_from_training")]
    range: Option<Vec<f64>>,
    /// Use the training minimum and maximum as the equal-size range.
    #[arg(long)]
    range_from_training: bool,
    /// Map constant elements to interval 0 instead of failing.
    #[arg(long)]
    allow_degenerate: bool,
    #[arg(long, short)]
    out: PathBuf,
}

#[derive(Args)]
struct TransformArgs {
    #[arg(long)]
    model: PathBuf,
    /// boolean, dbr, brgc, lssc or onehot.
    #[arg(long)]
    scheme: String,
    #[arg(long)]
    input: PathBuf,
    /// Print bit strings instead of sets.
    #[arg(long)]
    binary: bool,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SampleSel {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    subject: String,
    /// Sample id; defaults to the subject's first sample.
    #[arg(long)]
    sample: Option<String>,
}

#[derive(Args)]
struct EnrollArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    scheme: String,
    /// Number of key coefficients.
    #[arg(long, short)]
    k: u16,
    #[command(flatten)]
    sel: SampleSel,
    #[arg(long, short)]
    out: PathBuf,
    /// Seed for the key and blinding polynomial; random if absent.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "")]
    salt: String,
    #[arg(long)]
    no_bijection: bool,
    #[arg(long)]
    no_degree_hiding: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    record: PathBuf,
    #[command(flatten)]
    sel: SampleSel,
    /// lg, rs or gs.
    #[arg(long, default_value = "gs")]
    decoder: String,
    #[arg(long)]
    multiplicity: Option<u32>,
    #[arg(long)]
    iterations: Option<u64>,
    /// Pairs per iteration; all pairs if absent.
    #[arg(long)]
    subset: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "")]
    salt: String,
    #[arg(long)]
    no_bijection: bool,
}

#[derive(Args)]
struct DataArgs {
    /// Training features; with --eval, replaces any synthetic source.
    #[arg(long, requires = "eval")]
    train: Option<PathBuf>,
    #[arg(long, requires = "train")]
    eval: Option<PathBuf>,
}

#[derive(Args)]
struct BenchBinariseArgs {
    #[command(flatten)]
    data: DataArgs,
    /// TOML grid; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Synthetic source as TOML, used without --train/--eval.
    #[arg(long)]
    synthetic: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    schemes: Option<Vec<String>>,
    #[arg(long, value_delimiter = ',')]
    intervals: Option<Vec<u16>>,
    #[arg(long, value_delimiter = ',')]
    quantisations: Option<Vec<String>>,
    /// TSV output; stdout if absent.
    #[arg(long, short)]
    out: Option<PathBuf>,
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct BenchVaultArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Experiment TOML.
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Disable wall-clock timing (reproducible reports).
    #[arg(long)]
    no_timing: bool,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, short)]
    out: Option<PathBuf>,
    #[arg(long)]
    json: Option<PathBuf>,
    #[arg(long)]
    records_dir: Option<PathBuf>,
}

#[derive(Args)]
struct SecurityArgs {
    /// False match rate for FAS.
    #[arg(long, requires = "operations")]
    fmr: Option<f64>,
    /// Cost l of one attempt in Lagrange units.
    #[arg(long)]
    operations: Option<f64>,
    /// Universe size for the linkage probability.
    #[arg(long, requires_all = ["set_size", "k"])]
    rho: Option<u64>,
    #[arg(long)]
    set_size: Option<u64>,
    /// Size of the second set; defaults to --set-size.
    #[arg(long)]
    set_size2: Option<u64>,
    #[arg(long, short)]
    k: Option<u64>,
    /// Run the correlation attack on two records.
    #[arg(long, num_args = 2, value_names = ["A", "B"])]
    correlate: Option<Vec<PathBuf>>,
}

#[derive(Args)]
struct InspectArgs {
    record: PathBuf,
    /// Print the header as JSON.
    #[arg(long)]
    json: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Synth(a) => commands::synth(a),
        Command::FitQuantiser(a) => commands::fit(a),
        Command::Transform(a) => commands::transform(a),
        Command::Enroll(a) => commands::enroll(a),
        Command::Verify(a) => commands::verify(a),
        Command::BenchBinarise(a) => commands::bench_binarise(a),
        Command::BenchVault(a) => commands::bench_vault(a),
        Command::SecurityReport(a) => commands::security_report(a),
        Command::RecordInspect(a) => commands::record_inspect(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fvault: {e}");
            ExitCode::from(e.code())
        }
    }
}
