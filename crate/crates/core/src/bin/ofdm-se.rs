use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ofdm_se::ber_oracle::{run_gate, GateConfig, MIN_SYMBOLS};
use ofdm_se::sweep::{run_sweep, to_csv, to_series, write_text, SweepConfig, SweepOverrides};
use ofdm_se::Error;

#[derive(Parser)]
#[command(
    version,
    about = "Adaptive-modulation throughput of pilot-based and blind OFDM systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo throughput sweep, written as CSV.
    Sweep(Box<SweepArgs>),
    /// Compare closed-form BER against simulation for every scheme.
    ValidateBer(ValidateArgs),
}

#[derive(Args)]
struct SweepArgs {
    /// TOML file with sweep settings; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated subset of fb,cm,lte,mlte.
    #[arg(long)]
    systems: Option<String>,
    /// START:STEP:STOP in dB.
    #[arg(long = "snr-db", allow_hyphen_values = true)]
    snr_db: Option<String>,
    /// Comma-separated target BERs.
    #[arg(long = "pt", value_delimiter = ',')]
    p_t: Option<Vec<f64>>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    nfft: Option<usize>,
    /// subcarrier or block.
    #[arg(long)]
    granularity: Option<String>,
    /// Constraint map adding a custom system.
    #[arg(long = "profile-file")]
    profile_file: Option<PathBuf>,
    /// Power delay profile replacing TUx.
    #[arg(long = "channel-file")]
    channel_file: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
    /// CSV destination; stdout when absent or "-".
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write a wide per-SNR table for plotting.
    #[arg(long)]
    series: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    /// Minimum symbols per operating point.
    #[arg(long, default_value_t = 1_000_000)]
    symbols: u64,
    /// Maximum relative error.
    #[arg(long, default_value_t = 0.10)]
    tolerance: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

enum Failure {
    Usage(String),
    Run(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::Domain(_) => Failure::Usage(e.to_string()),
            _ => Failure::Run(e.to_string()),
        }
    }
}

fn sweep(args: SweepArgs) -> Result<(), Failure> {
    let mut cfg = SweepConfig::default();
    if let Some(path) = &args.config {
        cfg = cfg.apply(&SweepOverrides::load(path)?)?;
    }
    let flags = SweepOverrides {
        systems: args.systems.map(|s| vec![s]),
        snr_db: args.snr_db,
        p_t: args.p_t,
        trials: args.trials,
        seed: args.seed,
        n_fft: args.nfft,
        granularity: args.granularity,
        profile_file: args.profile_file,
        channel_file: args.channel_file,
        workers: args.workers,
        ..Default::default()
    };
    let cfg = cfg.apply(&flags)?;
    let rows = run_sweep(&cfg)?;
    let csv = to_csv(&rows);
    match args.out.as_deref() {
        Some(p) if p.as_os_str() != "-" => write_text(p, &csv)?,
        _ => std::io::stdout()
            .write_all(csv.as_bytes())
            .map_err(|e| Failure::Run(format!("writing to stdout: {e}")))?,
    }
    if let Some(p) = &args.series {
        write_text(p, &to_series(&rows))?;
    }
    Ok(())
}

fn validate(args: ValidateArgs) -> Result<bool, Failure> {
    if args.symbols < MIN_SYMBOLS {
        return Err(Failure::Usage(format!(
            "--symbols must be at least {MIN_SYMBOLS}, got {}",
            args.symbols
        )));
    }
    let cfg = GateConfig {
        n_symbols: args.symbols,
        tolerance: args.tolerance,
        seed: args.seed,
        ..Default::default()
    };
    let rows = run_gate(&cfg)?;
    println!(
        "{:<7} {:>12} {:>12} {:>12} {:>10} {:>10} {:>9}  result",
        "scheme", "gamma", "analytic", "empirical", "ci95", "symbols", "rel_err"
    );
    for r in &rows {
        println!(
            "{:<7} {:>12.5e} {:>12.5e} {:>12.5e} {:>10.2e} {:>10} {:>9.4}  {}",
            r.scheme.to_string(),
            r.gamma,
            r.analytic,
            r.empirical,
            r.ci95,
            r.symbols,
            r.rel_error,
            if r.pass { "PASS" } else { "FAIL" }
        );
    }
    let failed = rows.iter().filter(|r| !r.pass).count();
    println!(
        "{} of {} points within {:.1}%",
        rows.len() - failed,
        rows.len(),
        100.0 * args.tolerance
    );
    Ok(failed == 0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Sweep(a) => sweep(*a).map(|_| true),
        Command::ValidateBer(a) => validate(a),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Run(e)) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
