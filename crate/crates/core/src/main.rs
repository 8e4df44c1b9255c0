use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use relaycap::cli::{emit_report, exit_code, run_sweep, Command, KvConfig, SweepConfig};
use relaycap::{Error, Result};

/// Outage capacity of low-SNR relay networks: closed forms, Monte Carlo and
/// parameter sweeps.
#[derive(Parser)]
#[command(name = "relaycap", version)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Outage probability at a fixed rate.
    Outage(Flags),
    /// ε-outage capacity (single relay).
    Capacity(Flags),
    /// Optimal collinear relay position.
    Placement(Flags),
    /// Ratio of incremental-relaying to cut-set capacity.
    Delta(Flags),
    /// Mean sub-blocks per message or throughput.
    Phases(Flags),
    /// Multi-relay capacities, outage or phases.
    Krelay(Flags),
    /// Optimal relay position for alpha in 2..5 (placement preset).
    Fig3(Flags),
    /// Capacity-ratio bound over d_sr at alpha = 3 (delta preset).
    Fig4(Flags),
}

/// Flags shared by every subcommand. Swept parameters take
/// `start:stop:step` or a comma list.
#[derive(clap::Args)]
struct Flags {
    /// Source-relay distance (source-destination distance is 1).
    #[arg(long = "d-sr", visible_alias = "dsr-range", allow_hyphen_values = true)]
    d_sr: Option<String>,
    /// Path-loss exponent.
    #[arg(long, visible_alias = "alpha-range", allow_hyphen_values = true)]
    alpha: Option<String>,
    /// Transmit SNR in dB.
    #[arg(long = "snr-db", allow_hyphen_values = true)]
    snr_db: Option<String>,
    /// Outage target.
    #[arg(long)]
    epsilon: Option<String>,
    /// Number of relays.
    #[arg(long, short = 'k')]
    k: Option<String>,
    /// End-to-end rate in bits per channel use.
    #[arg(long)]
    rate: Option<String>,
    /// Source-destination variance (with --sigma2-sr/--sigma2-rd).
    #[arg(long = "sigma2-sd")]
    sigma2_sd: Option<String>,
    /// Source-relay variances, one or one per relay.
    #[arg(long = "sigma2-sr")]
    sigma2_sr: Option<String>,
    /// Relay-destination variances, one or one per relay.
    #[arg(long = "sigma2-rd")]
    sigma2_rd: Option<String>,
    /// ir | csb | bound
    #[arg(long)]
    protocol: Option<String>,
    /// Reported quantity for delta, capacity, phases and krelay.
    #[arg(long)]
    quantity: Option<String>,
    /// exact | asymptotic | mc
    #[arg(long)]
    evaluator: Option<String>,
    /// Monte Carlo trials per point (0 skips simulation).
    #[arg(long)]
    trials: Option<String>,
    /// Trial cap for the Monte Carlo capacity solver.
    #[arg(long = "max-trials")]
    max_trials: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Rate tolerance of the capacity solver and placement search.
    #[arg(long)]
    tol: Option<String>,
    /// Operating thresholds at or above this are flagged out_of_regime.
    #[arg(long = "validity-threshold")]
    validity_threshold: Option<String>,
    /// csv | json
    #[arg(long)]
    format: Option<String>,
    /// Output file (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Key-value config file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl Flags {
    fn overrides(&self) -> KvConfig {
        let mut kv = KvConfig::new();
        let pairs = [
            ("d_sr", &self.d_sr),
            ("alpha", &self.alpha),
            ("snr_db", &self.snr_db),
            ("epsilon", &self.epsilon),
            ("k", &self.k),
            ("rate", &self.rate),
            ("sigma2_sd", &self.sigma2_sd),
            ("sigma2_sr", &self.sigma2_sr),
            ("sigma2_rd", &self.sigma2_rd),
            ("protocol", &self.protocol),
            ("quantity", &self.quantity),
            ("evaluator", &self.evaluator),
            ("trials", &self.trials),
            ("max_trials", &self.max_trials),
            ("seed", &self.seed),
            ("tol", &self.tol),
            ("validity_threshold", &self.validity_threshold),
            ("format", &self.format),
        ];
        for (key, value) in pairs {
            if let Some(v) = value {
                kv.set(key, v.clone());
            }
        }
        if let Some(out) = &self.out {
            kv.set("out", out.to_string_lossy());
        }
        kv
    }
}

fn preset(pairs: &[(&str, &str)]) -> KvConfig {
    let mut kv = KvConfig::new();
    for (k, v) in pairs {
        kv.set(k, *v);
    }
    kv
}

fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var("RELAYCAP_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| {
            Error::Config(format!(
                "RELAYCAP_THREADS: `{value}` is not a positive integer"
            ))
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::Config(format!("cannot start {n} worker threads: {e}")))
}

fn run(cli: Cli) -> Result<()> {
    configure_threads()?;
    let (command, flags, defaults) = match cli.command {
        Sub::Outage(f) => (Command::Outage, f, KvConfig::new()),
        Sub::Capacity(f) => (Command::Capacity, f, KvConfig::new()),
        Sub::Placement(f) => (Command::Placement, f, KvConfig::new()),
        Sub::Delta(f) => (Command::Delta, f, KvConfig::new()),
        Sub::Phases(f) => (Command::Phases, f, KvConfig::new()),
        Sub::Krelay(f) => (Command::KRelay, f, KvConfig::new()),
        Sub::Fig3(f) => (Command::Placement, f, preset(&[("alpha", "2:5:0.1")])),
        Sub::Fig4(f) => (
            Command::Delta,
            f,
            preset(&[
                ("d_sr", "0.02:0.98:0.02"),
                ("alpha", "3"),
                ("quantity", "bound"),
            ]),
        ),
    };
    let file = match &flags.config {
        Some(path) => KvConfig::load(path)?,
        None => KvConfig::new(),
    };
    let kv = defaults.overlay(&file).overlay(&flags.overrides());
    let config = SweepConfig::from_kv(command, &kv)?;
    let table = run_sweep(&config)?;
    emit_report(&table, config.format, config.out.as_deref())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("relaycap: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
