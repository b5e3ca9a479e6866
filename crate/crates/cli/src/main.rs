use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand};
use tunefft::cache::{Policy, Strategy};
use tunefft::{Mode, TwiddleKind};
use tunefft_cli::*;
use tunefft_codelet::{Algorithm, CodeletKind};

#[derive(Parser)]
#[command(name = "tunefft", version, about = "Self-optimizing FFT: transforms, benchmarks and experiments")]
struct Cli {
    /// Seed for every random input.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Transform a file of little-endian f64 (re, im) pairs.
    Transform {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        inverse: bool,
        #[arg(long, default_value = "estimate")]
        mode: Mode,
        #[arg(long)]
        wisdom: Option<PathBuf>,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long = "out")]
        output: PathBuf,
    },
    /// Time planned transforms against the textbook radix-2 FFT.
    Bench {
        /// Comma-separated sizes.
        #[arg(long)]
        sizes: Option<String>,
        /// Only `textbook` is available.
        #[arg(long, value_parser = ["textbook"])]
        baseline: Option<String>,
        /// Comma-separated planner modes.
        #[arg(long, default_value = "estimate")]
        mode: String,
        /// Timing window per measurement, in milliseconds.
        #[arg(long, default_value_t = 20)]
        window_ms: u64,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// FFT and twiddle errors for a twiddle provider.
    Accuracy {
        /// Comma-separated sizes.
        #[arg(long)]
        sizes: String,
        #[arg(long, default_value = "full")]
        twiddle: TwiddleKind,
        #[arg(long, default_value_t = 4)]
        trials: usize,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Ideal-cache miss count of an FFT traversal.
    Cachesim {
        #[arg(long)]
        strategy: Strategy,
        #[arg(long)]
        n: usize,
        #[arg(long = "Z")]
        z: usize,
        #[arg(long = "L", default_value_t = 1)]
        l: usize,
        #[arg(long, default_value = "opt")]
        policy: Policy,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Generate a codelet and print it.
    Codelet {
        #[arg(long)]
        n: usize,
        #[arg(long, value_parser = parse_alg, default_value = "ct")]
        alg: Algorithm,
        /// notw, twiddle or twiddle_dif.
        #[arg(long, value_parser = parse_kind, default_value = "notw")]
        kind: CodeletKind,
        #[arg(long, default_value = "stats")]
        emit: Emit,
    },
    /// Randomized self-test of the planned transform.
    Selftest {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 20)]
        trials: usize,
    },
}

fn parse_alg(s: &str) -> Result<Algorithm, String> {
    Algorithm::parse(s).ok_or_else(|| format!("unknown algorithm `{s}` (ct|splitradix|pfa|rader)"))
}

fn parse_kind(s: &str) -> Result<CodeletKind, String> {
    [CodeletKind::Notw, CodeletKind::Twiddle, CodeletKind::TwiddleDif]
        .into_iter()
        .find(|k| k.name() == s)
        .ok_or_else(|| format!("unknown codelet kind `{s}`"))
}

fn run(cli: Cli) -> CliResult<String> {
    let seed = cli.seed;
    match cli.cmd {
        Cmd::Transform {
            n,
            inverse,
            mode,
            wisdom,
            input,
            output,
        } => cmd_transform(&TransformArgs {
            n,
            inverse,
            mode,
            wisdom: wisdom.as_deref(),
            input: &input,
            output: &output,
        }),
        Cmd::Bench {
            sizes,
            baseline,
            mode,
            window_ms,
            csv,
        } => {
            let modes = mode
                .split(',')
                .map(|m| m.trim().parse::<Mode>())
                .collect::<Result<Vec<_>, _>>()?;
            let cfg = BenchConfig {
                window: Duration::from_millis(window_ms),
                seed,
                baseline: baseline.is_some(),
                ..BenchConfig::default()
            };
            let sizes = match sizes {
                Some(s) => parse_sizes(&s)?,
                None => DEFAULT_BENCH_SIZES.to_vec(),
            };
            cmd_bench(&sizes, &modes, &cfg, csv.as_deref())
        }
        Cmd::Accuracy {
            sizes,
            twiddle,
            trials,
            csv,
        } => cmd_accuracy(&parse_sizes(&sizes)?, twiddle, trials, seed, csv.as_deref()),
        Cmd::Cachesim {
            strategy,
            n,
            z,
            l,
            policy,
            csv,
        } => cmd_cachesim(strategy, n, z, l, policy, csv.as_deref()),
        Cmd::Codelet { n, alg, kind, emit } => cmd_codelet(n, alg, kind, emit),
        Cmd::Selftest { n, trials } => cmd_selftest(n, trials, seed),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("tunefft: {e}");
            ExitCode::FAILURE
        }
    }
}
