use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use grassrelay::cli::{
    configured_threads, generate_codebook_file, run_bounds, run_scenario, run_selfcheck,
    RunOverrides, ScenarioConfig,
};
use grassrelay::codebooks::load_codebook;

/// Beamforming and limited-feedback quantization for MIMO
/// amplify-and-forward relay links.
#[derive(Parser)]
#[command(name = "grassrelay", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate or inspect beamforming codebooks.
    Codebook {
        #[command(subcommand)]
        command: CodebookCommand,
    },
    /// Run a BER sweep scenario and write CSV artifacts.
    Ber {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Run the full-scale schedule (20000 intervals x 200 symbols).
        #[arg(long)]
        full_scale: bool,
        /// Override the number of coherence intervals.
        #[arg(long)]
        intervals: Option<u64>,
        /// Override the symbols per interval.
        #[arg(long)]
        symbols: Option<u64>,
    },
    /// Compute the quantization-loss bound reports of a scenario.
    Bounds {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Channel draws per bound report.
        #[arg(long)]
        channels: Option<usize>,
    },
    /// Run the fast invariant suite.
    Selfcheck {
        /// Codebook files to validate as part of the check.
        #[arg(long = "codebook")]
        codebooks: Vec<PathBuf>,
    },
}

#[derive(Args)]
struct ScenarioArgs {
    /// Scenario config: a TOML path or a bundled preset name
    /// (fig6, fig7, fig8, fig9, fig10).
    #[arg(long)]
    config: String,
    /// Override the master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (defaults to the config's `output` entry).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum CodebookCommand {
    /// Generate a codebook and save it.
    Gen {
        /// Ambient dimension of the codewords.
        #[arg(long)]
        dim: usize,
        /// Number of codewords.
        #[arg(long)]
        size: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// `grassmannian` (max-min packing search) or `random`.
        #[arg(long, default_value = "grassmannian")]
        kind: String,
        /// Multi-start budget of the packing search.
        #[arg(long, default_value_t = 24)]
        restarts: usize,
        /// Refinement steps per restart.
        #[arg(long, default_value_t = 600)]
        iterations: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the dimensions and minimum distance of a codebook file.
    Info { path: PathBuf },
}

fn resolve_out_dir(arg: Option<PathBuf>, config: &ScenarioConfig) -> Result<PathBuf, String> {
    arg.or_else(|| config.output.as_ref().map(PathBuf::from))
        .ok_or_else(|| "no output directory: pass --out or set `output` in the config".into())
}

fn run() -> Result<(), String> {
    if let Some(threads) = configured_threads() {
        #[cfg(feature = "parallel")]
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| format!("GRASSRELAY_THREADS: {e}"))?;
        #[cfg(not(feature = "parallel"))]
        let _ = threads;
    }

    let cli = Cli::parse();
    match cli.command {
        Command::Codebook { command } => match command {
            CodebookCommand::Gen { dim, size, seed, kind, restarts, iterations, out } => {
                let cb = generate_codebook_file(&kind, dim, size, seed, restarts, iterations, &out)
                    .map_err(|e| e.to_string())?;
                match cb.min_distance() {
                    Ok(d) => println!(
                        "wrote {} ({} vectors in C^{}, min distance {d:.6})",
                        out.display(),
                        cb.size(),
                        cb.dim()
                    ),
                    Err(_) => println!(
                        "wrote {} ({} vector in C^{})",
                        out.display(),
                        cb.size(),
                        cb.dim()
                    ),
                }
                Ok(())
            }
            CodebookCommand::Info { path } => {
                let cb = load_codebook(&path).map_err(|e| e.to_string())?;
                println!("file: {}", path.display());
                println!("dimension: {}", cb.dim());
                println!("size: {}", cb.size());
                match cb.min_distance() {
                    Ok(d) => println!("min distance: {d:.12}"),
                    Err(_) => println!("min distance: undefined (single codeword)"),
                }
                Ok(())
            }
        },
        Command::Ber { scenario, full_scale, intervals, symbols } => {
            let (config, base) = ScenarioConfig::load(&scenario.config).map_err(|e| e.to_string())?;
            let out = resolve_out_dir(scenario.out, &config)?;
            let overrides = RunOverrides {
                seed: scenario.seed,
                intervals,
                symbols,
                full_scale,
                bound_channels: None,
            };
            let artifacts =
                run_scenario(&config, &base, &out, &overrides).map_err(|e| e.to_string())?;
            for rel in &artifacts.files {
                println!("wrote {}", artifacts.out_dir.join(rel).display());
            }
            Ok(())
        }
        Command::Bounds { scenario, channels } => {
            let (config, base) = ScenarioConfig::load(&scenario.config).map_err(|e| e.to_string())?;
            let out = resolve_out_dir(scenario.out, &config)?;
            let overrides = RunOverrides {
                seed: scenario.seed,
                bound_channels: channels,
                ..Default::default()
            };
            let artifacts =
                run_bounds(&config, &base, &out, &overrides).map_err(|e| e.to_string())?;
            for rel in &artifacts.files {
                println!("wrote {}", artifacts.out_dir.join(rel).display());
            }
            Ok(())
        }
        Command::Selfcheck { codebooks } => {
            let checks = run_selfcheck(&codebooks);
            let mut failures = 0;
            for check in &checks {
                let status = if check.passed { "PASS" } else { "FAIL" };
                println!("{status} {} - {}", check.name, check.detail);
                if !check.passed {
                    failures += 1;
                }
            }
            if failures > 0 {
                Err(format!("{failures} check(s) failed"))
            } else {
                println!("all {} checks passed", checks.len());
                Ok(())
            }
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::FAILURE
        }
    }
}
