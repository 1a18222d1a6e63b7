//! Command-line front end: BER sweeps, detector cost tables, and the
//! built-in check suite. All simulation logic lives in the library.

use clap::{Args, Parser, Subcommand};
use ofdm_im_noma::complexity::{render_table, TableScenario};
use ofdm_im_noma::selftest::{all_passed, run_selftest};
use ofdm_im_noma::sim_harness::{
    render_csv, run_ber_sweep_observed, write_csv, PropagationPath, Scenario, SimConfig,
};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "ofdm-im-noma",
    about = "Link simulator for two-user superposed index-modulated OFDM",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte-Carlo BER sweep and emit CSV.
    Run(RunArgs),
    /// Print a per-subblock detector cost table.
    Table {
        /// Geometry preset: mid, high, or hybrid.
        #[arg(long, value_parser = parse_table_scenario, default_value = "mid")]
        scenario: TableScenario,
    },
    /// Run the built-in invariant checks.
    Selftest,
}

#[derive(Args)]
struct RunArgs {
    /// Flat `key = value` config file applied over the defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Geometry preset applied after the config file: high, low, hybrid,
    /// or agreement.
    #[arg(long, value_parser = parse_scenario)]
    scenario: Option<Scenario>,
    /// Generator seed (overrides config).
    #[arg(long)]
    seed: Option<u64>,
    /// Frames per SNR point (overrides config).
    #[arg(long)]
    frames: Option<u64>,
    /// Worker thread count (overrides config).
    #[arg(long)]
    workers: Option<usize>,
    /// Propagation path: freq or time (overrides config).
    #[arg(long, value_parser = parse_path)]
    path: Option<PropagationPath>,
    /// Sweep start, dB (overrides config).
    #[arg(long)]
    snr_start: Option<f64>,
    /// Sweep stop, dB (overrides config).
    #[arg(long)]
    snr_stop: Option<f64>,
    /// Sweep step, dB (overrides config).
    #[arg(long)]
    snr_step: Option<f64>,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_scenario(s: &str) -> Result<Scenario, String> {
    Scenario::parse(s).ok_or_else(|| "expected high, low, hybrid, or agreement".to_string())
}

fn parse_table_scenario(s: &str) -> Result<TableScenario, String> {
    TableScenario::parse(s).ok_or_else(|| "expected mid, high, or hybrid".to_string())
}

fn parse_path(s: &str) -> Result<PropagationPath, String> {
    PropagationPath::parse(s).ok_or_else(|| "expected freq or time".to_string())
}

fn build_config(args: &RunArgs) -> Result<SimConfig, ofdm_im_noma::Error> {
    let mut config = match &args.config {
        Some(path) => SimConfig::from_file(path)?,
        None => SimConfig::default(),
    };
    if let Some(scenario) = args.scenario {
        scenario.apply(&mut config);
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(frames) = args.frames {
        config.frames_per_point = frames;
    }
    if let Some(workers) = args.workers {
        config.workers = workers;
    }
    if let Some(path) = args.path {
        config.path = path;
    }
    if let Some(start) = args.snr_start {
        config.snr_start_db = start;
    }
    if let Some(stop) = args.snr_stop {
        config.snr_stop_db = stop;
    }
    if let Some(step) = args.snr_step {
        config.snr_step_db = step;
    }
    config.validate()?;
    Ok(config)
}

fn run(args: &RunArgs) -> Result<(), ofdm_im_noma::Error> {
    let config = build_config(args)?;
    let records = run_ber_sweep_observed(&config, |p| {
        eprintln!(
            "point {}/{}: {} dB done",
            p.point_index + 1,
            p.total_points,
            p.snr_db
        );
    })?;
    match &args.out {
        Some(path) => write_csv(&records, path)?,
        None => print!("{}", render_csv(&records)),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run(args) => {
            if let Err(e) = run(&args) {
                eprintln!("error: {e}");
                return ExitCode::FAILURE;
            }
        }
        Command::Table { scenario } => print!("{}", render_table(scenario)),
        Command::Selftest => {
            let reports = run_selftest();
            for r in &reports {
                let status = if r.passed { "ok  " } else { "FAIL" };
                println!("{status} {:<32} {}", r.name, r.detail);
            }
            if !all_passed(&reports) {
                return ExitCode::FAILURE;
            }
            println!("all {} checks passed", reports.len());
        }
    }
    ExitCode::SUCCESS
}
