//! Monte Carlo harness for turbo decoding over impulsive noise channels
//! with online expert combining.

use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use turbohedge_core::sim::{
    emit_reports, parse_f64_list, parse_scenario, parse_usize_list, InterleaverKind, LossMode,
    Method, MixtureGammaRule, PoolSpec, RunSpec, SimCommand, SimOutput,
};
use turbohedge_core::turbo::TailMode;

#[derive(Parser)]
#[command(
    name = "turbohedge",
    about = "Turbo-coded link simulator for alpha-stable noise with Hedge-combined decoder banks",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one method over a GSNR list and write BLER/weight CSVs.
    Run(RunArgs),
    /// Run the proposed method once per learning rate on paired seeds.
    BetaSweep(BetaSweepArgs),
    /// Sweep early-stopping steps over a (GSNR, alpha) grid.
    EarlyStopTable(EarlyStopArgs),
    /// Re-execute a recorded manifest.
    Rerun(RerunArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Noise GSNR points in dB, comma separated.
    #[arg(long = "gsnr-db", value_name = "LIST", default_value = "8,9,10,11,12")]
    gsnr_db: String,

    /// Blocks per run (proposed method), or the block floor (baselines).
    #[arg(long, value_name = "N", default_value_t = 10_000)]
    blocks: usize,

    /// Master seed; every random stream derives from it.
    #[arg(long, value_name = "S", default_value_t = 1)]
    seed: u64,

    /// Hedge initial weight W.
    #[arg(long = "init-weight", value_name = "W", default_value_t = 1.0)]
    init_weight: f64,

    /// Freeze step: stop weight updates here and decode with the best
    /// expert afterwards.
    #[arg(long, value_name = "T")]
    tau: Option<usize>,

    /// Decoding iterations per expert per block.
    #[arg(long, value_name = "I", default_value_t = 8)]
    iters: usize,

    /// Code rate: 1/3, 1/2, 2/3, or 4/5.
    #[arg(long, value_name = "R", default_value = "4/5")]
    rate: String,

    /// Information block length.
    #[arg(long, value_name = "K", default_value_t = 128)]
    k: usize,

    /// Expert pool: `default` or a comma list of alpha hypotheses.
    #[arg(long, value_name = "POOL", default_value = "default")]
    pool: String,

    /// Loss signal: `genie` (bit-error fraction) or `crc` (block pass/fail).
    #[arg(long, value_name = "MODE", default_value = "genie")]
    loss: String,

    /// Output directory for CSVs and the manifest.
    #[arg(long, value_name = "DIR", default_value = "out")]
    out: PathBuf,

    /// Signal amplitude A.
    #[arg(long, value_name = "A", default_value_t = 1.0)]
    amplitude: f64,

    /// Mixture dispersion rule: `per-alpha` or `shared`.
    #[arg(
        long = "mixture-gamma",
        value_name = "RULE",
        default_value = "per-alpha"
    )]
    mixture_gamma: String,

    /// Baseline stopping: block errors to collect past the block floor.
    #[arg(long = "error-target", value_name = "E", default_value_t = 50)]
    error_target: usize,

    /// Baseline stopping: hard cap on blocks.
    #[arg(long = "max-blocks", value_name = "N", default_value_t = 1_000_000)]
    max_blocks: usize,

    /// Feedback polynomial (bit i = coefficient of D^i).
    #[arg(long = "feedback-poly", value_name = "P", default_value_t = 0b111)]
    feedback_poly: u32,

    /// Forward polynomial (bit i = coefficient of D^i).
    #[arg(long = "forward-poly", value_name = "P", default_value_t = 0b101)]
    forward_poly: u32,

    /// Trellis termination: none, terminate-first, or terminate-both.
    #[arg(
        long = "tail-mode",
        value_name = "MODE",
        default_value = "terminate-both"
    )]
    tail_mode: String,

    /// Interleaver construction: random or s-random (spread permutation).
    #[arg(long, value_name = "KIND", default_value = "random")]
    interleaver: String,
}

#[derive(Args)]
struct RunArgs {
    /// Channel: `single:ALPHA` or `mixture:A1,A2[,W1,W2]`.
    #[arg(long, value_name = "SCENARIO")]
    scenario: String,

    /// Decoder: proposed, gaussian, cauchy, mebcgm, or mixture-oracle.
    #[arg(long, value_name = "METHOD", default_value = "proposed")]
    method: String,

    /// Hedge learning rate.
    #[arg(long, value_name = "B", default_value_t = 0.90)]
    beta: f64,

    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct BetaSweepArgs {
    /// Channel: `single:ALPHA` or `mixture:A1,A2[,W1,W2]`.
    #[arg(long, value_name = "SCENARIO")]
    scenario: String,

    /// Learning rates to sweep, comma separated.
    #[arg(long, value_name = "LIST", default_value = "0.85,0.90,0.95,0.99")]
    betas: String,

    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct EarlyStopArgs {
    /// Single-alpha channels forming the table columns.
    #[arg(long, value_name = "LIST", default_value = "1.4,1.5")]
    alphas: String,

    /// Freeze steps forming the table rows.
    #[arg(long, value_name = "LIST", default_value = "500,1000,1500,2000,2500")]
    taus: String,

    /// Hedge learning rate.
    #[arg(long, value_name = "B", default_value_t = 0.90)]
    beta: f64,

    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct RerunArgs {
    /// Manifest file written by a previous invocation.
    #[arg(long, value_name = "FILE")]
    manifest: PathBuf,

    /// Output directory (defaults to `out`).
    #[arg(long, value_name = "DIR", default_value = "out")]
    out: PathBuf,
}

fn build_spec(
    common: &CommonArgs,
    scenario: &str,
    beta: f64,
    command: SimCommand,
) -> anyhow::Result<RunSpec> {
    let mut spec = RunSpec::defaults(
        parse_scenario(scenario)?,
        parse_f64_list(&common.gsnr_db)?,
        common.blocks,
        common.seed,
    );
    spec.command = command;
    spec.amplitude = common.amplitude;
    spec.beta = beta;
    spec.init_weight = common.init_weight;
    spec.tau = common.tau;
    spec.iters = common.iters;
    spec.rate = common.rate.clone();
    spec.k = common.k;
    spec.pool = PoolSpec::parse(&common.pool)?;
    spec.loss = LossMode::parse(&common.loss)?;
    spec.mixture_gamma = MixtureGammaRule::parse(&common.mixture_gamma)?;
    spec.error_target = common.error_target;
    spec.max_blocks = common.max_blocks;
    spec.feedback_poly = common.feedback_poly;
    spec.forward_poly = common.forward_poly;
    spec.tail_mode = TailMode::parse(&common.tail_mode)?;
    spec.interleaver = InterleaverKind::parse(&common.interleaver)?;
    Ok(spec)
}

fn print_summary(output: &SimOutput) {
    for r in &output.reports {
        let stop = r
            .early_stop
            .as_ref()
            .map(|e| format!(", frozen at {} on {}", e.tau, e.chosen_label))
            .unwrap_or_default();
        println!(
            "{} alpha={} gsnr={}dB: blocks={} BLER={:.5} BER={:.6} ({:.1}s{})",
            r.method,
            r.alpha_label,
            r.gsnr_db,
            r.blocks,
            r.bler(),
            r.ber(),
            r.wall_clock_secs,
            stop
        );
    }
    if let Some(table) = &output.table {
        print!("{}", table.to_csv());
    }
}

fn execute_and_emit(spec: &RunSpec, out: &std::path::Path) -> anyhow::Result<()> {
    let output = spec.execute()?;
    print_summary(&output);
    let files = emit_reports(&output, spec, out)?;
    if let Some(p) = &files.bler_csv {
        println!("wrote {}", p.display());
    }
    for p in &files.weight_traces {
        println!("wrote {}", p.display());
    }
    if let Some(p) = &files.early_stop_csv {
        println!("wrote {}", p.display());
    }
    println!("wrote {}", files.manifest.display());
    Ok(())
}

fn main() -> anyhow::Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Run(args) => {
            let method = Method::parse(&args.method)?;
            let mut spec = build_spec(&args.common, &args.scenario, args.beta, SimCommand::Run)?;
            spec.method = method;
            execute_and_emit(&spec, &args.common.out)
        }
        Command::BetaSweep(args) => {
            let betas = parse_f64_list(&args.betas)?;
            if betas.is_empty() {
                bail!("--betas needs at least one value");
            }
            let first = betas[0];
            let spec = build_spec(
                &args.common,
                &args.scenario,
                first,
                SimCommand::BetaSweep { betas },
            )?;
            execute_and_emit(&spec, &args.common.out)
        }
        Command::EarlyStopTable(args) => {
            let alphas = parse_f64_list(&args.alphas)?;
            let taus = parse_usize_list(&args.taus)?;
            if alphas.is_empty() || taus.is_empty() {
                bail!("--alphas and --taus each need at least one value");
            }
            // the scenario field is unused by table runs; echo the first alpha
            let scenario = format!("single:{}", alphas[0]);
            let spec = build_spec(
                &args.common,
                &scenario,
                args.beta,
                SimCommand::EarlyStopTable { taus, alphas },
            )?;
            execute_and_emit(&spec, &args.common.out)
        }
        Command::Rerun(args) => {
            let text = fs::read_to_string(&args.manifest)
                .with_context(|| format!("reading {}", args.manifest.display()))?;
            let spec = RunSpec::from_manifest(&text)?;
            execute_and_emit(&spec, &args.out)
        }
    }
}
