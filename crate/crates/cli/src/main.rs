//! Command-line front end for the erasure-coding workbench.
//!
//! Subcommands mirror the library modules: `polar`, `ldpc`, `coupled`, `de`,
//! `potential`, `scaling`, and `run` for config-driven experiments. All
//! output is CSV on stdout unless `--out` is given; `run` can also emit
//! JSON. Exit codes: 0 on success, 2 on configuration errors, 3 on runtime
//! failures.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use beclab::coupled;
use beclab::de;
use beclab::ensemble::DegreeDistribution;
use beclab::exec;
use beclab::harness::{self, ExperimentConfig, OutputFormat};
use beclab::polar;
use beclab::potential;

#[derive(Parser)]
#[command(name = "beclab", version, about = "Erasure-channel coding workbench")]
struct Cli {
    /// Base seed for anything randomized.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format for `run` (csv or json).
    #[arg(long, global = true)]
    format: Option<String>,
    /// Worker threads for parallel sections (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Polar code construction, simulation, and scaling.
    Polar {
        #[command(subcommand)]
        cmd: PolarCmd,
    },
    /// LDPC Monte Carlo simulation.
    Ldpc {
        #[command(subcommand)]
        cmd: LdpcCmd,
    },
    /// Spatially coupled density evolution.
    Coupled {
        #[command(subcommand)]
        cmd: CoupledCmd,
    },
    /// Uncoupled density evolution and EXIT analysis.
    De {
        #[command(subcommand)]
        cmd: DeCmd,
    },
    /// Potential-function analysis.
    Potential {
        #[command(subcommand)]
        cmd: PotentialCmd,
    },
    /// Polar finite-length scaling fit (alias for `polar scaling`).
    Scaling(ScalingArgs),
    /// Run an experiment described by a JSON config file.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Subcommand)]
enum PolarCmd {
    /// Build a code and report its size and union bound.
    Construct {
        #[arg(long)]
        depth: u32,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        rate: f64,
    },
    /// Monte Carlo successive-cancellation decoding.
    Sim {
        #[arg(long)]
        depth: u32,
        #[arg(long, value_delimiter = ',')]
        eps: Vec<f64>,
        #[arg(long)]
        trials: u64,
        #[arg(long, default_value_t = 0.5)]
        rate: f64,
    },
    /// Finite-length scaling fit.
    Scaling(ScalingArgs),
}

#[derive(Args)]
struct ScalingArgs {
    #[arg(long)]
    eps: f64,
    /// Target union-bound block error.
    #[arg(long)]
    target: f64,
    /// Depth range, e.g. `10..24` (inclusive) or `10,12,14`.
    #[arg(long)]
    depths: String,
}

#[derive(Subcommand)]
enum LdpcCmd {
    /// Monte Carlo erasure decoding of configuration-model codes.
    Sim {
        #[arg(long)]
        dl: u32,
        #[arg(long)]
        dr: u32,
        #[arg(long)]
        n: usize,
        #[arg(long, value_delimiter = ',')]
        eps: Vec<f64>,
        #[arg(long)]
        trials: u64,
        /// Decoder: bp, peel, or map.
        #[arg(long, default_value = "bp")]
        decoder: String,
    },
}

#[derive(Subcommand)]
enum CoupledCmd {
    /// Iterate coupled density evolution and dump constellations.
    Run {
        #[arg(long = "L")]
        l: usize,
        #[arg(long)]
        w: usize,
        #[arg(long)]
        dl: u32,
        #[arg(long)]
        dr: u32,
        #[arg(long)]
        eps: f64,
        /// Dump the constellation every k iterations (final state always).
        #[arg(long = "dump-every")]
        dump_every: Option<usize>,
    },
    /// Decoding threshold by bisection.
    Threshold {
        #[arg(long = "L")]
        l: usize,
        #[arg(long)]
        w: usize,
        #[arg(long)]
        dl: u32,
        #[arg(long)]
        dr: u32,
        #[arg(long, default_value_t = 1e-5)]
        tol: f64,
    },
    /// Decoding-wave speed at one channel parameter.
    WaveSpeed {
        #[arg(long = "L")]
        l: usize,
        #[arg(long)]
        w: usize,
        #[arg(long)]
        dl: u32,
        #[arg(long)]
        dr: u32,
        #[arg(long)]
        eps: f64,
    },
}

#[derive(Subcommand)]
enum DeCmd {
    /// Iterate density evolution and dump the trajectory.
    Run {
        /// Degree distribution JSON file.
        #[arg(long)]
        dd: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 200_000)]
        max_iters: usize,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// BP threshold of the ensemble.
    Threshold {
        #[arg(long)]
        dd: PathBuf,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Fixed-point curve sweep.
    ExitCurve {
        #[arg(long)]
        dd: PathBuf,
        #[arg(long)]
        grid: usize,
    },
}

#[derive(Subcommand)]
enum PotentialCmd {
    /// Sample U and dU/dx on a grid.
    Scan {
        #[arg(long)]
        dl: u32,
        #[arg(long)]
        dr: u32,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        grid: usize,
    },
    /// Area threshold by both routes.
    AreaThreshold {
        #[arg(long)]
        dl: u32,
        #[arg(long)]
        dr: u32,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
}

/// Errors split by exit code: 2 for bad configuration, 3 for runtime.
enum CliError {
    Config(String),
    Runtime(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Runtime(m) => m,
        }
    }
}

fn config_err<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Config(e.to_string())
}

fn runtime_err<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Runtime(e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    exec::configure_workers(cli.jobs);
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

fn open_output(out: &Option<PathBuf>) -> Result<Box<dyn Write>, CliError> {
    match out {
        Some(path) => {
            let f = fs::File::create(path)
                .map_err(|e| CliError::Config(format!("cannot create {path:?}: {e}")))?;
            Ok(Box::new(f))
        }
        None => Ok(Box::new(std::io::stdout())),
    }
}

fn load_dd(path: &PathBuf) -> Result<DegreeDistribution, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {path:?}: {e}")))?;
    serde_json::from_str(&text).map_err(config_err)
}

fn parse_depths(spec: &str) -> Result<Vec<u32>, CliError> {
    if let Some((a, b)) = spec.split_once("..") {
        let lo: u32 = a.trim().parse().map_err(config_err)?;
        let hi: u32 = b.trim().trim_start_matches('=').parse().map_err(config_err)?;
        if lo > hi {
            return Err(CliError::Config(format!("empty depth range {spec:?}")));
        }
        Ok((lo..=hi).collect())
    } else {
        spec.split(',').map(|t| t.trim().parse().map_err(config_err)).collect()
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    let mut out = open_output(&cli.out)?;
    match cli.command {
        Command::Polar { cmd } => polar_cmd(cmd, cli.seed, &mut out),
        Command::Ldpc { cmd } => ldpc_cmd(cmd, cli.seed, &mut out),
        Command::Coupled { cmd } => coupled_cmd(cmd, &mut out),
        Command::De { cmd } => de_cmd(cmd, &mut out),
        Command::Potential { cmd } => potential_cmd(cmd, &mut out),
        Command::Scaling(args) => scaling_cmd(args, &mut out),
        Command::Run { config } => run_cmd(&config, cli.out.as_ref(), cli.format.as_deref()),
    }
}

const POLAR_HEADER: &str = "depth,eps,k,bound,empirical_block_err,trials,seed";

fn polar_cmd(cmd: PolarCmd, seed: u64, out: &mut dyn Write) -> Result<(), CliError> {
    match cmd {
        PolarCmd::Construct { depth, eps, rate } => {
            if !(0.0..=1.0).contains(&rate) {
                return Err(CliError::Config(format!("rate {rate} outside [0, 1]")));
            }
            let n = 1usize << depth;
            let k = (rate * n as f64).round() as usize;
            let spec = polar::construct(depth, eps, k).map_err(config_err)?;
            writeln!(out, "{POLAR_HEADER}").map_err(runtime_err)?;
            writeln!(out, "{depth},{eps},{k},{},,0,", polar::block_error_bound(&spec))
                .map_err(runtime_err)?;
        }
        PolarCmd::Sim { depth, eps, trials, rate } => {
            let cfg = ExperimentConfig::PolarSim { depth, rate, eps, trials, seed };
            let result = harness::run_experiment(&cfg).map_err(map_harness_err)?;
            writeln!(out, "{POLAR_HEADER}").map_err(runtime_err)?;
            let n = 1usize << depth;
            let k = (rate * n as f64).round() as usize;
            for r in &result.records {
                let spec = polar::construct(depth, r.eps, k).map_err(config_err)?;
                writeln!(
                    out,
                    "{depth},{},{k},{},{},{},{}",
                    r.eps,
                    polar::block_error_bound(&spec),
                    r.block_fail as f64 / r.trials as f64,
                    r.trials,
                    r.seed
                )
                .map_err(runtime_err)?;
            }
        }
        PolarCmd::Scaling(args) => scaling_cmd(args, out)?,
    }
    Ok(())
}

fn scaling_cmd(args: ScalingArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let depths = parse_depths(&args.depths)?;
    if depths.len() < 3 {
        return Err(CliError::Config("scaling needs at least 3 depths".into()));
    }
    if !(0.0 < args.target && args.target < 1.0) {
        return Err(CliError::Config(format!("target {} outside (0, 1)", args.target)));
    }
    let fit = polar::scaling_exponent(args.eps, args.target, &depths).map_err(config_err)?;
    writeln!(out, "depth,n,k,gap,mu").map_err(runtime_err)?;
    for (depth, k, gap) in &fit.points {
        writeln!(out, "{depth},{},{k},{gap},{}", 1u64 << depth, fit.mu).map_err(runtime_err)?;
    }
    Ok(())
}

fn ldpc_cmd(cmd: LdpcCmd, seed: u64, out: &mut dyn Write) -> Result<(), CliError> {
    match cmd {
        LdpcCmd::Sim { dl, dr, n, eps, trials, decoder } => {
            let decoder = match decoder.as_str() {
                "bp" => harness::DecoderKind::Bp,
                "peel" => harness::DecoderKind::Peel,
                "map" => harness::DecoderKind::Map,
                other => {
                    return Err(CliError::Config(format!("unknown decoder {other:?}")));
                }
            };
            let cfg = ExperimentConfig::LdpcSim { dl, dr, n, eps, trials, seed, decoder };
            let result = harness::run_experiment(&cfg).map_err(map_harness_err)?;
            harness::emit(&result, OutputFormat::Csv, out).map_err(runtime_err)?;
        }
    }
    Ok(())
}

fn coupled_cmd(cmd: CoupledCmd, out: &mut dyn Write) -> Result<(), CliError> {
    match cmd {
        CoupledCmd::Run { l, w, dl, dr, eps, dump_every } => {
            if w < 1 || w > l {
                return Err(CliError::Config(format!("need 1 <= w <= L, got w={w}, L={l}")));
            }
            writeln!(out, "iter,pos,x").map_err(runtime_err)?;
            let mut c = coupled::Constellation::all_ones(l, w);
            let mut dump = |iter: usize, c: &coupled::Constellation| -> Result<(), CliError> {
                for (i, v) in c.values().iter().enumerate() {
                    writeln!(out, "{iter},{},{v}", i + 1).map_err(runtime_err)?;
                }
                Ok(())
            };
            let max_iters = 100 * l;
            let mut iter = 0;
            while iter < max_iters {
                iter += 1;
                let next = coupled::coupled_de_step(&c, eps, dl, dr);
                let delta = c
                    .values()
                    .iter()
                    .zip(next.values())
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                c = next;
                if let Some(k) = dump_every {
                    if k > 0 && iter % k == 0 {
                        dump(iter, &c)?;
                    }
                }
                if c.max_value() < coupled::DECODED_THRESHOLD || delta < 1e-12 {
                    break;
                }
            }
            dump(iter, &c)?;
        }
        CoupledCmd::Threshold { l, w, dl, dr, tol } => {
            if w < 1 || w > l {
                return Err(CliError::Config(format!("need 1 <= w <= L, got w={w}, L={l}")));
            }
            if tol < 1e-6 {
                return Err(CliError::Config("tol below the bisection resolution 1e-6".into()));
            }
            let t = coupled::coupled_threshold(l, w, dl, dr, tol);
            writeln!(out, "L,w,dl,dr,threshold").map_err(runtime_err)?;
            writeln!(out, "{l},{w},{dl},{dr},{t}").map_err(runtime_err)?;
        }
        CoupledCmd::WaveSpeed { l, w, dl, dr, eps } => {
            let speed = coupled::wave_speed(l, w, dl, dr, eps).map_err(runtime_err)?;
            writeln!(out, "L,w,dl,dr,eps,speed").map_err(runtime_err)?;
            writeln!(out, "{l},{w},{dl},{dr},{eps},{speed}").map_err(runtime_err)?;
        }
    }
    Ok(())
}

fn de_cmd(cmd: DeCmd, out: &mut dyn Write) -> Result<(), CliError> {
    match cmd {
        DeCmd::Run { dd, eps, max_iters, tol } => {
            let dd = load_dd(&dd)?;
            if !(0.0..=1.0).contains(&eps) {
                return Err(CliError::Config(format!("eps {eps} outside [0, 1]")));
            }
            let run = de::de_iterate(&dd, eps, max_iters, tol);
            writeln!(out, "iter,x,y").map_err(runtime_err)?;
            for s in &run.trajectory {
                writeln!(out, "{},{},{}", s.iteration, s.x, s.y).map_err(runtime_err)?;
            }
        }
        DeCmd::Threshold { dd, tol } => {
            let dd = load_dd(&dd)?;
            let t = de::bp_threshold(&dd, tol.max(1e-10));
            writeln!(out, "eps_bp").map_err(runtime_err)?;
            writeln!(out, "{t}").map_err(runtime_err)?;
        }
        DeCmd::ExitCurve { dd, grid } => {
            let dd = load_dd(&dd)?;
            if grid < 100 {
                return Err(CliError::Config("exit curve needs a grid of at least 100".into()));
            }
            writeln!(out, "x,epsilon,exit,stability").map_err(runtime_err)?;
            for p in de::exit_curve(&dd, grid) {
                let s = match p.stability {
                    de::Stability::Stable => "stable",
                    de::Stability::Unstable => "unstable",
                };
                writeln!(out, "{},{},{},{s}", p.x, p.epsilon, p.exit_value)
                    .map_err(runtime_err)?;
            }
        }
    }
    Ok(())
}

fn potential_cmd(cmd: PotentialCmd, out: &mut dyn Write) -> Result<(), CliError> {
    match cmd {
        PotentialCmd::Scan { dl, dr, eps, grid } => {
            if grid < 2 {
                return Err(CliError::Config("grid too small".into()));
            }
            if !(0.0..=1.0).contains(&eps) {
                return Err(CliError::Config(format!("eps {eps} outside [0, 1]")));
            }
            writeln!(out, "x,U,dU").map_err(runtime_err)?;
            for k in 0..=grid {
                let x = k as f64 / grid as f64;
                writeln!(
                    out,
                    "{x},{},{}",
                    potential::potential_u(x, eps, dl, dr),
                    potential::potential_du(x, eps, dl, dr)
                )
                .map_err(runtime_err)?;
            }
        }
        PotentialCmd::AreaThreshold { dl, dr, tol } => {
            if tol < 1e-8 {
                return Err(CliError::Config("tol below the supported resolution 1e-8".into()));
            }
            let t = potential::area_threshold(dl, dr, tol).map_err(runtime_err)?;
            writeln!(out, "dl,dr,by_potential,by_exit_integral").map_err(runtime_err)?;
            writeln!(out, "{dl},{dr},{},{}", t.by_potential, t.by_exit_integral)
                .map_err(runtime_err)?;
        }
    }
    Ok(())
}

fn map_harness_err(e: harness::HarnessError) -> CliError {
    match e {
        harness::HarnessError::Config(c) => CliError::Config(c.to_string()),
        harness::HarnessError::Parse(p) => CliError::Config(p.to_string()),
        other => CliError::Runtime(other.to_string()),
    }
}

fn run_cmd(
    config: &PathBuf,
    out_flag: Option<&PathBuf>,
    format_flag: Option<&str>,
) -> Result<(), CliError> {
    let file = harness::load_config_file(config).map_err(map_harness_err)?;
    let format = match format_flag {
        Some("csv") => OutputFormat::Csv,
        Some("json") => OutputFormat::Json,
        Some(other) => {
            return Err(CliError::Config(format!("unknown format {other:?}")));
        }
        None => file.format.unwrap_or_default(),
    };
    let result = harness::run_experiment(&file.experiment).map_err(map_harness_err)?;
    let out_path = out_flag.cloned().or_else(|| file.out.clone().map(PathBuf::from));
    let mut out = open_output(&out_path)?;
    harness::emit(&result, format, &mut out).map_err(runtime_err)?;
    eprintln!("completed in {:?}", result.wall_time);
    Ok(())
}
