//! Reproducible experiment runner.
//!
//! A JSON [`ExperimentConfig`] fully determines a run: the per-trial seed is
//! derived from the base seed and the trial's global index, trials execute
//! independently (in parallel under the default feature), and aggregation is
//! order-independent, so the same config always produces the same
//! [`SimResult`] byte for byte.
//!
//! CSV rows carry the fixed columns
//! `kind,param_summary,eps,trials,block_fail,bit_erasures,mean_iters,seed`.
//! Simulation kinds fill them literally. Analysis kinds map onto them as
//! documented on [`run_experiment`]. Wall time is measured but deliberately
//! kept out of the serialized record.

use std::io::Write;
use std::path::Path;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channel::{transmit, Word};
use crate::de;
use crate::decoders::{self, DecodeError};
use crate::ensemble::DegreeDistribution;
use crate::exec;
use crate::graphgen::{self, GraphError};
use crate::polar::{self, PolarError};
use crate::potential;
use crate::rng::derive_seed;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("trials must be at least 1")]
    InvalidTrials,
    #[error("the eps list is empty")]
    EmptyEps,
    #[error("eps {0} outside [0, 1]")]
    EpsOutOfRange(f64),
    #[error("depth {0} exceeds the supported maximum {max}", max = polar::MAX_DEPTH)]
    DepthTooLarge(u32),
    #[error("rate {0} outside [0, 1]")]
    RateOutOfRange(f64),
    #[error("need 2 <= dl < dr, got ({dl}, {dr})")]
    BadEnsemble { dl: u32, dr: u32 },
    #[error("block length must be at least 1")]
    InvalidBlockLength,
    #[error("coupled chain needs 1 <= w <= L, got w = {w}, L = {l}")]
    BadWindow { w: usize, l: usize },
    #[error("m * dl must be divisible by dr")]
    BadCoupledSockets,
    #[error("target block error {0} outside (0, 1)")]
    InvalidTarget(f64),
    #[error("scaling needs at least 3 depths")]
    TooFewDepths,
    #[error("grid must be at least 100")]
    GridTooSmall,
    #[error("tolerance must be positive")]
    InvalidTol,
    #[error("output directory {0:?} does not exist")]
    MissingOutputDir(String),
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid config: {0}")]
    Config(#[from] ConfigError),
    #[error("graph sampling failed in trial {trial}: {source}")]
    Graph { trial: u64, source: GraphError },
    #[error("polar construction failed: {0}")]
    Polar(#[from] PolarError),
    #[error("decoding failed in trial {trial}: {source}")]
    Decode { trial: u64, source: DecodeError },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("config parse error: {0}")]
    Parse(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DecoderKind {
    Bp,
    Peel,
    Map,
}

impl Default for DecoderKind {
    fn default() -> Self {
        DecoderKind::Bp
    }
}

fn default_tol() -> f64 {
    1e-6
}

fn default_de_iters() -> usize {
    200_000
}

fn default_grid() -> usize {
    1000
}

/// One experiment, fully specified. The `kind` tag selects the variant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ExperimentConfig {
    /// Monte Carlo successive-cancellation decoding of polar codes, one
    /// code per eps (designed at that eps).
    PolarSim { depth: u32, rate: f64, eps: Vec<f64>, trials: u64, seed: u64 },
    /// Monte Carlo erasure decoding of configuration-model LDPC codes; a
    /// fresh graph is sampled for every trial.
    LdpcSim {
        dl: u32,
        dr: u32,
        n: usize,
        eps: Vec<f64>,
        trials: u64,
        seed: u64,
        #[serde(default)]
        decoder: DecoderKind,
    },
    /// Monte Carlo erasure decoding of random spatially coupled chains.
    CoupledSim {
        dl: u32,
        dr: u32,
        l: usize,
        w: usize,
        m: usize,
        eps: Vec<f64>,
        trials: u64,
        seed: u64,
    },
    /// Density-evolution runs, one per eps.
    De {
        dl: u32,
        dr: u32,
        eps: Vec<f64>,
        #[serde(default = "default_de_iters")]
        max_iters: usize,
        #[serde(default = "default_tol")]
        tol: f64,
    },
    /// BP threshold of the ensemble.
    Threshold {
        dl: u32,
        dr: u32,
        #[serde(default = "default_tol")]
        tol: f64,
    },
    /// Potential-function summary per eps.
    PotentialScan {
        dl: u32,
        dr: u32,
        eps: Vec<f64>,
        #[serde(default = "default_grid")]
        grid: usize,
    },
    /// Polar finite-length scaling fit.
    Scaling { eps: f64, target: f64, depths: Vec<u32>, #[serde(default)] seed: u64 },
}

fn check_eps_list(eps: &[f64]) -> Result<(), ConfigError> {
    if eps.is_empty() {
        return Err(ConfigError::EmptyEps);
    }
    for &e in eps {
        if !(0.0..=1.0).contains(&e) {
            return Err(ConfigError::EpsOutOfRange(e));
        }
    }
    Ok(())
}

fn check_ensemble(dl: u32, dr: u32) -> Result<(), ConfigError> {
    if dl < 2 || dl >= dr {
        return Err(ConfigError::BadEnsemble { dl, dr });
    }
    Ok(())
}

impl ExperimentConfig {
    /// Field-by-field validation; the first offending field is reported.
    pub fn validate(&self) -> Result<(), ConfigError> {
        match self {
            ExperimentConfig::PolarSim { depth, rate, eps, trials, .. } => {
                if *depth > polar::MAX_DEPTH {
                    return Err(ConfigError::DepthTooLarge(*depth));
                }
                if !(0.0..=1.0).contains(rate) {
                    return Err(ConfigError::RateOutOfRange(*rate));
                }
                check_eps_list(eps)?;
                if *trials < 1 {
                    return Err(ConfigError::InvalidTrials);
                }
            }
            ExperimentConfig::LdpcSim { dl, dr, n, eps, trials, .. } => {
                check_ensemble(*dl, *dr)?;
                if *n < 1 {
                    return Err(ConfigError::InvalidBlockLength);
                }
                check_eps_list(eps)?;
                if *trials < 1 {
                    return Err(ConfigError::InvalidTrials);
                }
            }
            ExperimentConfig::CoupledSim { dl, dr, l, w, m, eps, trials, .. } => {
                check_ensemble(*dl, *dr)?;
                if *w < 1 || w > l {
                    return Err(ConfigError::BadWindow { w: *w, l: *l });
                }
                if (*m * *dl as usize) % *dr as usize != 0 {
                    return Err(ConfigError::BadCoupledSockets);
                }
                check_eps_list(eps)?;
                if *trials < 1 {
                    return Err(ConfigError::InvalidTrials);
                }
            }
            ExperimentConfig::De { dl, dr, eps, tol, .. } => {
                check_ensemble(*dl, *dr)?;
                check_eps_list(eps)?;
                if *tol <= 0.0 {
                    return Err(ConfigError::InvalidTol);
                }
            }
            ExperimentConfig::Threshold { dl, dr, tol } => {
                check_ensemble(*dl, *dr)?;
                if *tol <= 0.0 {
                    return Err(ConfigError::InvalidTol);
                }
            }
            ExperimentConfig::PotentialScan { dl, dr, eps, grid } => {
                check_ensemble(*dl, *dr)?;
                check_eps_list(eps)?;
                if *grid < 100 {
                    return Err(ConfigError::GridTooSmall);
                }
            }
            ExperimentConfig::Scaling { eps, target, depths, .. } => {
                if !(0.0..=1.0).contains(eps) {
                    return Err(ConfigError::EpsOutOfRange(*eps));
                }
                if !(0.0 < *target && *target < 1.0) {
                    return Err(ConfigError::InvalidTarget(*target));
                }
                if depths.len() < 3 {
                    return Err(ConfigError::TooFewDepths);
                }
                for &d in depths {
                    if d > polar::MAX_DEPTH {
                        return Err(ConfigError::DepthTooLarge(d));
                    }
                }
            }
        }
        Ok(())
    }

    fn kind_name(&self) -> &'static str {
        match self {
            ExperimentConfig::PolarSim { .. } => "polar-sim",
            ExperimentConfig::LdpcSim { .. } => "ldpc-sim",
            ExperimentConfig::CoupledSim { .. } => "coupled-sim",
            ExperimentConfig::De { .. } => "de",
            ExperimentConfig::Threshold { .. } => "threshold",
            ExperimentConfig::PotentialScan { .. } => "potential-scan",
            ExperimentConfig::Scaling { .. } => "scaling",
        }
    }

    fn param_summary(&self) -> String {
        match self {
            ExperimentConfig::PolarSim { depth, rate, .. } => format!("depth{depth}-rate{rate}"),
            ExperimentConfig::LdpcSim { dl, dr, n, decoder, .. } => {
                let d = match decoder {
                    DecoderKind::Bp => "bp",
                    DecoderKind::Peel => "peel",
                    DecoderKind::Map => "map",
                };
                format!("dl{dl}-dr{dr}-n{n}-{d}")
            }
            ExperimentConfig::CoupledSim { dl, dr, l, w, m, .. } => {
                format!("dl{dl}-dr{dr}-L{l}-w{w}-M{m}")
            }
            ExperimentConfig::De { dl, dr, .. } => format!("dl{dl}-dr{dr}"),
            ExperimentConfig::Threshold { dl, dr, .. } => format!("dl{dl}-dr{dr}"),
            ExperimentConfig::PotentialScan { dl, dr, .. } => format!("dl{dl}-dr{dr}"),
            ExperimentConfig::Scaling { target, depths, .. } => {
                format!("target{target}-depths{}-{}", depths[0], depths[depths.len() - 1])
            }
        }
    }
}

/// One aggregated record, one CSV row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsRecord {
    pub kind: String,
    pub param_summary: String,
    pub eps: f64,
    pub trials: u64,
    pub block_fail: u64,
    pub bit_erasures: u64,
    pub mean_iters: f64,
    pub seed: u64,
}

/// The result of one experiment run.
///
/// `wall_time` is informational only and never serialized, keeping emitted
/// files identical across runs of the same config.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimResult {
    pub config: ExperimentConfig,
    pub records: Vec<EpsRecord>,
    #[serde(skip)]
    pub wall_time: Duration,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ExecMode {
    Parallel,
    Sequential,
}

fn map_trials<T: Send>(
    mode: ExecMode,
    n: u64,
    f: impl Fn(u64) -> T + Sync + Send,
) -> Vec<T> {
    match mode {
        ExecMode::Parallel => exec::map_indexed(n, f),
        ExecMode::Sequential => exec::map_indexed_seq(n, f),
    }
}

/// Runs the experiment with the default execution mode (parallel trials
/// when the `parallel` feature is on).
///
/// Analysis kinds map onto the record columns as follows. `de`: one record
/// per eps, `block_fail` is 1 when the limit stays above 1e-8 and
/// `mean_iters` is the iteration count. `threshold`: a single record whose
/// `eps` column carries the computed threshold. `potential-scan`: per eps,
/// `block_fail` flags a nonpositive energy gap and `bit_erasures` counts
/// nonzero stationary points. `scaling`: a single record with the fitted
/// exponent in `mean_iters`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<SimResult, HarnessError> {
    run_with_mode(cfg, ExecMode::Parallel)
}

/// Same computation, forced onto the sequential path. Exists so equality of
/// the two schedules is testable.
pub fn run_experiment_sequential(cfg: &ExperimentConfig) -> Result<SimResult, HarnessError> {
    run_with_mode(cfg, ExecMode::Sequential)
}

struct TrialOutcome {
    block_fail: bool,
    bit_erasures: u64,
    iterations: u64,
}

fn run_with_mode(cfg: &ExperimentConfig, mode: ExecMode) -> Result<SimResult, HarnessError> {
    cfg.validate()?;
    let start = Instant::now();
    let kind = cfg.kind_name().to_string();
    let summary = cfg.param_summary();
    let mut records = Vec::new();

    match cfg {
        ExperimentConfig::PolarSim { depth, rate, eps, trials, seed } => {
            let n = 1usize << depth;
            let k = (*rate * n as f64).round() as usize;
            for (ei, &e) in eps.iter().enumerate() {
                let spec = polar::construct(*depth, e, k)?;
                let outcomes = map_trials(mode, *trials, |t| {
                    let trial_seed = derive_seed(*seed, ei as u64 * trials + t);
                    let y = transmit(&Word::zero(n), e, trial_seed);
                    let (u_hat, success) = polar::sc_decode(&y, &spec).expect("length fixed");
                    let bit_erasures = u_hat
                        .iter()
                        .enumerate()
                        .filter(|(i, s)| !spec.is_frozen(*i) && s.is_erased())
                        .count() as u64;
                    TrialOutcome { block_fail: !success, bit_erasures, iterations: 0 }
                });
                records.push(aggregate(&kind, &summary, e, *seed, &outcomes));
            }
        }
        ExperimentConfig::LdpcSim { dl, dr, n, eps, trials, seed, decoder } => {
            let dd = DegreeDistribution::regular(*dl, *dr)
                .map_err(|_| ConfigError::BadEnsemble { dl: *dl, dr: *dr })?;
            for (ei, &e) in eps.iter().enumerate() {
                let outcomes = map_trials(mode, *trials, |t| -> Result<TrialOutcome, HarnessError> {
                    let trial_seed = derive_seed(*seed, ei as u64 * trials + t);
                    let graph = graphgen::sample_configuration(&dd, *n, derive_seed(trial_seed, 0))
                        .map_err(|source| HarnessError::Graph { trial: t, source })?;
                    let rx = transmit(&Word::zero(*n), e, derive_seed(trial_seed, 1));
                    let result = match decoder {
                        DecoderKind::Bp => decoders::bp_decode(&graph, &rx, 10 * n),
                        DecoderKind::Peel => decoders::peel_decode(&graph, &rx),
                        DecoderKind::Map => decoders::map_decode(&graph, &rx),
                    }
                    .map_err(|source| HarnessError::Decode { trial: t, source })?;
                    Ok(TrialOutcome {
                        block_fail: !result.fully_decoded(),
                        bit_erasures: (graph.n_vars - result.resolved_count) as u64,
                        iterations: result.iterations as u64,
                    })
                });
                let outcomes: Vec<TrialOutcome> =
                    outcomes.into_iter().collect::<Result<_, _>>()?;
                records.push(aggregate(&kind, &summary, e, *seed, &outcomes));
            }
        }
        ExperimentConfig::CoupledSim { dl, dr, l, w, m, eps, trials, seed } => {
            for (ei, &e) in eps.iter().enumerate() {
                let n = l * m;
                let outcomes = map_trials(mode, *trials, |t| -> Result<TrialOutcome, HarnessError> {
                    let trial_seed = derive_seed(*seed, ei as u64 * trials + t);
                    let graph =
                        graphgen::sample_coupled(*dl, *dr, *l, *w, *m, derive_seed(trial_seed, 0))
                            .map_err(|source| HarnessError::Graph { trial: t, source })?;
                    let rx = transmit(&Word::zero(n), e, derive_seed(trial_seed, 1));
                    let result = decoders::bp_decode(&graph, &rx, 10 * n)
                        .map_err(|source| HarnessError::Decode { trial: t, source })?;
                    Ok(TrialOutcome {
                        block_fail: !result.fully_decoded(),
                        bit_erasures: (n - result.resolved_count) as u64,
                        iterations: result.iterations as u64,
                    })
                });
                let outcomes: Vec<TrialOutcome> =
                    outcomes.into_iter().collect::<Result<_, _>>()?;
                records.push(aggregate(&kind, &summary, e, *seed, &outcomes));
            }
        }
        ExperimentConfig::De { dl, dr, eps, max_iters, tol } => {
            let dd = DegreeDistribution::regular(*dl, *dr)
                .map_err(|_| ConfigError::BadEnsemble { dl: *dl, dr: *dr })?;
            for &e in eps {
                let run = de::de_iterate(&dd, e, *max_iters, *tol);
                records.push(EpsRecord {
                    kind: kind.clone(),
                    param_summary: summary.clone(),
                    eps: e,
                    trials: 1,
                    block_fail: (run.limit_x > 1e-8) as u64,
                    bit_erasures: 0,
                    mean_iters: (run.trajectory.len() - 1) as f64,
                    seed: 0,
                });
            }
        }
        ExperimentConfig::Threshold { dl, dr, tol } => {
            let dd = DegreeDistribution::regular(*dl, *dr)
                .map_err(|_| ConfigError::BadEnsemble { dl: *dl, dr: *dr })?;
            let threshold = de::bp_threshold(&dd, (*tol).max(1e-10));
            records.push(EpsRecord {
                kind: kind.clone(),
                param_summary: summary.clone(),
                eps: threshold,
                trials: 1,
                block_fail: 0,
                bit_erasures: 0,
                mean_iters: 0.0,
                seed: 0,
            });
        }
        ExperimentConfig::PotentialScan { dl, dr, eps, .. } => {
            for &e in eps {
                let points = potential::stationary_points(e, *dl, *dr, 1e-10);
                let gap_nonpositive = matches!(
                    potential::energy_gap(e, *dl, *dr),
                    Err(potential::PotentialError::NonPositiveGap { .. })
                );
                records.push(EpsRecord {
                    kind: kind.clone(),
                    param_summary: summary.clone(),
                    eps: e,
                    trials: 1,
                    block_fail: gap_nonpositive as u64,
                    bit_erasures: points.len() as u64,
                    mean_iters: 0.0,
                    seed: 0,
                });
            }
        }
        ExperimentConfig::Scaling { eps, target, depths, seed } => {
            let fit = polar::scaling_exponent(*eps, *target, depths)?;
            records.push(EpsRecord {
                kind: kind.clone(),
                param_summary: summary.clone(),
                eps: *eps,
                trials: depths.len() as u64,
                block_fail: 0,
                bit_erasures: 0,
                mean_iters: fit.mu,
                seed: *seed,
            });
        }
    }

    Ok(SimResult { config: cfg.clone(), records, wall_time: start.elapsed() })
}

fn aggregate(
    kind: &str,
    summary: &str,
    eps: f64,
    seed: u64,
    outcomes: &[TrialOutcome],
) -> EpsRecord {
    let trials = outcomes.len() as u64;
    EpsRecord {
        kind: kind.to_string(),
        param_summary: summary.to_string(),
        eps,
        trials,
        block_fail: outcomes.iter().filter(|o| o.block_fail).count() as u64,
        bit_erasures: outcomes.iter().map(|o| o.bit_erasures).sum(),
        mean_iters: outcomes.iter().map(|o| o.iterations as f64).sum::<f64>() / trials as f64,
        seed,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl Default for OutputFormat {
    fn default() -> Self {
        OutputFormat::Csv
    }
}

pub const CSV_HEADER: &str = "kind,param_summary,eps,trials,block_fail,bit_erasures,mean_iters,seed";

/// Writes the result in the chosen format. Identical results serialize to
/// identical bytes.
pub fn emit(result: &SimResult, format: OutputFormat, out: &mut dyn Write) -> std::io::Result<()> {
    match format {
        OutputFormat::Csv => {
            writeln!(out, "{CSV_HEADER}")?;
            for r in &result.records {
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{}",
                    r.kind,
                    r.param_summary,
                    r.eps,
                    r.trials,
                    r.block_fail,
                    r.bit_erasures,
                    r.mean_iters,
                    r.seed
                )?;
            }
        }
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut *out, result)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

/// A config file: the experiment plus optional output settings.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentFile {
    #[serde(flatten)]
    pub experiment: ExperimentConfig,
    #[serde(default)]
    pub out: Option<String>,
    #[serde(default)]
    pub format: Option<OutputFormat>,
}

/// Loads and validates a config file, including that the output directory
/// (when given) exists.
pub fn load_config_file(path: &Path) -> Result<ExperimentFile, HarnessError> {
    let text = std::fs::read_to_string(path)?;
    let file: ExperimentFile = serde_json::from_str(&text)?;
    file.experiment.validate()?;
    if let Some(out) = &file.out {
        let parent = Path::new(out).parent().filter(|p| !p.as_os_str().is_empty());
        if let Some(dir) = parent {
            if !dir.exists() {
                return Err(ConfigError::MissingOutputDir(dir.display().to_string()).into());
            }
        }
    }
    Ok(file)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_ldpc_config() -> ExperimentConfig {
        ExperimentConfig::LdpcSim {
            dl: 3,
            dr: 6,
            n: 128,
            eps: vec![0.0, 0.35, 0.45],
            trials: 16,
            seed: 9,
            decoder: DecoderKind::Bp,
        }
    }

    fn emit_csv(result: &SimResult) -> String {
        let mut buf = Vec::new();
        emit(result, OutputFormat::Csv, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn zero_erasure_rate_never_fails() {
        let cfg = ExperimentConfig::LdpcSim {
            dl: 3,
            dr: 6,
            n: 256,
            eps: vec![0.0],
            trials: 8,
            seed: 1,
            decoder: DecoderKind::Bp,
        };
        let result = run_experiment(&cfg).unwrap();
        assert_eq!(result.records[0].block_fail, 0);
        assert_eq!(result.records[0].bit_erasures, 0);
    }

    #[test]
    fn reruns_are_byte_identical() {
        let cfg = small_ldpc_config();
        let a = emit_csv(&run_experiment(&cfg).unwrap());
        let b = emit_csv(&run_experiment(&cfg).unwrap());
        assert_eq!(a, b);
        assert!(a.starts_with(CSV_HEADER));
        assert_eq!(a.lines().count(), 4);
    }

    #[test]
    fn parallel_and_sequential_agree() {
        let cfg = small_ldpc_config();
        let par = run_experiment(&cfg).unwrap();
        let seq = run_experiment_sequential(&cfg).unwrap();
        assert_eq!(par.records, seq.records);
    }

    #[test]
    fn json_round_trip_reproduces_the_record() {
        let cfg = small_ldpc_config();
        let result = run_experiment(&cfg).unwrap();
        let mut buf = Vec::new();
        emit(&result, OutputFormat::Json, &mut buf).unwrap();
        let back: SimResult = serde_json::from_slice(&buf).unwrap();
        assert_eq!(back.records, result.records);
        assert_eq!(back.config, result.config);
    }

    #[test]
    fn empty_eps_list_yields_header_only_csv() {
        // Validation rejects an empty list; an emitted empty result is just
        // the header.
        let result = SimResult {
            config: small_ldpc_config(),
            records: vec![],
            wall_time: Duration::ZERO,
        };
        let text = emit_csv(&result);
        assert_eq!(text, format!("{CSV_HEADER}\n"));
    }

    #[test]
    fn single_record_has_all_columns() {
        let cfg = ExperimentConfig::Threshold { dl: 3, dr: 6, tol: 1e-6 };
        let result = run_experiment(&cfg).unwrap();
        let text = emit_csv(&result);
        let row = text.lines().nth(1).unwrap();
        assert_eq!(row.split(',').count(), 8);
        let eps: f64 = row.split(',').nth(2).unwrap().parse().unwrap();
        assert!((eps - 0.42944).abs() < 1e-3);
    }

    #[test]
    fn config_validation_enumerates_fields() {
        let bad_trials = ExperimentConfig::LdpcSim {
            dl: 3,
            dr: 6,
            n: 64,
            eps: vec![0.4],
            trials: 0,
            seed: 0,
            decoder: DecoderKind::Bp,
        };
        assert_eq!(bad_trials.validate(), Err(ConfigError::InvalidTrials));

        let bad_eps = ExperimentConfig::De { dl: 3, dr: 6, eps: vec![1.2], max_iters: 10, tol: 1e-9 };
        assert_eq!(bad_eps.validate(), Err(ConfigError::EpsOutOfRange(1.2)));

        let bad_pair = ExperimentConfig::Threshold { dl: 6, dr: 3, tol: 1e-6 };
        assert_eq!(bad_pair.validate(), Err(ConfigError::BadEnsemble { dl: 6, dr: 3 }));

        let bad_window = ExperimentConfig::CoupledSim {
            dl: 3,
            dr: 6,
            l: 4,
            w: 9,
            m: 6,
            eps: vec![0.3],
            trials: 1,
            seed: 0,
        };
        assert_eq!(bad_window.validate(), Err(ConfigError::BadWindow { w: 9, l: 4 }));

        let too_few = ExperimentConfig::Scaling {
            eps: 0.5,
            target: 1e-3,
            depths: vec![10, 12],
            seed: 0,
        };
        assert_eq!(too_few.validate(), Err(ConfigError::TooFewDepths));
    }

    #[test]
    fn config_json_round_trip() {
        let text = r#"{"kind":"ldpc-sim","dl":3,"dr":6,"n":512,"eps":[0.4,0.42],"trials":10,"seed":3}"#;
        let cfg: ExperimentConfig = serde_json::from_str(text).unwrap();
        assert!(matches!(cfg, ExperimentConfig::LdpcSim { decoder: DecoderKind::Bp, .. }));
        let back = serde_json::to_string(&cfg).unwrap();
        let again: ExperimentConfig = serde_json::from_str(&back).unwrap();
        assert_eq!(cfg, again);
    }

    #[test]
    fn polar_sim_failures_respect_the_union_bound_loosely() {
        let cfg = ExperimentConfig::PolarSim {
            depth: 6,
            rate: 0.25,
            eps: vec![0.3],
            trials: 400,
            seed: 77,
        };
        let result = run_experiment(&cfg).unwrap();
        let r = &result.records[0];
        let spec = polar::construct(6, 0.3, 16).unwrap();
        let bound = polar::block_error_bound(&spec);
        let p_hat = r.block_fail as f64 / r.trials as f64;
        let sigma = (bound * (1.0 - bound) / r.trials as f64).sqrt();
        assert!(p_hat <= bound + 4.0 * sigma, "{p_hat} vs {bound}");
    }
}
