//! A complete, serializable description of one harness invocation.
//!
//! The manifest is line-oriented `key=value`; parsing one back yields a
//! spec whose execution reproduces the original CSVs byte for byte.

use std::collections::BTreeMap;

use super::{
    pool_gamma, run_baseline_with_rule, run_beta_sweep, run_early_stop_table,
    run_proposed_with_rule, ChannelScenario, EarlyStopTable, HedgeParams, LossMode,
    MixtureGammaRule, NoiseModel, ProposedOptions, RunReport, ScenarioKind, StopRule,
};
use crate::error::{Error, Result};
use crate::expert_bank::ExpertPool;
use crate::stable_noise::ChannelDensity;
use crate::turbo::{Interleaver, PunctureMask, RscSpec, TailMode, TurboCodeConfig};

/// How the interleaver permutation is drawn from its seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InterleaverKind {
    /// Uniform pseudorandom permutation.
    Random,
    /// Spread permutation with spread `floor(sqrt(k/2))`.
    SRandom,
}

impl InterleaverKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "random" => Ok(Self::Random),
            "s-random" => Ok(Self::SRandom),
            other => Err(Error::Config(format!(
                "unsupported interleaver {other:?} (expected random or s-random)"
            ))),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Self::Random => "random",
            Self::SRandom => "s-random",
        }
    }

    pub fn build(&self, len: usize, seed: u64) -> Interleaver {
        match self {
            Self::Random => Interleaver::random(len, seed),
            Self::SRandom => {
                let spread = ((len / 2) as f64).sqrt().floor() as usize;
                Interleaver::s_random(len, spread.max(1), seed)
            }
        }
    }
}

/// Which experiment the spec describes.
#[derive(Debug, Clone, PartialEq)]
pub enum SimCommand {
    Run,
    BetaSweep { betas: Vec<f64> },
    EarlyStopTable { taus: Vec<usize>, alphas: Vec<f64> },
}

impl SimCommand {
    fn label(&self) -> &'static str {
        match self {
            SimCommand::Run => "run",
            SimCommand::BetaSweep { .. } => "beta-sweep",
            SimCommand::EarlyStopTable { .. } => "early-stop-table",
        }
    }
}

/// Which decoder front end a run uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Proposed,
    Gaussian,
    Cauchy,
    MeBcgm,
    MixtureOracle,
}

impl Method {
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "proposed" => Ok(Self::Proposed),
            "gaussian" => Ok(Self::Gaussian),
            "cauchy" => Ok(Self::Cauchy),
            "mebcgm" => Ok(Self::MeBcgm),
            "mixture-oracle" => Ok(Self::MixtureOracle),
            other => Err(Error::Config(format!(
                "unsupported method {other:?} (expected proposed, gaussian, cauchy, mebcgm, mixture-oracle)"
            ))),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Self::Proposed => "proposed",
            Self::Gaussian => "gaussian",
            Self::Cauchy => "cauchy",
            Self::MeBcgm => "mebcgm",
            Self::MixtureOracle => "mixture-oracle",
        }
    }
}

/// Expert pool construction rule.
#[derive(Debug, Clone, PartialEq)]
pub enum PoolSpec {
    /// Cauchy, mixtures at 1.2/1.4/1.6/1.8, Gaussian.
    Default,
    /// One expert per listed alpha.
    Alphas(Vec<f64>),
}

impl PoolSpec {
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "default" {
            return Ok(Self::Default);
        }
        let alphas = parse_f64_list(s)?;
        Ok(Self::Alphas(alphas))
    }

    pub fn label(&self) -> String {
        match self {
            Self::Default => "default".into(),
            Self::Alphas(a) => join(a),
        }
    }

    pub fn build(&self, gamma: f64, iters: usize) -> Result<ExpertPool> {
        let mut pool = match self {
            Self::Default => ExpertPool::default_pool(gamma)?,
            Self::Alphas(alphas) => ExpertPool::from_alphas(alphas, gamma)?,
        };
        pool.iters = iters;
        Ok(pool)
    }
}

/// Everything needed to reproduce one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub command: SimCommand,
    pub scenario: ScenarioKind,
    pub gsnr_db: Vec<f64>,
    pub amplitude: f64,
    pub seed: u64,
    pub blocks: usize,
    pub beta: f64,
    pub init_weight: f64,
    pub tau: Option<usize>,
    pub iters: usize,
    pub rate: String,
    pub k: usize,
    pub pool: PoolSpec,
    pub loss: LossMode,
    pub method: Method,
    pub mixture_gamma: MixtureGammaRule,
    pub error_target: usize,
    pub max_blocks: usize,
    pub feedback_poly: u32,
    pub forward_poly: u32,
    pub tail_mode: TailMode,
    pub interleaver: InterleaverKind,
    pub interleaver_seed: u64,
}

/// Reports plus, for table runs, the assembled table.
#[derive(Debug, Clone)]
pub struct SimOutput {
    pub reports: Vec<RunReport>,
    pub table: Option<EarlyStopTable>,
}

impl RunSpec {
    /// A `run` spec with the experiment defaults; the interleaver seed is
    /// derived from the master seed.
    pub fn defaults(scenario: ScenarioKind, gsnr_db: Vec<f64>, blocks: usize, seed: u64) -> Self {
        Self {
            command: SimCommand::Run,
            scenario,
            gsnr_db,
            amplitude: 1.0,
            seed,
            blocks,
            beta: 0.90,
            init_weight: 1.0,
            tau: None,
            iters: 8,
            rate: "4/5".into(),
            k: 128,
            pool: PoolSpec::Default,
            loss: LossMode::Genie,
            method: Method::Proposed,
            mixture_gamma: MixtureGammaRule::PerComponentGsnr,
            error_target: 50,
            max_blocks: 1_000_000,
            feedback_poly: 0b111,
            forward_poly: 0b101,
            tail_mode: TailMode::TerminateBoth,
            interleaver: InterleaverKind::Random,
            interleaver_seed: super::rng::interleaver_seed(seed),
        }
    }

    pub fn codec_config(&self) -> Result<TurboCodeConfig> {
        TurboCodeConfig::new(
            self.k,
            RscSpec::new(self.feedback_poly, self.forward_poly)?,
            self.interleaver.build(self.k, self.interleaver_seed),
            PunctureMask::parse(&self.rate)?,
            self.tail_mode,
            self.amplitude,
        )
    }

    fn scenario_at(&self, gsnr_db: f64) -> ChannelScenario {
        ChannelScenario {
            kind: self.scenario,
            gsnr_db,
            amplitude: self.amplitude,
            seed: self.seed,
        }
    }

    fn proposed_options(&self) -> ProposedOptions {
        ProposedOptions {
            hedge: HedgeParams {
                beta: self.beta,
                init_weight: self.init_weight,
                tau: self.tau,
            },
            loss: self.loss,
            record_trace: true,
        }
    }

    fn baseline_density(&self, scenario: &ChannelScenario) -> Result<ChannelDensity> {
        let gamma = pool_gamma(scenario)?;
        match self.method {
            Method::Gaussian => ChannelDensity::gaussian(2.0 * gamma),
            Method::Cauchy => ChannelDensity::cauchy(gamma),
            Method::MeBcgm => match scenario.kind {
                ScenarioKind::Single { .. } => {
                    NoiseModel::for_scenario(scenario, self.mixture_gamma)?.oracle_density()
                }
                ScenarioKind::Mixture { .. } => Err(Error::Config(
                    "mebcgm baseline needs a single-alpha scenario; use mixture-oracle".into(),
                )),
            },
            Method::MixtureOracle => match scenario.kind {
                ScenarioKind::Mixture { .. } => {
                    NoiseModel::for_scenario(scenario, self.mixture_gamma)?.oracle_density()
                }
                ScenarioKind::Single { .. } => Err(Error::Config(
                    "mixture-oracle baseline needs a mixture scenario".into(),
                )),
            },
            Method::Proposed => Err(Error::Config("proposed is not a baseline".into())),
        }
    }

    /// Validates and runs the experiment the spec describes.
    pub fn execute(&self) -> Result<SimOutput> {
        let cfg = self.codec_config()?;
        match &self.command {
            SimCommand::Run => {
                let mut reports = Vec::new();
                for &gsnr in &self.gsnr_db {
                    let scenario = self.scenario_at(gsnr);
                    let report = match self.method {
                        Method::Proposed => {
                            let pool = self.pool.build(pool_gamma(&scenario)?, self.iters)?;
                            run_proposed_with_rule(
                                &scenario,
                                &cfg,
                                &pool,
                                &self.proposed_options(),
                                self.blocks,
                                self.mixture_gamma,
                            )?
                        }
                        _ => {
                            let density = self.baseline_density(&scenario)?;
                            run_baseline_with_rule(
                                &scenario,
                                &cfg,
                                &density,
                                self.iters,
                                StopRule::ErrorTarget {
                                    min_blocks: self.blocks,
                                    target_errors: self.error_target,
                                    max_blocks: self.max_blocks,
                                },
                                self.method.label(),
                                self.mixture_gamma,
                            )?
                        }
                    };
                    reports.push(report);
                }
                Ok(SimOutput {
                    reports,
                    table: None,
                })
            }
            SimCommand::BetaSweep { betas } => {
                if betas.is_empty() {
                    return Err(Error::Config("beta sweep needs at least one beta".into()));
                }
                let mut reports = Vec::new();
                for &gsnr in &self.gsnr_db {
                    let scenario = self.scenario_at(gsnr);
                    let pool = self.pool.build(pool_gamma(&scenario)?, self.iters)?;
                    reports.extend(run_beta_sweep(
                        &scenario,
                        &cfg,
                        &pool,
                        betas,
                        &self.proposed_options(),
                        self.blocks,
                    )?);
                }
                Ok(SimOutput {
                    reports,
                    table: None,
                })
            }
            SimCommand::EarlyStopTable { taus, alphas } => {
                let opts = self.proposed_options();
                let pool_spec = self.pool.clone();
                let iters = self.iters;
                let table = run_early_stop_table(
                    alphas,
                    &self.gsnr_db,
                    taus,
                    &cfg,
                    |gamma| pool_spec.build(gamma, iters),
                    &opts,
                    self.blocks,
                    self.seed,
                )?;
                Ok(SimOutput {
                    reports: Vec::new(),
                    table: Some(table),
                })
            }
        }
    }

    /// Line-oriented `key=value` echo of every configuration value.
    pub fn to_manifest(&self) -> String {
        let mut lines = vec![
            format!("command={}", self.command.label()),
            format!("scenario={}", scenario_label(&self.scenario)),
            format!("gsnr_db={}", join(&self.gsnr_db)),
            format!("amplitude={}", self.amplitude),
            format!("seed={}", self.seed),
            format!("blocks={}", self.blocks),
            format!("beta={}", self.beta),
            format!("init_weight={}", self.init_weight),
            format!("tau={}", self.tau.map_or("none".into(), |t| t.to_string())),
            format!("iters={}", self.iters),
            format!("rate={}", self.rate),
            format!("k={}", self.k),
            format!("pool={}", self.pool.label()),
            format!("loss={}", self.loss.label()),
            format!("method={}", self.method.label()),
            format!("mixture_gamma={}", self.mixture_gamma.label()),
            format!("error_target={}", self.error_target),
            format!("max_blocks={}", self.max_blocks),
            format!("feedback_poly={}", self.feedback_poly),
            format!("forward_poly={}", self.forward_poly),
            format!("tail_mode={}", self.tail_mode.label()),
            format!("interleaver={}", self.interleaver.label()),
            format!("interleaver_seed={}", self.interleaver_seed),
        ];
        match &self.command {
            SimCommand::BetaSweep { betas } => lines.push(format!("betas={}", join(betas))),
            SimCommand::EarlyStopTable { taus, alphas } => {
                lines.push(format!("taus={}", join(taus)));
                lines.push(format!("alphas={}", join(alphas)));
            }
            SimCommand::Run => {}
        }
        lines.join("\n") + "\n"
    }

    /// Parses a manifest back into a spec.
    pub fn from_manifest(text: &str) -> Result<Self> {
        let mut kv = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Manifest(format!("line {}: expected key=value", lineno + 1))
            })?;
            kv.insert(key.trim().to_string(), value.trim().to_string());
        }
        let get = |key: &str| -> Result<&str> {
            kv.get(key)
                .map(String::as_str)
                .ok_or_else(|| Error::Manifest(format!("missing key {key:?}")))
        };
        let command = match get("command")? {
            "run" => SimCommand::Run,
            "beta-sweep" => SimCommand::BetaSweep {
                betas: parse_f64_list(get("betas")?)?,
            },
            "early-stop-table" => SimCommand::EarlyStopTable {
                taus: parse_usize_list(get("taus")?)?,
                alphas: parse_f64_list(get("alphas")?)?,
            },
            other => return Err(Error::Manifest(format!("unknown command {other:?}"))),
        };
        Ok(Self {
            command,
            scenario: parse_scenario(get("scenario")?)?,
            gsnr_db: parse_f64_list(get("gsnr_db")?)?,
            amplitude: parse_f64(get("amplitude")?)?,
            seed: parse_u64(get("seed")?)?,
            blocks: parse_usize(get("blocks")?)?,
            beta: parse_f64(get("beta")?)?,
            init_weight: parse_f64(get("init_weight")?)?,
            tau: match get("tau")? {
                "none" => None,
                v => Some(parse_usize(v)?),
            },
            iters: parse_usize(get("iters")?)?,
            rate: get("rate")?.to_string(),
            k: parse_usize(get("k")?)?,
            pool: PoolSpec::parse(get("pool")?)?,
            loss: LossMode::parse(get("loss")?)?,
            method: Method::parse(get("method")?)?,
            mixture_gamma: MixtureGammaRule::parse(get("mixture_gamma")?)?,
            error_target: parse_usize(get("error_target")?)?,
            max_blocks: parse_usize(get("max_blocks")?)?,
            feedback_poly: parse_u64(get("feedback_poly")?)? as u32,
            forward_poly: parse_u64(get("forward_poly")?)? as u32,
            tail_mode: TailMode::parse(get("tail_mode")?)?,
            interleaver: InterleaverKind::parse(get("interleaver")?)?,
            interleaver_seed: parse_u64(get("interleaver_seed")?)?,
        })
    }
}

/// Parses `single:A` or `mixture:A1,A2[,W1,W2]`.
pub fn parse_scenario(s: &str) -> Result<ScenarioKind> {
    let s = s.trim();
    if let Some(rest) = s.strip_prefix("single:") {
        let alpha = parse_f64(rest)?;
        return Ok(ScenarioKind::Single { alpha });
    }
    if let Some(rest) = s.strip_prefix("mixture:") {
        let parts = parse_f64_list(rest)?;
        return match parts.as_slice() {
            [a1, a2] => Ok(ScenarioKind::Mixture {
                alpha1: *a1,
                alpha2: *a2,
                w1: 0.5,
                w2: 0.5,
            }),
            [a1, a2, w1, w2] => Ok(ScenarioKind::Mixture {
                alpha1: *a1,
                alpha2: *a2,
                w1: *w1,
                w2: *w2,
            }),
            _ => Err(Error::Config(
                "mixture scenario takes A1,A2 or A1,A2,W1,W2".into(),
            )),
        };
    }
    Err(Error::Config(format!(
        "unsupported scenario {s:?} (expected single:ALPHA or mixture:A1,A2[,W1,W2])"
    )))
}

fn scenario_label(kind: &ScenarioKind) -> String {
    match kind {
        ScenarioKind::Single { alpha } => format!("single:{alpha}"),
        ScenarioKind::Mixture {
            alpha1,
            alpha2,
            w1,
            w2,
        } => format!("mixture:{alpha1},{alpha2},{w1},{w2}"),
    }
}

fn join<T: std::fmt::Display>(xs: &[T]) -> String {
    xs.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

pub fn parse_f64_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(parse_f64)
        .collect()
}

pub fn parse_usize_list(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(parse_usize)
        .collect()
}

fn parse_f64(s: &str) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| Error::Manifest(format!("not a number: {s:?}")))
}

fn parse_usize(s: &str) -> Result<usize> {
    s.trim()
        .parse()
        .map_err(|_| Error::Manifest(format!("not a count: {s:?}")))
}

fn parse_u64(s: &str) -> Result<u64> {
    s.trim()
        .parse()
        .map_err(|_| Error::Manifest(format!("not an integer: {s:?}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_round_trips() {
        let mut spec = RunSpec::defaults(
            ScenarioKind::Single { alpha: 1.4 },
            vec![8.0, 10.0],
            10_000,
            7,
        );
        spec.tau = Some(2500);
        let parsed = RunSpec::from_manifest(&spec.to_manifest()).unwrap();
        assert_eq!(parsed, spec);

        let mut sweep = RunSpec::defaults(
            ScenarioKind::Mixture {
                alpha1: 1.4,
                alpha2: 1.6,
                w1: 0.5,
                w2: 0.5,
            },
            vec![10.0],
            5000,
            3,
        );
        sweep.command = SimCommand::BetaSweep {
            betas: vec![0.85, 0.9, 0.95, 0.99],
        };
        let parsed = RunSpec::from_manifest(&sweep.to_manifest()).unwrap();
        assert_eq!(parsed, sweep);

        let mut table = RunSpec::defaults(
            ScenarioKind::Single { alpha: 1.4 },
            vec![10.0, 12.0],
            100_000,
            5,
        );
        table.command = SimCommand::EarlyStopTable {
            taus: vec![500, 1000, 1500, 2000, 2500],
            alphas: vec![1.4, 1.5],
        };
        let parsed = RunSpec::from_manifest(&table.to_manifest()).unwrap();
        assert_eq!(parsed, table);
    }

    #[test]
    fn scenario_parsing() {
        assert_eq!(
            parse_scenario("single:1.4").unwrap(),
            ScenarioKind::Single { alpha: 1.4 }
        );
        assert_eq!(
            parse_scenario("mixture:1.4,1.6").unwrap(),
            ScenarioKind::Mixture {
                alpha1: 1.4,
                alpha2: 1.6,
                w1: 0.5,
                w2: 0.5
            }
        );
        assert_eq!(
            parse_scenario("mixture:1.4,1.6,0.3,0.7").unwrap(),
            ScenarioKind::Mixture {
                alpha1: 1.4,
                alpha2: 1.6,
                w1: 0.3,
                w2: 0.7
            }
        );
        assert!(parse_scenario("triple:1,2,3").is_err());
        assert!(parse_scenario("mixture:1.4").is_err());
    }

    #[test]
    fn manifest_rejects_malformed_lines() {
        assert!(RunSpec::from_manifest("command run\n").is_err());
        assert!(RunSpec::from_manifest("command=warp\n").is_err());
    }
}
