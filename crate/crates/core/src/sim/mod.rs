//! Monte Carlo experiment driver: scenarios, run reports, and the
//! proposed-method / baseline / sweep / early-stopping entry points.

mod report;
mod rng;
mod runspec;

pub use report::{bler_csv, emit_reports, weight_trace_csv, EmittedFiles, BLER_CSV_HEADER};
pub use rng::{interleaver_seed, role_rng, StreamRole};
pub use runspec::{
    parse_f64_list, parse_scenario, parse_usize_list, InterleaverKind, Method, PoolSpec, RunSpec,
    SimCommand, SimOutput,
};

use std::time::Instant;

use rand::Rng;

use crate::error::{Error, Result};
use crate::expert_bank::{decode_all, ExpertPool};
use crate::hedge::{block_loss, combine, crc_loss, HedgeState};
use crate::stable_noise::{
    gsnr_to_dispersion, sas_sample_one, AlphaStableParams, ChannelDensity, EpsilonRule, GsnrSpec,
};
use crate::turbo::{turbo_decode_pair, turbo_encode, TurboCodeConfig};

/// What noise the channel applies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScenarioKind {
    /// One SaS law at the given characteristic exponent.
    Single { alpha: f64 },
    /// Per-symbol draw from one of two SaS laws with the given mixing
    /// probabilities.
    Mixture {
        alpha1: f64,
        alpha2: f64,
        w1: f64,
        w2: f64,
    },
}

impl ScenarioKind {
    /// `"1.4"` for a single law, `"1.4+1.6"` for a mixture.
    pub fn alpha_label(&self) -> String {
        match self {
            ScenarioKind::Single { alpha } => format!("{alpha}"),
            ScenarioKind::Mixture { alpha1, alpha2, .. } => format!("{alpha1}+{alpha2}"),
        }
    }
}

/// One channel condition: noise kind, target GSNR, signal amplitude, and
/// the master seed every random stream is derived from.
#[derive(Debug, Clone, Copy)]
pub struct ChannelScenario {
    pub kind: ScenarioKind,
    pub gsnr_db: f64,
    pub amplitude: f64,
    pub seed: u64,
}

impl ChannelScenario {
    pub fn single(alpha: f64, gsnr_db: f64, seed: u64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(Self {
            kind: ScenarioKind::Single { alpha },
            gsnr_db,
            amplitude: 1.0,
            seed,
        })
    }

    pub fn mixture(
        alpha1: f64,
        alpha2: f64,
        w1: f64,
        w2: f64,
        gsnr_db: f64,
        seed: u64,
    ) -> Result<Self> {
        check_alpha(alpha1)?;
        check_alpha(alpha2)?;
        if !(w1 > 0.0 && w2 > 0.0) || (w1 + w2 - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParam(format!(
                "mixture weights must be positive and sum to 1, got {w1}, {w2}"
            )));
        }
        Ok(Self {
            kind: ScenarioKind::Mixture {
                alpha1,
                alpha2,
                w1,
                w2,
            },
            gsnr_db,
            amplitude: 1.0,
            seed,
        })
    }

    pub fn with_amplitude(mut self, amplitude: f64) -> Self {
        self.amplitude = amplitude;
        self
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 2.0) {
        return Err(Error::InvalidParam(format!(
            "scenario alpha must be in (0, 2], got {alpha}"
        )));
    }
    Ok(())
}

/// How mixture components derive their dispersion from the target GSNR.
///
/// Per-component calibration gives every component the geometric power the
/// GSNR implies (the components are "equally strong" in geometric power);
/// the shared rule instead gives both the single dispersion of the mean
/// alpha.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MixtureGammaRule {
    PerComponentGsnr,
    SharedMeanAlpha,
}

impl MixtureGammaRule {
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "per-alpha" => Ok(Self::PerComponentGsnr),
            "shared" => Ok(Self::SharedMeanAlpha),
            other => Err(Error::Config(format!(
                "unsupported mixture-gamma rule {other:?} (expected per-alpha or shared)"
            ))),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Self::PerComponentGsnr => "per-alpha",
            Self::SharedMeanAlpha => "shared",
        }
    }
}

/// The channel noise source: weighted SaS components calibrated to the
/// scenario's GSNR.
#[derive(Debug, Clone)]
pub struct NoiseModel {
    components: Vec<(f64, AlphaStableParams)>,
}

impl NoiseModel {
    pub fn for_scenario(scenario: &ChannelScenario, rule: MixtureGammaRule) -> Result<Self> {
        let spec = GsnrSpec::new(scenario.gsnr_db, scenario.amplitude)?;
        let components = match scenario.kind {
            ScenarioKind::Single { alpha } => {
                let gamma = gsnr_to_dispersion(&spec, alpha)?;
                vec![(1.0, AlphaStableParams::new(alpha, gamma)?)]
            }
            ScenarioKind::Mixture {
                alpha1,
                alpha2,
                w1,
                w2,
            } => match rule {
                MixtureGammaRule::PerComponentGsnr => vec![
                    (
                        w1,
                        AlphaStableParams::new(alpha1, gsnr_to_dispersion(&spec, alpha1)?)?,
                    ),
                    (
                        w2,
                        AlphaStableParams::new(alpha2, gsnr_to_dispersion(&spec, alpha2)?)?,
                    ),
                ],
                MixtureGammaRule::SharedMeanAlpha => {
                    let gamma = gsnr_to_dispersion(&spec, 0.5 * (alpha1 + alpha2))?;
                    vec![
                        (w1, AlphaStableParams::new(alpha1, gamma)?),
                        (w2, AlphaStableParams::new(alpha2, gamma)?),
                    ]
                }
            },
        };
        Ok(Self { components })
    }

    pub fn components(&self) -> &[(f64, AlphaStableParams)] {
        &self.components
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if self.components.len() == 1 {
            return sas_sample_one(&self.components[0].1, rng);
        }
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for (w, p) in &self.components {
            acc += w;
            if u < acc {
                return sas_sample_one(p, rng);
            }
        }
        sas_sample_one(&self.components.last().expect("nonempty").1, rng)
    }

    /// The minimum-error mixture density matched to this noise: the
    /// "knows the channel" baseline.
    pub fn oracle_density(&self) -> Result<ChannelDensity> {
        if self.components.len() == 1 {
            let p = &self.components[0].1;
            ChannelDensity::sas_approx(p.alpha(), p.gamma(), EpsilonRule::MeBcgmQuadratic)
        } else {
            let parts = self
                .components
                .iter()
                .map(|(w, p)| {
                    Ok((
                        *w,
                        ChannelDensity::sas_approx(
                            p.alpha(),
                            p.gamma(),
                            EpsilonRule::MeBcgmQuadratic,
                        )?,
                    ))
                })
                .collect::<Result<Vec<_>>>()?;
            ChannelDensity::mixture(parts)
        }
    }
}

/// Dispersion handed to the expert pool: the true dispersion for a single
/// law; for mixtures, the dispersion the target GSNR implies at the mean
/// alpha (there is no single true value to share).
pub fn pool_gamma(scenario: &ChannelScenario) -> Result<f64> {
    let spec = GsnrSpec::new(scenario.gsnr_db, scenario.amplitude)?;
    match scenario.kind {
        ScenarioKind::Single { alpha } => gsnr_to_dispersion(&spec, alpha),
        ScenarioKind::Mixture { alpha1, alpha2, .. } => {
            gsnr_to_dispersion(&spec, 0.5 * (alpha1 + alpha2))
        }
    }
}

/// Hedge configuration for a proposed-method run.
#[derive(Debug, Clone, Copy)]
pub struct HedgeParams {
    pub beta: f64,
    pub init_weight: f64,
    pub tau: Option<usize>,
}

impl Default for HedgeParams {
    fn default() -> Self {
        Self {
            beta: 0.90,
            init_weight: 1.0,
            tau: None,
        }
    }
}

/// How per-expert losses are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LossMode {
    /// Bit-error fraction against the true transmitted block.
    Genie,
    /// Binary pass/fail from an ideal block error detector.
    Crc,
}

impl LossMode {
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "genie" => Ok(Self::Genie),
            "crc" => Ok(Self::Crc),
            other => Err(Error::Config(format!(
                "unsupported loss mode {other:?} (expected genie or crc)"
            ))),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Self::Genie => "genie",
            Self::Crc => "crc",
        }
    }
}

/// Options for [`run_proposed`].
#[derive(Debug, Clone, Copy)]
pub struct ProposedOptions {
    pub hedge: HedgeParams,
    pub loss: LossMode,
    /// Record `(block, zeta)` rows; disable for very long table runs.
    pub record_trace: bool,
}

impl Default for ProposedOptions {
    fn default() -> Self {
        Self {
            hedge: HedgeParams::default(),
            loss: LossMode::Genie,
            record_trace: true,
        }
    }
}

/// Early-stopping outcome of a proposed-method run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EarlyStopInfo {
    pub tau: usize,
    pub chosen_expert: usize,
    pub chosen_label: String,
}

/// Aggregated outcome of one simulation run.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub method: String,
    pub alpha_label: String,
    pub gsnr_db: f64,
    pub blocks: usize,
    pub block_errors: usize,
    pub bits: usize,
    pub bit_errors: usize,
    /// Normalized weights after each block (proposed method only).
    pub weight_trace: Vec<Vec<f64>>,
    pub expert_labels: Vec<String>,
    pub early_stop: Option<EarlyStopInfo>,
    pub wall_clock_secs: f64,
    pub config_echo: Vec<(String, String)>,
}

impl RunReport {
    pub fn bler(&self) -> f64 {
        self.block_errors as f64 / self.blocks as f64
    }

    pub fn ber(&self) -> f64 {
        self.bit_errors as f64 / self.bits as f64
    }
}

/// When a baseline run stops.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopRule {
    FixedBlocks(usize),
    /// Run until at least `min_blocks` blocks AND `target_errors` block
    /// errors, whichever occurs last, capped at `max_blocks`.
    ErrorTarget {
        min_blocks: usize,
        target_errors: usize,
        max_blocks: usize,
    },
}

impl StopRule {
    pub(crate) fn should_stop(&self, blocks: usize, block_errors: usize) -> bool {
        match *self {
            StopRule::FixedBlocks(n) => blocks >= n,
            StopRule::ErrorTarget {
                min_blocks,
                target_errors,
                max_blocks,
            } => (blocks >= min_blocks && block_errors >= target_errors) || blocks >= max_blocks,
        }
    }
}

struct BlockSource {
    data_rng: rand_chacha::ChaCha8Rng,
    noise_rng: rand_chacha::ChaCha8Rng,
    noise: NoiseModel,
    k: usize,
}

impl BlockSource {
    fn new(
        scenario: &ChannelScenario,
        cfg: &TurboCodeConfig,
        rule: MixtureGammaRule,
    ) -> Result<Self> {
        Ok(Self {
            data_rng: role_rng(scenario.seed, StreamRole::DataBits),
            noise_rng: role_rng(scenario.seed, StreamRole::Noise),
            noise: NoiseModel::for_scenario(scenario, rule)?,
            k: cfg.k(),
        })
    }

    fn next_block(&mut self, cfg: &TurboCodeConfig) -> Result<(Vec<bool>, Vec<f64>)> {
        let data: Vec<bool> = (0..self.k).map(|_| self.data_rng.random()).collect();
        let frame = turbo_encode(cfg, &data)?;
        let received: Vec<f64> = frame
            .symbols
            .iter()
            .map(|&x| x + self.noise.sample(&mut self.noise_rng))
            .collect();
        Ok((data, received))
    }
}

fn count_errors(decisions: &[bool], reference: &[bool]) -> usize {
    decisions
        .iter()
        .zip(reference)
        .filter(|(a, b)| a != b)
        .count()
}

/// Runs the proposed method: every block is decoded by the full expert
/// bank, combined under the current normalized weights, and scored; weights
/// update by the Hedge rule. If a freeze step is configured, the
/// highest-weight expert is selected there and decodes alone afterwards.
///
/// Fully deterministic given `scenario.seed`.
pub fn run_proposed(
    scenario: &ChannelScenario,
    cfg: &TurboCodeConfig,
    pool: &ExpertPool,
    opts: &ProposedOptions,
    n_blocks: usize,
) -> Result<RunReport> {
    run_proposed_with_rule(
        scenario,
        cfg,
        pool,
        opts,
        n_blocks,
        MixtureGammaRule::PerComponentGsnr,
    )
}

/// [`run_proposed`] with an explicit mixture dispersion rule.
pub fn run_proposed_with_rule(
    scenario: &ChannelScenario,
    cfg: &TurboCodeConfig,
    pool: &ExpertPool,
    opts: &ProposedOptions,
    n_blocks: usize,
    rule: MixtureGammaRule,
) -> Result<RunReport> {
    if n_blocks == 0 {
        return Err(Error::Config("need at least one block".into()));
    }
    if let Some(tau) = opts.hedge.tau {
        if tau > n_blocks {
            return Err(Error::Config(format!(
                "freeze step {tau} exceeds block count {n_blocks}"
            )));
        }
    }
    let start = Instant::now();
    let mut source = BlockSource::new(scenario, cfg, rule)?;
    let mut state = HedgeState::new(
        pool.len(),
        opts.hedge.beta,
        opts.hedge.init_weight,
        opts.hedge.tau,
    )?;
    let mut trace = Vec::new();
    let mut early_stop = None;
    let mut block_errors = 0usize;
    let mut bit_errors = 0usize;
    let k = cfg.k();

    for _block in 1..=n_blocks {
        let (data, received) = source.next_block(cfg)?;
        let decisions = if let Some(choice) = state.frozen_choice() {
            let post =
                turbo_decode_pair(cfg, &pool.experts()[choice].density, &received, pool.iters)?;
            post.hard_decisions()
        } else {
            let outputs = decode_all(pool, cfg, &received)?;
            let zeta = state.normalized_weights();
            let posteriors: Vec<_> = outputs.iter().map(|o| o.posteriors.clone()).collect();
            let combined = combine(&posteriors, &zeta)?;
            let decisions: Vec<bool> = combined.p_hat.iter().map(|&p| p >= 0.5).collect();
            let losses: Vec<f64> = outputs
                .iter()
                .map(|o| match opts.loss {
                    LossMode::Genie => block_loss(&o.posteriors.hard_decisions(), &data),
                    LossMode::Crc => Ok(crc_loss(&o.posteriors, |hard| hard == data.as_slice())),
                })
                .collect::<Result<Vec<f64>>>()?;
            state.update_weights(&losses)?;
            if opts.hedge.tau == Some(state.step()) {
                let choice = state.freeze_and_select()?;
                early_stop = Some(EarlyStopInfo {
                    tau: state.step(),
                    chosen_expert: choice,
                    chosen_label: pool.experts()[choice].label.clone(),
                });
            }
            decisions
        };
        if opts.record_trace {
            trace.push(state.normalized_weights());
        }
        let errs = count_errors(&decisions, &data);
        if errs > 0 {
            block_errors += 1;
            bit_errors += errs;
        }
    }

    Ok(RunReport {
        method: "proposed".into(),
        alpha_label: scenario.kind.alpha_label(),
        gsnr_db: scenario.gsnr_db,
        blocks: n_blocks,
        block_errors,
        bits: n_blocks * k,
        bit_errors,
        weight_trace: trace,
        expert_labels: pool.labels(),
        early_stop,
        wall_clock_secs: start.elapsed().as_secs_f64(),
        config_echo: vec![
            ("method".into(), "proposed".into()),
            ("beta".into(), format!("{}", opts.hedge.beta)),
            ("init_weight".into(), format!("{}", opts.hedge.init_weight)),
            (
                "tau".into(),
                opts.hedge.tau.map_or("none".into(), |t| format!("{t}")),
            ),
            ("loss".into(), opts.loss.label().into()),
            ("seed".into(), format!("{}", scenario.seed)),
        ],
    })
}

/// Runs a fixed-density baseline under the given stopping rule. The same
/// scenario seed produces the same data and noise realizations as any other
/// method, enabling paired comparisons.
pub fn run_baseline(
    scenario: &ChannelScenario,
    cfg: &TurboCodeConfig,
    density: &ChannelDensity,
    iters: usize,
    stop: StopRule,
    method: &str,
) -> Result<RunReport> {
    run_baseline_with_rule(
        scenario,
        cfg,
        density,
        iters,
        stop,
        method,
        MixtureGammaRule::PerComponentGsnr,
    )
}

/// [`run_baseline`] with an explicit mixture dispersion rule.
pub fn run_baseline_with_rule(
    scenario: &ChannelScenario,
    cfg: &TurboCodeConfig,
    density: &ChannelDensity,
    iters: usize,
    stop: StopRule,
    method: &str,
    rule: MixtureGammaRule,
) -> Result<RunReport> {
    let start = Instant::now();
    let mut source = BlockSource::new(scenario, cfg, rule)?;
    let k = cfg.k();
    let mut blocks = 0usize;
    let mut block_errors = 0usize;
    let mut bit_errors = 0usize;
    while !stop.should_stop(blocks, block_errors) {
        let (data, received) = source.next_block(cfg)?;
        let post = turbo_decode_pair(cfg, density, &received, iters)?;
        let errs = count_errors(&post.hard_decisions(), &data);
        blocks += 1;
        if errs > 0 {
            block_errors += 1;
            bit_errors += errs;
        }
    }
    Ok(RunReport {
        method: method.to_string(),
        alpha_label: scenario.kind.alpha_label(),
        gsnr_db: scenario.gsnr_db,
        blocks,
        block_errors,
        bits: blocks * k,
        bit_errors,
        weight_trace: Vec::new(),
        expert_labels: Vec::new(),
        early_stop: None,
        wall_clock_secs: start.elapsed().as_secs_f64(),
        config_echo: vec![
            ("method".into(), method.to_string()),
            ("iters".into(), format!("{iters}")),
            ("seed".into(), format!("{}", scenario.seed)),
        ],
    })
}

/// One proposed-method run per learning rate, all on the same seed so the
/// comparisons are paired.
pub fn run_beta_sweep(
    scenario: &ChannelScenario,
    cfg: &TurboCodeConfig,
    pool: &ExpertPool,
    betas: &[f64],
    base: &ProposedOptions,
    n_blocks: usize,
) -> Result<Vec<RunReport>> {
    betas
        .iter()
        .map(|&beta| {
            let mut opts = *base;
            opts.hedge.beta = beta;
            let mut report = run_proposed(scenario, cfg, pool, &opts, n_blocks)?;
            report.method = format!("proposed-b{beta}");
            Ok(report)
        })
        .collect()
}

/// BLER per `(tau, gsnr, alpha)` cell for the early-stopping comparison.
#[derive(Debug, Clone)]
pub struct EarlyStopTable {
    pub taus: Vec<usize>,
    pub cells: Vec<EarlyStopCell>,
}

/// One `(gsnr, alpha)` column: BLER for each freeze step, in `taus` order.
#[derive(Debug, Clone)]
pub struct EarlyStopCell {
    pub gsnr_db: f64,
    pub alpha: f64,
    pub bler_by_tau: Vec<f64>,
}

impl EarlyStopTable {
    /// CSV mirroring the table layout: one row per tau, one column per
    /// `(gsnr, alpha)` cell.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("tau");
        for c in &self.cells {
            out.push_str(&format!(",g{}_a{}", c.gsnr_db, c.alpha));
        }
        out.push('\n');
        for (i, &tau) in self.taus.iter().enumerate() {
            out.push_str(&format!("{tau}"));
            for c in &self.cells {
                out.push_str(&format!(",{}", c.bler_by_tau[i]));
            }
            out.push('\n');
        }
        out
    }
}

/// Sweeps freeze steps over a `(gsnr, alpha)` grid. Within a column all
/// runs share the seed (derived from the scenario only), so differences are
/// purely the freeze step.
pub fn run_early_stop_table(
    alphas: &[f64],
    gsnrs: &[f64],
    taus: &[usize],
    cfg: &TurboCodeConfig,
    pool_for_gamma: impl Fn(f64) -> Result<ExpertPool>,
    opts: &ProposedOptions,
    n_blocks: usize,
    seed: u64,
) -> Result<EarlyStopTable> {
    if taus.iter().any(|&t| t == 0 || t > n_blocks) {
        return Err(Error::Config(format!(
            "all taus must lie in [1, {n_blocks}]"
        )));
    }
    let mut cells = Vec::new();
    for &gsnr in gsnrs {
        for &alpha in alphas {
            let scenario = ChannelScenario::single(alpha, gsnr, seed)?;
            let pool = pool_for_gamma(pool_gamma(&scenario)?)?;
            let mut bler_by_tau = Vec::with_capacity(taus.len());
            for &tau in taus {
                let mut o = *opts;
                o.hedge.tau = Some(tau);
                o.record_trace = false;
                let report = run_proposed(&scenario, cfg, &pool, &o, n_blocks)?;
                bler_by_tau.push(report.bler());
            }
            cells.push(EarlyStopCell {
                gsnr_db: gsnr,
                alpha,
                bler_by_tau,
            });
        }
    }
    Ok(EarlyStopTable {
        taus: taus.to_vec(),
        cells,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stop_rule_whichever_occurs_last() {
        let rule = StopRule::ErrorTarget {
            min_blocks: 10_000,
            target_errors: 50,
            max_blocks: 1_000_000,
        };
        // 49 errors at the block floor: keep going until the 50th error
        assert!(!rule.should_stop(10_000, 49));
        assert!(rule.should_stop(10_500, 50));
        // 50 errors early: keep going until the block floor
        assert!(!rule.should_stop(9_999, 50));
        assert!(rule.should_stop(10_000, 50));
        // the cap always stops
        assert!(rule.should_stop(1_000_000, 0));
    }

    #[test]
    fn scenario_validation() {
        assert!(ChannelScenario::single(0.0, 10.0, 1).is_err());
        assert!(ChannelScenario::single(2.5, 10.0, 1).is_err());
        assert!(ChannelScenario::mixture(1.4, 1.6, 0.7, 0.7, 10.0, 1).is_err());
        assert!(ChannelScenario::mixture(1.4, 1.6, 0.5, 0.5, 10.0, 1).is_ok());
    }

    #[test]
    fn alpha_labels() {
        assert_eq!(
            ChannelScenario::single(1.4, 10.0, 1)
                .unwrap()
                .kind
                .alpha_label(),
            "1.4"
        );
        assert_eq!(
            ChannelScenario::mixture(1.4, 1.6, 0.5, 0.5, 10.0, 1)
                .unwrap()
                .kind
                .alpha_label(),
            "1.4+1.6"
        );
    }

    #[test]
    fn mixture_components_share_geometric_power_under_per_alpha_rule() {
        use crate::stable_noise::geometric_power;
        let scenario = ChannelScenario::mixture(1.4, 1.6, 0.5, 0.5, 10.0, 1).unwrap();
        let noise =
            NoiseModel::for_scenario(&scenario, MixtureGammaRule::PerComponentGsnr).unwrap();
        let s0: Vec<f64> = noise
            .components()
            .iter()
            .map(|(_, p)| geometric_power(p))
            .collect();
        assert!((s0[0] - s0[1]).abs() < 1e-12);
    }
}
