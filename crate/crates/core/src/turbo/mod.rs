//! Punctured parallel-concatenated turbo codec with density-pluggable
//! channel metrics.
//!
//! Two recursive systematic convolutional encoders are linked by a
//! pseudorandom interleaver; a periodic mask punctures the parity streams
//! to raise the rate; tails are transmitted unpunctured. The decoder
//! alternates two exact log-MAP passes exchanging extrinsic information.
//! Channel LLRs are computed under an arbitrary [`ChannelDensity`], which
//! is what lets one codec serve every noise hypothesis in the expert bank.

mod bcjr;
mod interleaver;
mod puncture;
mod rsc;

pub use bcjr::{bcjr_decode, BcjrOutput};
pub use interleaver::Interleaver;
pub use puncture::PunctureMask;
pub use rsc::{rsc_encode, RscEncoding, RscSpec};

use crate::error::{Error, Result};
use crate::stable_noise::ChannelDensity;

/// Channel LLRs are clipped to this magnitude; far above any
/// decision-relevant value but safely inside the logistic map's range.
pub const LLR_MAX: f64 = 50.0;

/// Trellis termination of the constituent encoders.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailMode {
    /// No termination at all (both trellises left open).
    None,
    /// Terminate encoder 1 only.
    TerminateFirst,
    /// Terminate both encoders; both tails are transmitted.
    TerminateBoth,
}

impl TailMode {
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "none" => Ok(TailMode::None),
            "terminate-first" => Ok(TailMode::TerminateFirst),
            "terminate-both" => Ok(TailMode::TerminateBoth),
            other => Err(Error::Config(format!(
                "unsupported tail mode {other:?} (expected none, terminate-first, terminate-both)"
            ))),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            TailMode::None => "none",
            TailMode::TerminateFirst => "terminate-first",
            TailMode::TerminateBoth => "terminate-both",
        }
    }
}

/// Which logical stream a transmitted symbol belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Systematic,
    Parity1,
    Parity2,
    TailSys1,
    TailPar1,
    TailSys2,
    TailPar2,
}

/// Maps one transmitted position to `(stream, trellis step)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FramePos {
    pub stream: Stream,
    pub step: usize,
}

/// Full configuration of one turbo code instance.
#[derive(Debug, Clone)]
pub struct TurboCodeConfig {
    k: usize,
    rsc: RscSpec,
    interleaver: Interleaver,
    puncture: PunctureMask,
    tail_mode: TailMode,
    amplitude: f64,
    interleaver_seed: Option<u64>,
    layout: Vec<FramePos>,
}

impl TurboCodeConfig {
    pub fn new(
        k: usize,
        rsc: RscSpec,
        interleaver: Interleaver,
        puncture: PunctureMask,
        tail_mode: TailMode,
        amplitude: f64,
    ) -> Result<Self> {
        if k == 0 {
            return Err(Error::Config("block length k must be >= 1".into()));
        }
        if interleaver.len() != k {
            return Err(Error::LengthMismatch {
                expected: k,
                got: interleaver.len(),
            });
        }
        if !(amplitude > 0.0) || !amplitude.is_finite() {
            return Err(Error::Config(format!(
                "amplitude must be > 0, got {amplitude}"
            )));
        }
        let mut cfg = Self {
            k,
            rsc,
            interleaver,
            puncture,
            tail_mode,
            amplitude,
            interleaver_seed: None,
            layout: Vec::new(),
        };
        cfg.layout = cfg.build_layout();
        Ok(cfg)
    }

    /// The experiments' configuration: `k = 128`, memory-2 constituent
    /// code, rate 4/5, both trellises terminated, unit amplitude, with the
    /// interleaver drawn from `interleaver_seed`.
    pub fn paper_default(interleaver_seed: u64) -> Self {
        let mut cfg = Self::new(
            128,
            RscSpec::memory2_default(),
            Interleaver::random(128, interleaver_seed),
            PunctureMask::rate_four_fifths(),
            TailMode::TerminateBoth,
            1.0,
        )
        .expect("valid fixed configuration");
        cfg.interleaver_seed = Some(interleaver_seed);
        cfg
    }

    /// As [`Self::new`] with a seed-derived interleaver, recording the seed.
    #[allow(clippy::too_many_arguments)]
    pub fn with_random_interleaver(
        k: usize,
        rsc: RscSpec,
        interleaver_seed: u64,
        puncture: PunctureMask,
        tail_mode: TailMode,
        amplitude: f64,
    ) -> Result<Self> {
        let mut cfg = Self::new(
            k,
            rsc,
            Interleaver::random(k, interleaver_seed),
            puncture,
            tail_mode,
            amplitude,
        )?;
        cfg.interleaver_seed = Some(interleaver_seed);
        Ok(cfg)
    }

    fn build_layout(&self) -> Vec<FramePos> {
        let mut layout = Vec::new();
        for step in 0..self.k {
            if self.puncture.keeps_systematic(step) {
                layout.push(FramePos {
                    stream: Stream::Systematic,
                    step,
                });
            }
            if self.puncture.keeps_parity1(step) {
                layout.push(FramePos {
                    stream: Stream::Parity1,
                    step,
                });
            }
            if self.puncture.keeps_parity2(step) {
                layout.push(FramePos {
                    stream: Stream::Parity2,
                    step,
                });
            }
        }
        for step in 0..self.tail_len1() {
            layout.push(FramePos {
                stream: Stream::TailSys1,
                step,
            });
            layout.push(FramePos {
                stream: Stream::TailPar1,
                step,
            });
        }
        for step in 0..self.tail_len2() {
            layout.push(FramePos {
                stream: Stream::TailSys2,
                step,
            });
            layout.push(FramePos {
                stream: Stream::TailPar2,
                step,
            });
        }
        layout
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn rsc(&self) -> &RscSpec {
        self.rsc_ref()
    }

    fn rsc_ref(&self) -> &RscSpec {
        &self.rsc
    }

    pub fn interleaver(&self) -> &Interleaver {
        &self.interleaver
    }

    pub fn puncture(&self) -> &PunctureMask {
        &self.puncture
    }

    pub fn tail_mode(&self) -> TailMode {
        self.tail_mode
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn interleaver_seed(&self) -> Option<u64> {
        self.interleaver_seed
    }

    /// Transmitted position -> (stream, step) map used for depuncturing.
    pub fn layout(&self) -> &[FramePos] {
        &self.layout
    }

    pub fn frame_len(&self) -> usize {
        self.layout.len()
    }

    /// Payload symbols per block, tail excluded.
    pub fn payload_len(&self) -> usize {
        self.puncture.payload_len(self.k)
    }

    /// Achieved code rate `k / payload`.
    pub fn rate(&self) -> f64 {
        self.k as f64 / self.payload_len() as f64
    }

    fn tail_len1(&self) -> usize {
        match self.tail_mode {
            TailMode::None => 0,
            _ => self.rsc.memory(),
        }
    }

    fn tail_len2(&self) -> usize {
        match self.tail_mode {
            TailMode::TerminateBoth => self.rsc.memory(),
            _ => 0,
        }
    }
}

/// One encoded block: bipolar symbols in transmit order.
#[derive(Debug, Clone, PartialEq)]
pub struct CodedFrame {
    pub symbols: Vec<f64>,
}

/// Per-information-bit probabilities of a transmitted one.
#[derive(Debug, Clone, PartialEq)]
pub struct BitPosteriors {
    pub p_one: Vec<f64>,
}

impl BitPosteriors {
    pub fn uniform(k: usize) -> Self {
        Self {
            p_one: vec![0.5; k],
        }
    }

    pub fn len(&self) -> usize {
        self.p_one.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p_one.is_empty()
    }

    /// Threshold at 0.5, with `p >= 0.5` mapping to one.
    pub fn hard_decisions(&self) -> Vec<bool> {
        self.p_one.iter().map(|&p| p >= 0.5).collect()
    }
}

/// Encodes a `k`-bit block: systematic + two interleaved parity streams,
/// punctured, bipolar-mapped (`0 -> -A`, `1 -> +A`), tails appended
/// unpunctured.
pub fn turbo_encode(cfg: &TurboCodeConfig, data: &[bool]) -> Result<CodedFrame> {
    if data.len() != cfg.k {
        return Err(Error::LengthMismatch {
            expected: cfg.k,
            got: data.len(),
        });
    }
    let enc1 = rsc_encode(&cfg.rsc, data, cfg.tail_len1() > 0);
    let interleaved = cfg.interleaver.interleave(data);
    let enc2 = rsc_encode(&cfg.rsc, &interleaved, cfg.tail_len2() > 0);
    let a = cfg.amplitude;
    let bipolar = |b: bool| if b { a } else { -a };
    let symbols = cfg
        .layout
        .iter()
        .map(|pos| {
            let bit = match pos.stream {
                Stream::Systematic => data[pos.step],
                Stream::Parity1 => enc1.parity[pos.step],
                Stream::Parity2 => enc2.parity[pos.step],
                Stream::TailSys1 => enc1.tail[pos.step].0,
                Stream::TailPar1 => enc1.tail[pos.step].1,
                Stream::TailSys2 => enc2.tail[pos.step].0,
                Stream::TailPar2 => enc2.tail[pos.step].1,
            };
            bipolar(bit)
        })
        .collect();
    Ok(CodedFrame { symbols })
}

/// Channel-observation LLR `ln f(y - A) - ln f(y + A)` under density `d`,
/// clipped to `[-LLR_MAX, LLR_MAX]`. Zero at `y = 0` for any symmetric
/// density; the density floor keeps it total.
pub fn channel_llr(d: &ChannelDensity, y: f64, amplitude: f64) -> f64 {
    (d.ln_eval(y - amplitude) - d.ln_eval(y + amplitude)).clamp(-LLR_MAX, LLR_MAX)
}

#[inline]
pub(crate) fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Depunctured per-stream channel LLRs for one received frame under one
/// density. Punctured positions stay exactly zero (erasures).
#[derive(Debug, Clone)]
pub(crate) struct ChannelLlrs {
    /// decoder-1 systematic, info steps then tail-1 steps
    pub sys1: Vec<f64>,
    /// decoder-1 parity, same length as `sys1`
    pub par1: Vec<f64>,
    /// decoder-2 systematic: interleaved info part then tail-2 steps
    pub sys2: Vec<f64>,
    /// decoder-2 parity, same length as `sys2`
    pub par2: Vec<f64>,
}

pub(crate) fn depuncture(
    cfg: &TurboCodeConfig,
    density: &ChannelDensity,
    frame: &[f64],
) -> Result<ChannelLlrs> {
    if frame.len() != cfg.frame_len() {
        return Err(Error::LengthMismatch {
            expected: cfg.frame_len(),
            got: frame.len(),
        });
    }
    let k = cfg.k;
    let (m1, m2) = (cfg.tail_len1(), cfg.tail_len2());
    let mut sys1 = vec![0.0; k + m1];
    let mut par1 = vec![0.0; k + m1];
    let mut sys2_tail = vec![0.0; m2];
    let mut par2 = vec![0.0; k + m2];
    for (pos, &y) in cfg.layout.iter().zip(frame) {
        let l = channel_llr(density, y, cfg.amplitude);
        match pos.stream {
            Stream::Systematic => sys1[pos.step] = l,
            Stream::Parity1 => par1[pos.step] = l,
            Stream::Parity2 => par2[pos.step] = l,
            Stream::TailSys1 => sys1[k + pos.step] = l,
            Stream::TailPar1 => par1[k + pos.step] = l,
            Stream::TailSys2 => sys2_tail[pos.step] = l,
            Stream::TailPar2 => par2[k + pos.step] = l,
        }
    }
    let mut sys2 = cfg.interleaver.interleave(&sys1[..k]);
    sys2.extend_from_slice(&sys2_tail);
    Ok(ChannelLlrs {
        sys1,
        par1,
        sys2,
        par2,
    })
}

pub(crate) fn decode_from_llrs(
    cfg: &TurboCodeConfig,
    ch: &ChannelLlrs,
    iters: usize,
) -> Result<BitPosteriors> {
    let k = cfg.k;
    let mut ext1 = vec![0.0; k];
    let mut ext2_deint = vec![0.0; k];
    for _ in 0..iters {
        let out1 = bcjr_decode(&cfg.rsc, &ch.sys1, &ch.par1, &ext2_deint)?;
        ext1 = out1.extrinsic_llr;
        let prior2 = cfg.interleaver.interleave(&ext1);
        let out2 = bcjr_decode(&cfg.rsc, &ch.sys2, &ch.par2, &prior2)?;
        ext2_deint = cfg.interleaver.deinterleave(&out2.extrinsic_llr);
    }
    let p_one = (0..k)
        .map(|i| {
            let llr = (ch.sys1[i] + ext1[i] + ext2_deint[i]).clamp(-LLR_MAX, LLR_MAX);
            logistic(llr)
        })
        .collect();
    Ok(BitPosteriors { p_one })
}

/// Full iterative decode of one received frame under one noise density:
/// depuncture to channel LLRs, alternate the two BCJR passes exchanging
/// extrinsic information for `iters` iterations, map final LLRs to
/// probabilities.
pub fn turbo_decode_pair(
    cfg: &TurboCodeConfig,
    density: &ChannelDensity,
    frame: &[f64],
    iters: usize,
) -> Result<BitPosteriors> {
    let ch = depuncture(cfg, density, frame)?;
    decode_from_llrs(cfg, &ch, iters)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stable_noise::{gsnr_to_dispersion, sas_sample_one, AlphaStableParams, GsnrSpec};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn paper_cfg() -> TurboCodeConfig {
        TurboCodeConfig::paper_default(99)
    }

    #[test]
    fn frame_length_paper_config() {
        let cfg = paper_cfg();
        assert_eq!(cfg.payload_len(), 160);
        assert_eq!(cfg.frame_len(), 168);
        assert!((cfg.rate() - 0.8).abs() < 1e-12);
    }

    #[test]
    fn frame_length_memory3_variant() {
        // constraint length 4 gives the 12 tail bits / 172-symbol frames
        let cfg = TurboCodeConfig::with_random_interleaver(
            128,
            RscSpec::new(0b1011, 0b1101).unwrap(),
            5,
            PunctureMask::rate_four_fifths(),
            TailMode::TerminateBoth,
            1.0,
        )
        .unwrap();
        assert_eq!(cfg.frame_len(), 172);
    }

    #[test]
    fn rate_one_third_unterminated_small_block() {
        let cfg = TurboCodeConfig::new(
            4,
            RscSpec::memory2_default(),
            Interleaver::identity(4),
            PunctureMask::rate_one_third(),
            TailMode::None,
            1.0,
        )
        .unwrap();
        assert_eq!(cfg.frame_len(), 12);
    }

    #[test]
    fn all_zero_data_maps_to_minus_a() {
        let cfg = paper_cfg();
        let frame = turbo_encode(&cfg, &[false; 128]).unwrap();
        assert!(frame.symbols.iter().all(|&s| s == -1.0));
    }

    #[test]
    fn encode_rejects_wrong_length() {
        let cfg = paper_cfg();
        assert!(turbo_encode(&cfg, &[false; 127]).is_err());
    }

    #[test]
    fn symbols_are_bipolar() {
        let cfg = paper_cfg();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let data: Vec<bool> = (0..128).map(|_| rng.random()).collect();
        let frame = turbo_encode(&cfg, &data).unwrap();
        assert!(frame.symbols.iter().all(|&s| s == 1.0 || s == -1.0));
    }

    #[test]
    fn channel_llr_closed_forms() {
        // Gaussian variance 2*gamma: LLR = A*y/gamma
        let g = ChannelDensity::gaussian(1.0).unwrap(); // gamma = 0.5
        assert!((channel_llr(&g, 1.0, 1.0) - 2.0).abs() < 1e-10);
        // Cauchy gamma=1, A=1, y=1: ln 5
        let c = ChannelDensity::cauchy(1.0).unwrap();
        assert!((channel_llr(&c, 1.0, 1.0) - 5f64.ln()).abs() < 1e-10);
        // symmetry at y = 0
        assert_eq!(channel_llr(&c, 0.0, 1.0), 0.0);
        assert_eq!(channel_llr(&g, 0.0, 1.0), 0.0);
    }

    #[test]
    fn channel_llr_clips() {
        // one hypothesis evaluable, the other floored: the raw ratio is
        // hundreds of nats and must come back clipped
        let g = ChannelDensity::gaussian(0.01).unwrap();
        assert_eq!(channel_llr(&g, 2.0, 1.0), LLR_MAX);
        assert_eq!(channel_llr(&g, -2.0, 1.0), -LLR_MAX);
        // both hypotheses floored: symmetric, uninformative
        assert_eq!(channel_llr(&g, 1e6, 1.0), 0.0);
    }

    #[test]
    fn punctured_positions_decode_as_exact_zero_llrs() {
        let cfg = paper_cfg();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let data: Vec<bool> = (0..128).map(|_| rng.random()).collect();
        let frame = turbo_encode(&cfg, &data).unwrap();
        let d = ChannelDensity::gaussian(0.5).unwrap();
        let ch = depuncture(&cfg, &d, &frame.symbols).unwrap();
        for step in 0..128 {
            if !cfg.puncture().keeps_parity1(step) {
                assert_eq!(ch.par1[step], 0.0);
            }
            if !cfg.puncture().keeps_parity2(step) {
                assert_eq!(ch.par2[step], 0.0);
            }
        }
        // exactly 16 kept parity positions per stream at rate 4/5
        assert_eq!(ch.par1[..128].iter().filter(|&&l| l != 0.0).count(), 16);
        assert_eq!(ch.par2[..128].iter().filter(|&&l| l != 0.0).count(), 16);
    }

    #[test]
    fn noiseless_frames_decode_exactly() {
        let cfg = paper_cfg();
        let spec = GsnrSpec::new(60.0, 1.0).unwrap();
        let gamma = gsnr_to_dispersion(&spec, 2.0).unwrap();
        let d = ChannelDensity::gaussian(2.0 * gamma).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let data: Vec<bool> = (0..128).map(|_| rng.random()).collect();
            let frame = turbo_encode(&cfg, &data).unwrap();
            let post = turbo_decode_pair(&cfg, &d, &frame.symbols, 8).unwrap();
            assert_eq!(post.hard_decisions(), data);
        }
    }

    #[test]
    fn all_zero_frame_gives_half_posteriors() {
        let cfg = paper_cfg();
        for d in [
            ChannelDensity::gaussian(0.7).unwrap(),
            ChannelDensity::cauchy(0.3).unwrap(),
            ChannelDensity::bcgm(1.4, 0.5, crate::stable_noise::EpsilonRule::MeBcgmQuadratic)
                .unwrap(),
        ] {
            let frame = vec![0.0; cfg.frame_len()];
            let post = turbo_decode_pair(&cfg, &d, &frame, 4).unwrap();
            for &p in &post.p_one {
                assert!((p - 0.5).abs() < 1e-12, "posterior {p}");
            }
        }
    }

    #[test]
    fn posteriors_bounded_and_finite() {
        let cfg = paper_cfg();
        let p_lo = logistic(-LLR_MAX);
        let p_hi = logistic(LLR_MAX);
        let noise = AlphaStableParams::new(1.4, 0.4).unwrap();
        let d = ChannelDensity::cauchy(0.4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..20 {
            let data: Vec<bool> = (0..128).map(|_| rng.random()).collect();
            let frame = turbo_encode(&cfg, &data).unwrap();
            let rx: Vec<f64> = frame
                .symbols
                .iter()
                .map(|&x| x + sas_sample_one(&noise, &mut rng))
                .collect();
            let post = turbo_decode_pair(&cfg, &d, &rx, 8).unwrap();
            for &p in &post.p_one {
                assert!(!p.is_nan());
                assert!((p_lo..=p_hi).contains(&p), "posterior {p}");
            }
        }
    }

    #[test]
    fn iterations_reduce_bit_errors_near_one_percent_raw_ber() {
        // sigma for ~1% raw BER on a unit-amplitude channel
        let sigma = 1.0 / 2.326;
        let gamma = sigma * sigma / 2.0;
        let cfg = paper_cfg();
        let d = ChannelDensity::gaussian(2.0 * gamma).unwrap();
        let noise = AlphaStableParams::new(2.0, gamma).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut errs_1 = 0usize;
        let mut errs_8 = 0usize;
        for _ in 0..500 {
            let data: Vec<bool> = (0..128).map(|_| rng.random()).collect();
            let frame = turbo_encode(&cfg, &data).unwrap();
            let rx: Vec<f64> = frame
                .symbols
                .iter()
                .map(|&x| x + sas_sample_one(&noise, &mut rng))
                .collect();
            let ch = depuncture(&cfg, &d, &rx).unwrap();
            let count = |post: &BitPosteriors| {
                post.hard_decisions()
                    .iter()
                    .zip(&data)
                    .filter(|(a, b)| a != b)
                    .count()
            };
            errs_1 += count(&decode_from_llrs(&cfg, &ch, 1).unwrap());
            errs_8 += count(&decode_from_llrs(&cfg, &ch, 8).unwrap());
        }
        assert!(
            errs_8 < errs_1,
            "8 iterations ({errs_8} errors) not better than 1 ({errs_1})"
        );
    }

    #[test]
    fn awgn_sanity_band() {
        // Eb/N0 = 4 dB at rate 4/5: textbook AWGN turbo behavior, BER < 1e-2
        let cfg = paper_cfg();
        let rate = cfg.rate();
        let eb_n0 = 10f64.powf(0.4);
        let n0 = 1.0 / (rate * eb_n0);
        let sigma2 = n0 / 2.0;
        let d = ChannelDensity::gaussian(sigma2).unwrap();
        let noise = AlphaStableParams::new(2.0, sigma2 / 2.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let blocks = 2000;
        let mut bit_errs = 0usize;
        for _ in 0..blocks {
            let data: Vec<bool> = (0..128).map(|_| rng.random()).collect();
            let frame = turbo_encode(&cfg, &data).unwrap();
            let rx: Vec<f64> = frame
                .symbols
                .iter()
                .map(|&x| x + sas_sample_one(&noise, &mut rng))
                .collect();
            let post = turbo_decode_pair(&cfg, &d, &rx, 8).unwrap();
            bit_errs += post
                .hard_decisions()
                .iter()
                .zip(&data)
                .filter(|(a, b)| a != b)
                .count();
        }
        let ber = bit_errs as f64 / (blocks * 128) as f64;
        assert!(ber < 1e-2, "AWGN BER {ber} out of sanity band");
    }

    #[test]
    fn decode_rejects_wrong_frame_length() {
        let cfg = paper_cfg();
        let d = ChannelDensity::gaussian(1.0).unwrap();
        let frame = vec![0.0; cfg.frame_len() - 1];
        assert!(turbo_decode_pair(&cfg, &d, &frame, 8).is_err());
    }
}
