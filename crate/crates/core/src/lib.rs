//! Turbo decoding over symmetric alpha-stable impulsive-noise channels
//! without prior knowledge of the impulsiveness parameter.
//!
//! A bank of turbo decoder pairs runs in parallel, each assuming a different
//! candidate noise density (Cauchy, Gaussian, or Cauchy-Gaussian mixture
//! approximations at several alpha hypotheses). Their per-bit posteriors are
//! combined online with the Hedge multiplicative-weights rule, which learns
//! which density matches the channel from per-block decoding losses. The
//! [`sim`] module drives Monte Carlo experiments (BLER curves, weight-trace
//! evolution, early-stopping tables, learning-rate sweeps) behind a CLI.

pub mod error;
pub mod expert_bank;
pub mod hedge;
pub mod quad;
pub mod sim;
pub mod stable_noise;
pub mod turbo;

pub use error::{Error, Result};
pub use expert_bank::{decode_all, Expert, ExpertDecode, ExpertPool};
pub use hedge::{block_loss, combine, crc_loss, CombinedPosteriors, HedgeState};
pub use stable_noise::{
    bcgm_pdf, density_total_mass, epsilon_bcgm, epsilon_mebcgm_integral, epsilon_mebcgm_quadratic,
    geometric_power, gsnr_db, gsnr_to_dispersion, sas_char_fn, sas_sample, sas_sample_one,
    AlphaStableParams, ChannelDensity, EpsilonRule, GsnrSpec,
};
pub use turbo::{
    channel_llr, rsc_encode, turbo_decode_pair, turbo_encode, BitPosteriors, CodedFrame,
    Interleaver, PunctureMask, RscSpec, TailMode, TurboCodeConfig, LLR_MAX,
};
