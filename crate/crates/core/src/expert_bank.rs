//! A bank of turbo decoder pairs, one per candidate noise density.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::stable_noise::{ChannelDensity, EpsilonRule};
use crate::turbo::{decode_from_llrs, depuncture, BitPosteriors, TurboCodeConfig};

/// Decoding iterations each expert runs per block.
pub const DEFAULT_ITERS: usize = 8;

/// One decoder pair: a label, the alpha value it hypothesizes, and the
/// density it evaluates branch metrics under.
#[derive(Debug, Clone)]
pub struct Expert {
    pub label: String,
    pub alpha_hypothesis: f64,
    pub density: ChannelDensity,
}

/// Ordered pool of experts sharing one codec configuration.
#[derive(Debug, Clone)]
pub struct ExpertPool {
    experts: Vec<Expert>,
    pub iters: usize,
}

impl ExpertPool {
    /// The six-expert pool: Cauchy(gamma); minimum-error Cauchy-Gaussian
    /// mixtures at alpha = 1.2, 1.4, 1.6, 1.8 with the same dispersion; and
    /// the Gaussian of variance `2 * gamma`.
    pub fn default_pool(gamma: f64) -> Result<Self> {
        Self::from_alphas(&[1.0, 1.2, 1.4, 1.6, 1.8, 2.0], gamma)
    }

    /// Builds one expert per alpha hypothesis at a shared dispersion:
    /// alpha = 1 is the exact Cauchy, alpha = 2 the exact Gaussian, anything
    /// between the minimum-error mixture approximation of that SaS law.
    pub fn from_alphas(alphas: &[f64], gamma: f64) -> Result<Self> {
        if alphas.is_empty() {
            return Err(Error::InvalidParam(
                "expert pool needs at least one alpha".into(),
            ));
        }
        let mut experts = Vec::with_capacity(alphas.len());
        for &alpha in alphas {
            let (label, density) = if alpha == 1.0 {
                ("cauchy".to_string(), ChannelDensity::cauchy(gamma)?)
            } else if alpha == 2.0 {
                (
                    "gaussian".to_string(),
                    ChannelDensity::gaussian(2.0 * gamma)?,
                )
            } else {
                (
                    format!("mebcgm-{alpha}"),
                    ChannelDensity::sas_approx(alpha, gamma, EpsilonRule::MeBcgmQuadratic)?,
                )
            };
            experts.push(Expert {
                label,
                alpha_hypothesis: alpha,
                density,
            });
        }
        let mut labels: Vec<&str> = experts.iter().map(|e| e.label.as_str()).collect();
        labels.sort_unstable();
        labels.dedup();
        if labels.len() != experts.len() {
            return Err(Error::InvalidParam("expert labels must be unique".into()));
        }
        Ok(Self {
            experts,
            iters: DEFAULT_ITERS,
        })
    }

    pub fn len(&self) -> usize {
        self.experts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.experts.is_empty()
    }

    pub fn experts(&self) -> &[Expert] {
        &self.experts
    }

    pub fn labels(&self) -> Vec<String> {
        self.experts.iter().map(|e| e.label.clone()).collect()
    }
}

/// One expert's result for one block. A numerical failure is reported as
/// uninformative all-0.5 posteriors plus the flag, so the combiner can
/// penalize the expert without losing the block.
#[derive(Debug, Clone)]
pub struct ExpertDecode {
    pub posteriors: BitPosteriors,
    pub failed: bool,
}

/// Decodes one received frame under every expert in pool order.
///
/// All experts share one depunctured view of the frame; only the density
/// differs. Experts run in parallel and the result is bit-identical to a
/// sequential pass over the pool.
pub fn decode_all(
    pool: &ExpertPool,
    cfg: &TurboCodeConfig,
    frame: &[f64],
) -> Result<Vec<ExpertDecode>> {
    if frame.len() != cfg.frame_len() {
        return Err(Error::LengthMismatch {
            expected: cfg.frame_len(),
            got: frame.len(),
        });
    }
    let outputs: Vec<ExpertDecode> = pool
        .experts
        .par_iter()
        .map(|expert| decode_one(expert, cfg, frame, pool.iters))
        .collect();
    Ok(outputs)
}

fn decode_one(expert: &Expert, cfg: &TurboCodeConfig, frame: &[f64], iters: usize) -> ExpertDecode {
    let result =
        depuncture(cfg, &expert.density, frame).and_then(|ch| decode_from_llrs(cfg, &ch, iters));
    match result {
        Ok(posteriors) if posteriors.p_one.iter().all(|p| p.is_finite()) => ExpertDecode {
            posteriors,
            failed: false,
        },
        _ => ExpertDecode {
            posteriors: BitPosteriors::uniform(cfg.k()),
            failed: true,
        },
    }
}
