//! Online combining of expert posteriors by the Hedge multiplicative-weights
//! rule, with optional early stopping.
//!
//! Each decoder pair is an expert. Weights start at `W`, are multiplied by
//! `beta^loss` after every block, and live in the log domain: with 1e5
//! blocks and `beta = 0.9` the raw weights underflow long before the run
//! ends, while the log-domain update is exact.

use crate::error::{Error, Result};
use crate::turbo::BitPosteriors;

/// Expert weights and early-stopping bookkeeping for one decoding session.
#[derive(Debug, Clone)]
pub struct HedgeState {
    log_weights: Vec<f64>,
    beta: f64,
    init_weight: f64,
    step: usize,
    tau: Option<usize>,
    frozen_choice: Option<usize>,
    suppressed_updates: usize,
}

impl HedgeState {
    /// `m` experts, learning rate `beta` in `(0, 1]`, initial weight
    /// `init_weight > 0`, optional freeze step `tau >= 1`.
    pub fn new(m: usize, beta: f64, init_weight: f64, tau: Option<usize>) -> Result<Self> {
        if m == 0 {
            return Err(Error::Hedge("need at least one expert".into()));
        }
        if !(beta > 0.0 && beta <= 1.0) {
            return Err(Error::Hedge(format!("beta must be in (0, 1], got {beta}")));
        }
        if !(init_weight > 0.0) || !init_weight.is_finite() {
            return Err(Error::Hedge(format!(
                "initial weight must be > 0, got {init_weight}"
            )));
        }
        if tau == Some(0) {
            return Err(Error::Hedge("freeze step tau must be >= 1".into()));
        }
        Ok(Self {
            log_weights: vec![init_weight.ln(); m],
            beta,
            init_weight,
            step: 0,
            tau,
            frozen_choice: None,
            suppressed_updates: 0,
        })
    }

    pub fn num_experts(&self) -> usize {
        self.log_weights.len()
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn init_weight(&self) -> f64 {
        self.init_weight
    }

    /// Completed weight updates (= blocks observed).
    pub fn step(&self) -> usize {
        self.step
    }

    pub fn tau(&self) -> Option<usize> {
        self.tau
    }

    pub fn frozen_choice(&self) -> Option<usize> {
        self.frozen_choice
    }

    /// Weight updates refused because the state was already frozen.
    pub fn suppressed_updates(&self) -> usize {
        self.suppressed_updates
    }

    /// Weights stop moving once the freeze step is reached.
    pub fn is_frozen(&self) -> bool {
        self.tau.is_some_and(|tau| self.step >= tau)
    }

    pub fn log_weights(&self) -> &[f64] {
        &self.log_weights
    }

    /// Normalized weights `zeta_m = w_m / sum_j w_j`, computed stably by
    /// subtracting the max log-weight before exponentiating.
    pub fn normalized_weights(&self) -> Vec<f64> {
        let max = self
            .log_weights
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        let unnorm: Vec<f64> = self
            .log_weights
            .iter()
            .map(|&lw| (lw - max).exp())
            .collect();
        let total: f64 = unnorm.iter().sum();
        unnorm.into_iter().map(|w| w / total).collect()
    }

    /// `log w_m += l_m * ln(beta)` for one block of losses in `[0, 1]`.
    ///
    /// A frozen state leaves the weights untouched and records the event.
    pub fn update_weights(&mut self, losses: &[f64]) -> Result<()> {
        if losses.len() != self.log_weights.len() {
            return Err(Error::LengthMismatch {
                expected: self.log_weights.len(),
                got: losses.len(),
            });
        }
        if let Some(&bad) = losses.iter().find(|l| !(0.0..=1.0).contains(*l)) {
            return Err(Error::Hedge(format!("loss {bad} outside [0, 1]")));
        }
        if self.is_frozen() {
            self.suppressed_updates += 1;
            return Ok(());
        }
        let ln_beta = self.beta.ln();
        for (lw, &l) in self.log_weights.iter_mut().zip(losses) {
            *lw += l * ln_beta;
        }
        self.step += 1;
        Ok(())
    }

    /// Picks the highest-weight expert (ties broken by lowest index),
    /// records it, and returns its index. Only valid once the freeze step
    /// has been reached; idempotent afterwards.
    pub fn freeze_and_select(&mut self) -> Result<usize> {
        let tau = self
            .tau
            .ok_or_else(|| Error::Hedge("no freeze step configured".into()))?;
        if self.step < tau {
            return Err(Error::Hedge(format!(
                "freeze requested at step {} before tau = {tau}",
                self.step
            )));
        }
        if let Some(choice) = self.frozen_choice {
            return Ok(choice);
        }
        let zeta = self.normalized_weights();
        let mut best = 0;
        for (i, &z) in zeta.iter().enumerate() {
            if z > zeta[best] {
                best = i;
            }
        }
        self.frozen_choice = Some(best);
        Ok(best)
    }
}

/// Combined posteriors `P_hat = sum_m zeta_m P_m` plus the weights used.
#[derive(Debug, Clone)]
pub struct CombinedPosteriors {
    pub p_hat: Vec<f64>,
    pub zeta: Vec<f64>,
}

/// Convex combination of expert posteriors under normalized weights.
pub fn combine(posteriors: &[BitPosteriors], zeta: &[f64]) -> Result<CombinedPosteriors> {
    if posteriors.is_empty() || posteriors.len() != zeta.len() {
        return Err(Error::LengthMismatch {
            expected: zeta.len(),
            got: posteriors.len(),
        });
    }
    let k = posteriors[0].len();
    if posteriors.iter().any(|p| p.len() != k) {
        return Err(Error::LengthMismatch {
            expected: k,
            got: posteriors
                .iter()
                .map(|p| p.len())
                .find(|&l| l != k)
                .unwrap(),
        });
    }
    let zeta_sum: f64 = zeta.iter().sum();
    if (zeta_sum - 1.0).abs() > 1e-6 {
        return Err(Error::Hedge(format!(
            "combining weights must sum to 1, got {zeta_sum}"
        )));
    }
    let mut p_hat = vec![0.0; k];
    for (post, &z) in posteriors.iter().zip(zeta) {
        for (acc, &p) in p_hat.iter_mut().zip(&post.p_one) {
            *acc += z * p;
        }
    }
    for p in &mut p_hat {
        *p = p.clamp(0.0, 1.0);
    }
    Ok(CombinedPosteriors {
        p_hat,
        zeta: zeta.to_vec(),
    })
}

/// Fraction of bit errors in the block: Hamming distance over length.
pub fn block_loss(decoded: &[bool], reference: &[bool]) -> Result<f64> {
    if decoded.len() != reference.len() {
        return Err(Error::LengthMismatch {
            expected: reference.len(),
            got: decoded.len(),
        });
    }
    let errors = decoded
        .iter()
        .zip(reference)
        .filter(|(a, b)| a != b)
        .count();
    Ok(errors as f64 / decoded.len() as f64)
}

/// Binary loss from a block error detector: 0 if the hard-decision block
/// passes the check, else 1. Surrogate for environments without ground
/// truth.
pub fn crc_loss<F: FnOnce(&[bool]) -> bool>(posteriors: &BitPosteriors, crc_check: F) -> f64 {
    if crc_check(&posteriors.hard_decisions()) {
        0.0
    } else {
        1.0
    }
}
