//! Soft-input soft-output decoding of one constituent code by the exact
//! log-domain forward/backward (BCJR) recursion.
//!
//! All combining uses exact log-sum-exp, not the max-log approximation, so
//! posteriors agree with exhaustive MAP enumeration to floating-point
//! accuracy. LLR orientation throughout: positive favors bit 1.

use super::rsc::RscSpec;
use crate::error::{Error, Result};

/// Per-information-bit results of one BCJR pass.
#[derive(Debug, Clone)]
pub struct BcjrOutput {
    /// `ln P(bit=1|y) - ln P(bit=0|y)`
    pub posterior_llr: Vec<f64>,
    /// posterior minus prior minus systematic channel LLR
    pub extrinsic_llr: Vec<f64>,
}

/// Exact log-sum-exp accumulate. Differences beyond 45 contribute less than
/// one ulp of any decision-relevant magnitude and skip the transcendentals.
#[inline]
fn lse(acc: f64, v: f64) -> f64 {
    if acc == f64::NEG_INFINITY {
        return v;
    }
    if v == f64::NEG_INFINITY {
        return acc;
    }
    let (hi, d) = if acc >= v {
        (acc, acc - v)
    } else {
        (v, v - acc)
    };
    if d > 45.0 {
        hi
    } else {
        hi + (-d).exp().ln_1p()
    }
}

/// Precomputed trellis transition tables, indexed `[state][input]`.
struct Trellis {
    num_states: usize,
    next: Vec<[usize; 2]>,
    parity: Vec<[bool; 2]>,
}

impl Trellis {
    fn new(spec: &RscSpec) -> Self {
        let num_states = spec.num_states();
        let mut next = Vec::with_capacity(num_states);
        let mut parity = Vec::with_capacity(num_states);
        for s in 0..num_states as u32 {
            let (n0, p0) = spec.step(s, false);
            let (n1, p1) = spec.step(s, true);
            next.push([n0 as usize, n1 as usize]);
            parity.push([p0, p1]);
        }
        Self {
            num_states,
            next,
            parity,
        }
    }
}

/// Runs the forward/backward recursion over the trellis of `spec`.
///
/// `sys_llr` and `par_llr` carry one channel LLR per trellis step
/// (punctured positions as exact zeros); `prior_llr` carries one prior per
/// information bit. Trellis length determines termination handling: if the
/// step count equals `prior_llr.len()` the final state is unconstrained;
/// if it exceeds it by `spec.memory()` the extra steps are tail steps and
/// the recursion pins the final state to zero.
pub fn bcjr_decode(
    spec: &RscSpec,
    sys_llr: &[f64],
    par_llr: &[f64],
    prior_llr: &[f64],
) -> Result<BcjrOutput> {
    let n = sys_llr.len();
    let k = prior_llr.len();
    if par_llr.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: par_llr.len(),
        });
    }
    if n != k && n != k + spec.memory() {
        return Err(Error::LengthMismatch {
            expected: k + spec.memory(),
            got: n,
        });
    }
    let terminated = n == k + spec.memory();
    let trellis = Trellis::new(spec);
    let s_count = trellis.num_states;
    let neg_inf = f64::NEG_INFINITY;

    // branch metric: input bit carries prior + systematic, parity bit its LLR
    let metric = |t: usize, s: usize, u: usize| -> f64 {
        let mut g = 0.0;
        if u == 1 {
            g += sys_llr[t];
            if t < k {
                g += prior_llr[t];
            }
        }
        if trellis.parity[s][u] {
            g += par_llr[t];
        }
        g
    };

    // backward pass: beta[t][s] stored flat for all steps
    let mut beta = vec![neg_inf; (n + 1) * s_count];
    if terminated {
        beta[n * s_count] = 0.0;
    } else {
        for s in 0..s_count {
            beta[n * s_count + s] = 0.0;
        }
    }
    for t in (0..n).rev() {
        let (lo, hi) = beta.split_at_mut((t + 1) * s_count);
        let cur = &mut lo[t * s_count..];
        let nxt = &hi[..s_count];
        let mut max = neg_inf;
        for s in 0..s_count {
            let mut v = neg_inf;
            for u in 0..2 {
                let cand = metric(t, s, u) + nxt[trellis.next[s][u]];
                v = lse(v, cand);
            }
            cur[s] = v;
            if v > max {
                max = v;
            }
        }
        if max > neg_inf {
            for s in 0..s_count {
                cur[s] -= max;
            }
        }
    }

    // forward pass over the information steps, extracting posteriors
    let mut alpha = vec![neg_inf; s_count];
    let mut alpha_next = vec![neg_inf; s_count];
    alpha[0] = 0.0;
    let mut posterior = Vec::with_capacity(k);
    let mut extrinsic = Vec::with_capacity(k);
    for t in 0..k {
        let beta_next = &beta[(t + 1) * s_count..(t + 2) * s_count];
        alpha_next.iter_mut().for_each(|v| *v = neg_inf);
        let mut num = [neg_inf; 2];
        for s in 0..s_count {
            let a = alpha[s];
            if a == neg_inf {
                continue;
            }
            for u in 0..2 {
                let g = metric(t, s, u);
                let ns = trellis.next[s][u];
                num[u] = lse(num[u], a + g + beta_next[ns]);
                alpha_next[ns] = lse(alpha_next[ns], a + g);
            }
        }
        let llr = num[1] - num[0];
        posterior.push(llr);
        extrinsic.push(llr - prior_llr[t] - sys_llr[t]);
        let max = alpha_next.iter().copied().fold(neg_inf, f64::max);
        if max > neg_inf {
            alpha_next.iter_mut().for_each(|v| *v -= max);
        }
        std::mem::swap(&mut alpha, &mut alpha_next);
    }

    Ok(BcjrOutput {
        posterior_llr: posterior,
        extrinsic_llr: extrinsic,
    })
}
