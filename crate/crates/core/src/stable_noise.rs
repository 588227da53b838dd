//! Symmetric alpha-stable (SaS) noise: exact sampling, exact and approximate
//! density evaluation, and geometric-SNR calibration.
//!
//! An SaS law is defined by its characteristic function
//! `phi(w) = exp(-gamma * |w|^alpha)` with characteristic exponent
//! `0 < alpha <= 2` and dispersion `gamma > 0`. The two closed-form special
//! cases are Cauchy (`alpha = 1`, scale `gamma`) and Gaussian (`alpha = 2`,
//! variance `2 * gamma`). For `1 <= alpha <= 2` the density is approximated
//! by a Cauchy-Gaussian mixture whose mixing weight comes from either the
//! bi-parameter rule or the minimum-error rule (quadratic fit, validated
//! here against its defining integrals).

use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;

use crate::error::{Error, Result};
use crate::quad::adaptive_simpson;

/// Euler-Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Densities are floored at this value before taking logarithms so that
/// log-likelihood ratios stay finite.
pub const DENSITY_FLOOR: f64 = 1e-300;

/// `C_g = exp(Euler-Mascheroni constant) ~= 1.781072418`, the constant
/// appearing in the geometric-power and GSNR definitions.
pub fn cg() -> f64 {
    EULER_GAMMA.exp()
}

/// Parameters `(alpha, gamma)` of a symmetric alpha-stable law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaStableParams {
    alpha: f64,
    gamma: f64,
}

impl AlphaStableParams {
    /// Requires `0 < alpha <= 2` and `gamma > 0`.
    pub fn new(alpha: f64, gamma: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 2.0) || !alpha.is_finite() {
            return Err(Error::InvalidParam(format!(
                "alpha must be in (0, 2], got {alpha}"
            )));
        }
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::InvalidParam(format!(
                "gamma must be > 0, got {gamma}"
            )));
        }
        Ok(Self { alpha, gamma })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

/// Characteristic function `exp(-gamma * |omega|^alpha)`.
///
/// Real-valued because the law is symmetric.
pub fn sas_char_fn(p: &AlphaStableParams, omega: f64) -> f64 {
    (-p.gamma * omega.abs().powf(p.alpha)).exp()
}

/// Draws one SaS variate by the Chambers-Mallows-Stuck construction.
///
/// For the symmetric case the recipe is: draw `U ~ Uniform(-pi/2, pi/2)`
/// and `W ~ Exp(1)`, form the standard variate, then scale by
/// `gamma^(1/alpha)`. At `alpha = 2` this reduces to a Gaussian of variance
/// `2 * gamma`, at `alpha = 1` to a Cauchy of scale `gamma`.
pub fn sas_sample_one<R: Rng + ?Sized>(p: &AlphaStableParams, rng: &mut R) -> f64 {
    let u: f64 = rng.random_range(-FRAC_PI_2..FRAC_PI_2);
    // 1 - random() lies in (0, 1]; clamp away the 2^-53 chance of exactly 0
    let w = -(1.0 - rng.random::<f64>()).max(f64::MIN_POSITIVE).ln();
    let w = w.max(f64::MIN_POSITIVE);
    let alpha = p.alpha;
    let x = if alpha == 1.0 {
        u.tan()
    } else {
        let a = (alpha * u).sin() / u.cos().powf(1.0 / alpha);
        let b = (((1.0 - alpha) * u).cos() / w).powf((1.0 - alpha) / alpha);
        a * b
    };
    p.gamma.powf(1.0 / alpha) * x
}

/// Draws `n` i.i.d. SaS variates. Deterministic given the RNG state.
pub fn sas_sample<R: Rng + ?Sized>(p: &AlphaStableParams, n: usize, rng: &mut R) -> Vec<f64> {
    (0..n).map(|_| sas_sample_one(p, rng)).collect()
}

/// Bi-parameter mixing weight `eps_alpha = (4 - alpha^2) / (3 * alpha^2)`,
/// valid for `1 <= alpha <= 2`.
pub fn epsilon_bcgm(alpha: f64) -> Result<f64> {
    check_bcgm_alpha(alpha)?;
    Ok((4.0 - alpha * alpha) / (3.0 * alpha * alpha))
}

/// Minimum-error mixing weight via the quadratic fit
/// `3.01753 - 2.53103 * alpha + 0.513504 * alpha^2`, clamped to `[0, 1]`
/// (the raw fit is 1.000004 at alpha = 1 and 0.009486 at alpha = 2).
pub fn epsilon_mebcgm_quadratic(alpha: f64) -> Result<f64> {
    check_bcgm_alpha(alpha)?;
    let raw = 3.01753 - 2.53103 * alpha + 0.513504 * alpha * alpha;
    Ok(raw.clamp(0.0, 1.0))
}

/// Minimum-error mixing weight computed from its defining integrals
/// `B_alpha / A`, evaluated by adaptive quadrature to absolute tolerance
/// `quad_tol`. Serves as the independent oracle for the quadratic fit.
///
/// `B_alpha = int_0^inf (e^(-w-w^alpha) + e^(-2w^2) - e^(-w-w^2) - e^(-w^alpha-w^2)) dw`
/// `A       = int_0^inf (e^(-2w) + e^(-2w^2) - 2 e^(-w-w^2)) dw`
///
/// Both integrands decay at least like `e^(-w)`, so truncation at `w = 50`
/// contributes less than `e^(-100)` and the finite interval suffices.
pub fn epsilon_mebcgm_integral(alpha: f64, quad_tol: f64) -> Result<f64> {
    check_bcgm_alpha(alpha)?;
    const UPPER: f64 = 50.0;
    let b_integrand = |w: f64| {
        let wa = w.powf(alpha);
        let w2 = w * w;
        (-w - wa).exp() + (-2.0 * w2).exp() - (-w - w2).exp() - (-wa - w2).exp()
    };
    let a_integrand = |w: f64| (-2.0 * w).exp() + (-2.0 * w * w).exp() - 2.0 * (-w - w * w).exp();
    let b = adaptive_simpson(b_integrand, 0.0, UPPER, quad_tol)?;
    let a = adaptive_simpson(a_integrand, 0.0, UPPER, quad_tol)?;
    Ok(b / a)
}

fn check_bcgm_alpha(alpha: f64) -> Result<()> {
    if !(1.0..=2.0).contains(&alpha) {
        return Err(Error::InvalidParam(format!(
            "mixture approximation requires 1 <= alpha <= 2, got {alpha}"
        )));
    }
    Ok(())
}

/// Cauchy-Gaussian mixture density
/// `eps * gamma / (pi (x^2 + gamma^2)) + (1 - eps) * exp(-x^2 / (4 gamma^2)) / (2 gamma sqrt(pi))`.
///
/// The Gaussian component has variance `2 * gamma^2`; at `eps = 1` the
/// density is exactly Cauchy(`gamma`).
pub fn bcgm_pdf(x: f64, gamma: f64, eps: f64) -> f64 {
    let cauchy = gamma / (PI * (x * x + gamma * gamma));
    let gauss = (-x * x / (4.0 * gamma * gamma)).exp() / (2.0 * gamma * PI.sqrt());
    eps * cauchy + (1.0 - eps) * gauss
}

/// Which mixing-weight rule a BCGM density uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EpsilonRule {
    /// `(4 - alpha^2) / (3 alpha^2)`
    Bcgm,
    /// Minimum-error quadratic fit, clamped to `[0, 1]`
    MeBcgmQuadratic,
}

impl EpsilonRule {
    pub fn epsilon(&self, alpha: f64) -> Result<f64> {
        match self {
            EpsilonRule::Bcgm => epsilon_bcgm(alpha),
            EpsilonRule::MeBcgmQuadratic => epsilon_mebcgm_quadratic(alpha),
        }
    }
}

/// An evaluable symmetric noise density used for branch metrics.
#[derive(Debug, Clone, PartialEq)]
pub enum ChannelDensity {
    /// `gamma / (pi (x^2 + gamma^2))`, i.e. SaS(1, gamma)
    Cauchy { gamma: f64 },
    /// Zero-mean normal of the given variance, i.e. SaS(2, variance / 2)
    Gaussian { variance: f64 },
    /// Cauchy-Gaussian mixture approximation of SaS(alpha, gamma)
    Bcgm { alpha: f64, gamma: f64, eps: f64 },
    /// Convex combination of other densities
    Mixture(Vec<(f64, ChannelDensity)>),
}

impl ChannelDensity {
    pub fn cauchy(gamma: f64) -> Result<Self> {
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::InvalidParam(format!(
                "Cauchy gamma must be > 0, got {gamma}"
            )));
        }
        Ok(ChannelDensity::Cauchy { gamma })
    }

    pub fn gaussian(variance: f64) -> Result<Self> {
        if !(variance > 0.0) || !variance.is_finite() {
            return Err(Error::InvalidParam(format!(
                "Gaussian variance must be > 0, got {variance}"
            )));
        }
        Ok(ChannelDensity::Gaussian { variance })
    }

    pub fn bcgm(alpha: f64, gamma: f64, rule: EpsilonRule) -> Result<Self> {
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::InvalidParam(format!(
                "BCGM gamma must be > 0, got {gamma}"
            )));
        }
        let eps = rule.epsilon(alpha)?;
        Ok(ChannelDensity::Bcgm { alpha, gamma, eps })
    }

    /// Minimum-error Cauchy-Gaussian approximation of the SaS(`alpha`,
    /// `gamma`) law, built by scaling the standardized mixture fit by the
    /// law's own scale `c = gamma^(1/alpha)`:
    ///
    /// `eps * Cauchy(c) + (1 - eps) * N(0, 2 c^2)`
    ///
    /// Under this scaling the fitted mixing weight stays optimal at every
    /// dispersion, and both endpoints reproduce the exact laws: alpha = 1
    /// gives Cauchy(`gamma`), alpha = 2 gives N(0, `2 gamma`). This is the
    /// density the decoder bank hypothesizes.
    pub fn sas_approx(alpha: f64, gamma: f64, rule: EpsilonRule) -> Result<Self> {
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::InvalidParam(format!(
                "approximation gamma must be > 0, got {gamma}"
            )));
        }
        let eps = rule.epsilon(alpha)?;
        let c = gamma.powf(1.0 / alpha);
        if eps >= 1.0 {
            return Self::cauchy(c);
        }
        if eps <= 0.0 {
            return Self::gaussian(2.0 * c * c);
        }
        Self::mixture(vec![
            (eps, Self::cauchy(c)?),
            (1.0 - eps, Self::gaussian(2.0 * c * c)?),
        ])
    }

    /// Mixture weights must be positive and sum to 1.
    pub fn mixture(components: Vec<(f64, ChannelDensity)>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidParam(
                "mixture needs at least one component".into(),
            ));
        }
        let total: f64 = components.iter().map(|(w, _)| *w).sum();
        if components.iter().any(|(w, _)| !(*w > 0.0)) || (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParam(format!(
                "mixture weights must be positive and sum to 1 (sum = {total})"
            )));
        }
        Ok(ChannelDensity::Mixture(components))
    }

    /// Density value at `x`; finite and nonnegative for all finite `x`.
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            ChannelDensity::Cauchy { gamma } => gamma / (PI * (x * x + gamma * gamma)),
            ChannelDensity::Gaussian { variance } => {
                (-x * x / (2.0 * variance)).exp() / (2.0 * PI * variance).sqrt()
            }
            ChannelDensity::Bcgm { gamma, eps, .. } => bcgm_pdf(x, *gamma, *eps),
            ChannelDensity::Mixture(parts) => parts.iter().map(|(w, d)| w * d.eval(x)).sum(),
        }
    }

    /// `ln` of the floored density; never `-inf`.
    pub fn ln_eval(&self, x: f64) -> f64 {
        self.eval(x).max(DENSITY_FLOOR).ln()
    }

    /// A representative scale (largest component scale), used to size
    /// integration domains.
    pub fn scale(&self) -> f64 {
        match self {
            ChannelDensity::Cauchy { gamma } => *gamma,
            ChannelDensity::Gaussian { variance } => variance.sqrt(),
            ChannelDensity::Bcgm { gamma, .. } => gamma * std::f64::consts::SQRT_2,
            ChannelDensity::Mixture(parts) => parts
                .iter()
                .map(|(_, d)| d.scale())
                .fold(f64::MIN_POSITIVE, f64::max),
        }
    }

    /// Analytic two-sided tail mass beyond `|x| > x0`, valid for
    /// `x0` much larger than [`Self::scale`] (Gaussian tails are treated as
    /// zero, which holds to far below f64 resolution at `x0 >= 40 sigma`).
    pub fn tail_mass(&self, x0: f64) -> f64 {
        match self {
            ChannelDensity::Cauchy { gamma } => 1.0 - 2.0 / PI * (x0 / gamma).atan(),
            ChannelDensity::Gaussian { .. } => 0.0,
            ChannelDensity::Bcgm { gamma, eps, .. } => eps * (1.0 - 2.0 / PI * (x0 / gamma).atan()),
            ChannelDensity::Mixture(parts) => parts.iter().map(|(w, d)| w * d.tail_mass(x0)).sum(),
        }
    }
}

/// Total probability mass of a density: quadrature over
/// `[-10^6 * scale, 10^6 * scale]` plus the analytic tail beyond.
///
/// The body is split at `10 * scale`; the far region is integrated under the
/// substitution `x = scale * e^t`, which flattens the slowly decaying Cauchy
/// tail into a well-conditioned integrand.
pub fn density_total_mass(d: &ChannelDensity, quad_tol: f64) -> Result<f64> {
    let s = d.scale();
    let x_max = 1e6 * s;
    let near = adaptive_simpson(|x| d.eval(x), 0.0, 10.0 * s, quad_tol / 4.0)?;
    let far = adaptive_simpson(
        |t: f64| {
            let x = s * t.exp();
            d.eval(x) * x
        },
        10.0f64.ln(),
        1e6f64.ln(),
        quad_tol / 4.0,
    )?;
    Ok(2.0 * (near + far) + d.tail_mass(x_max))
}

/// Geometric power `S_0 = (C_g * gamma)^(1/alpha) / C_g` of an SaS law;
/// finite for every `alpha` even where the variance is not.
pub fn geometric_power(p: &AlphaStableParams) -> f64 {
    let c = cg();
    (c * p.gamma).powf(1.0 / p.alpha) / c
}

/// Geometric signal-to-noise ratio specification.
///
/// `GSNR = (A / S_0)^2 / (2 C_g)` where `A` is the signal amplitude and
/// `S_0` the geometric power of the noise. `C_g` is fixed to
/// `exp(Euler-Mascheroni)`; the setter exists for tests only.
#[derive(Debug, Clone, Copy)]
pub struct GsnrSpec {
    pub gsnr_db: f64,
    pub amplitude: f64,
    cg: f64,
}

impl GsnrSpec {
    pub fn new(gsnr_db: f64, amplitude: f64) -> Result<Self> {
        if !(amplitude > 0.0) || !amplitude.is_finite() {
            return Err(Error::InvalidParam(format!(
                "amplitude must be > 0, got {amplitude}"
            )));
        }
        Ok(Self {
            gsnr_db,
            amplitude,
            cg: cg(),
        })
    }

    pub fn cg(&self) -> f64 {
        self.cg
    }

    #[doc(hidden)]
    pub fn with_cg(mut self, cg: f64) -> Self {
        self.cg = cg;
        self
    }
}

/// Dispersion `gamma` of the SaS(`alpha`) law matching the target GSNR:
/// `S_0 = A / sqrt(2 C_g GSNR)`, then `gamma = (C_g S_0)^alpha / C_g`.
///
/// Round-trips with [`geometric_power`] / [`gsnr_db`].
pub fn gsnr_to_dispersion(spec: &GsnrSpec, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 2.0) {
        return Err(Error::InvalidParam(format!(
            "alpha must be in (0, 2], got {alpha}"
        )));
    }
    let gsnr_linear = 10f64.powf(spec.gsnr_db / 10.0);
    let s0 = spec.amplitude / (2.0 * spec.cg * gsnr_linear).sqrt();
    Ok((spec.cg * s0).powf(alpha) / spec.cg)
}

/// GSNR in dB produced by an SaS law against a signal of the given amplitude.
pub fn gsnr_db(p: &AlphaStableParams, amplitude: f64) -> f64 {
    let s0 = geometric_power(p);
    let ratio = amplitude / s0;
    10.0 * (ratio * ratio / (2.0 * cg())).log10()
}
