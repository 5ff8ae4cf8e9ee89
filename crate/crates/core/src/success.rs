//! Replication success criteria.
//!
//! Each criterion is represented as a region of replication estimates that
//! count as success at a given replication standard error. The probability
//! of replication success is then the predictive mass of that region, which
//! is what the sample-size machinery drives toward a target.

use crate::effect::{design_prior, predictive, DesignPrior, EffectEstimate, InitialPrior, PredictiveDist};
use crate::error::{Error, Result};
use crate::numeric::interval::Interval;
use crate::numeric::normal::{norm_cdf, norm_quantile};
use crate::numeric::quad::integrate;
use crate::numeric::rng;

/// The success criterion a replication will be judged by.
///
/// All criteria assume the original estimate is oriented positive; reflect a
/// negative original (and its replication data) before use. `alpha` values
/// are one-sided tail levels except for `Equivalence`, where the level is
/// split across the two one-sided tests.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    /// Significance of the replication alone at one-sided level `alpha`.
    TwoTrials { alpha: f64 },
    /// Significance of the fixed-effect combination of original and
    /// replication at one-sided level `alpha`.
    MetaAnalysis { alpha: f64 },
    /// Two one-sided tests that original and replication differ by less
    /// than `margin`, each at level `alpha / 2`.
    Equivalence { alpha: f64, margin: f64 },
    /// Replication Bayes factor contrasting the null with the original's
    /// posterior, required to fall at or below `gamma`. With
    /// `same_sign_only` the success region keeps only estimates whose sign
    /// matches the original.
    RepBayesFactor { gamma: f64, same_sign_only: bool },
    /// The skeptical p-value: the replication must defeat the skeptical
    /// prior that would just explain away the original at level `alpha`.
    SkepticalP { alpha: f64 },
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::TwoTrials { .. } => "two-trials",
            Method::MetaAnalysis { .. } => "meta-analysis",
            Method::Equivalence { .. } => "equivalence",
            Method::RepBayesFactor { .. } => "rep-bayes-factor",
            Method::SkepticalP { .. } => "skeptical-p",
        }
    }

    /// Checks the numeric parameters (levels in (0, 1), positive margin,
    /// Bayes factor threshold in (0, 1]).
    pub fn validate(&self) -> Result<()> {
        let level = |alpha: f64| {
            if alpha.is_finite() && alpha > 0.0 && alpha < 1.0 {
                Ok(())
            } else {
                Err(Error::Domain(format!(
                    "level must lie strictly in (0, 1), got {alpha}"
                )))
            }
        };
        match *self {
            Method::TwoTrials { alpha }
            | Method::MetaAnalysis { alpha }
            | Method::SkepticalP { alpha } => level(alpha),
            Method::Equivalence { alpha, margin } => {
                level(alpha)?;
                if margin.is_finite() && margin > 0.0 {
                    Ok(())
                } else {
                    Err(Error::Domain(format!(
                        "equivalence margin must be finite and positive, got {margin}"
                    )))
                }
            }
            Method::RepBayesFactor { gamma, .. } => {
                if gamma.is_finite() && gamma > 0.0 && gamma <= 1.0 {
                    Ok(())
                } else {
                    Err(Error::Domain(format!(
                        "Bayes factor threshold must lie in (0, 1], got {gamma}"
                    )))
                }
            }
        }
    }
}

/// A finite union of disjoint closed intervals of replication estimates.
#[derive(Debug, Clone, PartialEq)]
pub struct SuccessRegion {
    intervals: Vec<Interval>,
}

impl SuccessRegion {
    pub fn empty() -> Self {
        Self { intervals: Vec::new() }
    }

    pub fn all_reals() -> Self {
        Self::single(Interval::all_reals())
    }

    pub(crate) fn single(iv: Interval) -> Self {
        Self { intervals: vec![iv] }
    }

    /// Normalizes an arbitrary list: sorts and merges overlapping or
    /// touching intervals.
    pub fn new(mut intervals: Vec<Interval>) -> Self {
        intervals.sort_by(|a, b| a.lower().total_cmp(&b.lower()));
        let mut merged: Vec<Interval> = Vec::new();
        for iv in intervals {
            if let Some(last) = merged.last_mut() {
                if iv.lower() <= last.upper() {
                    *last = Interval::new(last.lower(), last.upper().max(iv.upper()));
                    continue;
                }
            }
            merged.push(iv);
        }
        Self { intervals: merged }
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn is_all_reals(&self) -> bool {
        self.intervals.len() == 1 && self.intervals[0].is_all_reals()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.intervals.iter().any(|iv| iv.contains(x))
    }
}

fn require_oriented(original: &EffectEstimate) -> Result<()> {
    if original.estimate() < 0.0 {
        Err(Error::Domain(
            "original estimate is negative; reflect the problem to the positive orientation first"
                .into(),
        ))
    } else {
        Ok(())
    }
}

/// Success region of the given criterion at replication standard error `sr`.
pub fn region(method: &Method, original: &EffectEstimate, sr: f64) -> Result<SuccessRegion> {
    method.validate()?;
    if !(sr.is_finite() && sr > 0.0) {
        return Err(Error::Domain(format!(
            "replication standard error must be finite and positive, got {sr}"
        )));
    }
    match *method {
        Method::TwoTrials { alpha } => Ok(SuccessRegion::single(Interval::at_least(
            norm_quantile(1.0 - alpha) * sr,
        ))),
        Method::MetaAnalysis { alpha } => {
            require_oriented(original)?;
            let ratio = sr * sr / original.variance();
            let lower = sr * norm_quantile(1.0 - alpha) * (1.0 + ratio).sqrt()
                - original.estimate() * ratio;
            Ok(SuccessRegion::single(Interval::at_least(lower)))
        }
        Method::Equivalence { alpha, margin } => {
            require_oriented(original)?;
            let half =
                margin - norm_quantile(1.0 - 0.5 * alpha) * (original.variance() + sr * sr).sqrt();
            if half < 0.0 {
                Ok(SuccessRegion::empty())
            } else {
                Ok(SuccessRegion::single(Interval::new(
                    original.estimate() - half,
                    original.estimate() + half,
                )))
            }
        }
        Method::RepBayesFactor { gamma, same_sign_only } => {
            require_oriented(original)?;
            Ok(rep_bf_region(
                gamma,
                same_sign_only,
                original.estimate(),
                original.variance(),
                sr * sr,
            ))
        }
        Method::SkepticalP { alpha } => {
            require_oriented(original)?;
            let q = skeptical_q(alpha, original)?;
            Ok(SuccessRegion::single(Interval::at_least(
                norm_quantile(1.0 - alpha) * (sr * sr + q).sqrt(),
            )))
        }
    }
}

// Region where the replication Bayes factor (null against the original's
// posterior predictive) falls at or below gamma, for a replication estimate
// with variance var_r. Shared with the multisite engine, which lands on the
// same form with the variance of the pooled site mean.
pub(crate) fn rep_bf_region(
    gamma: f64,
    same_sign_only: bool,
    est: f64,
    var_o: f64,
    var_r: f64,
) -> SuccessRegion {
    let ratio = var_r / var_o;
    let a = var_r
        * (1.0 + ratio)
        * (est * est / var_o - 2.0 * gamma.ln() + (1.0 + 1.0 / ratio).ln());
    if a < 0.0 {
        // The factor never exceeds gamma, whatever the data show.
        return SuccessRegion::all_reals();
    }
    let shift = est * ratio;
    let root = a.sqrt();
    let upper = Interval::at_least(root - shift);
    if same_sign_only {
        SuccessRegion::single(upper)
    } else {
        SuccessRegion::new(vec![Interval::at_most(-root - shift), upper])
    }
}

// Variance of the skeptical prior that would just explain away the original
// at level alpha. Fails when the original is not significant at that level.
pub(crate) fn skeptical_q(alpha: f64, original: &EffectEstimate) -> Result<f64> {
    let z_a = norm_quantile(1.0 - alpha);
    let z_o = original.z();
    if z_o <= z_a {
        return Err(Error::InfeasibleOriginal(format!(
            "skeptical p-value needs the original z ({z_o:.4}) above the level quantile ({z_a:.4})"
        )));
    }
    Ok(original.variance() / ((z_o / z_a).powi(2) - 1.0))
}

/// Probability of replication success: the predictive mass of `region`.
pub fn pors(region: &SuccessRegion, pred: &PredictiveDist) -> f64 {
    if pred.sd() == 0.0 {
        return if region.contains(pred.mean()) { 1.0 } else { 0.0 };
    }
    let total: f64 = region
        .intervals()
        .iter()
        .map(|iv| {
            norm_cdf((iv.upper() - pred.mean()) / pred.sd())
                - norm_cdf((iv.lower() - pred.mean()) / pred.sd())
        })
        .sum();
    total.clamp(0.0, 1.0)
}

/// A Monte Carlo probability estimate with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub estimate: f64,
    pub std_err: f64,
}

/// Simulation cross-check of [`pors`]: draws the effect from the design
/// prior, perturbs it by heterogeneity, adds sampling noise, and counts how
/// often the result lands in `region`.
///
/// Panics if `n < 1000` or `sr` is negative or non-finite.
pub fn pors_monte_carlo(
    region: &SuccessRegion,
    dp: &DesignPrior,
    sr: f64,
    n: usize,
    seed: u64,
) -> McEstimate {
    assert!(n >= 1000, "pors_monte_carlo: need at least 1000 draws, got {n}");
    assert!(
        sr.is_finite() && sr >= 0.0,
        "pors_monte_carlo: sr must be finite and non-negative, got {sr}"
    );
    let prior_sd = dp.sd();
    let tau = dp.tau2().sqrt();
    let mut stream = rng::stream(seed);
    let mut hits = 0usize;
    for _ in 0..n {
        let effect = dp.mean() + prior_sd * rng::draw_std_normal(&mut stream);
        let site_effect = effect + tau * rng::draw_std_normal(&mut stream);
        let estimate = site_effect + sr * rng::draw_std_normal(&mut stream);
        if region.contains(estimate) {
            hits += 1;
        }
    }
    let p = hits as f64 / n as f64;
    McEstimate {
        estimate: p,
        std_err: (p * (1.0 - p) / n as f64).sqrt(),
    }
}

// Tiny replication standard error used where the exact zero limit is
// degenerate or has no closed form: a fixed fraction of the original scale.
const LIMIT_EPS_FACTOR: f64 = 1e-6;

/// Probability of replication success in the infinite-sample limit
/// (replication standard error going to zero).
///
/// Closed forms are used where the limit is smooth; the Bayes factor
/// criterion and any point-mass design prior are evaluated at a tiny
/// standard error (1e-6 of the original's) instead, which is the documented
/// convention for this quantity.
pub fn lim_pr(method: &Method, dp: &DesignPrior) -> Result<f64> {
    method.validate()?;
    let origin = dp.origin();
    let original =
        EffectEstimate::new(origin.estimate, origin.se).expect("design prior origin is valid");
    if !matches!(method, Method::TwoTrials { .. }) {
        require_oriented(&original)?;
    }
    let v = dp.limiting_variance();
    if v == 0.0 {
        return eps_eval(method, &original, dp);
    }
    let sd = v.sqrt();
    let mu = dp.mean();
    match *method {
        Method::TwoTrials { .. } | Method::MetaAnalysis { .. } => Ok(norm_cdf(mu / sd)),
        Method::Equivalence { alpha, margin } => {
            let half = margin - norm_quantile(1.0 - 0.5 * alpha) * original.se();
            if half <= 0.0 {
                return Ok(0.0);
            }
            let hi = norm_cdf((original.estimate() + half - mu) / sd);
            let lo = norm_cdf((original.estimate() - half - mu) / sd);
            Ok((hi - lo).max(0.0))
        }
        Method::SkepticalP { alpha } => {
            let q = skeptical_q(alpha, &original)?;
            Ok(norm_cdf((mu - norm_quantile(1.0 - alpha) * q.sqrt()) / sd))
        }
        Method::RepBayesFactor { .. } => eps_eval(method, &original, dp),
    }
}

fn eps_eval(method: &Method, original: &EffectEstimate, dp: &DesignPrior) -> Result<f64> {
    let sr = original.se() * LIMIT_EPS_FACTOR;
    let reg = region(method, original, sr)?;
    Ok(pors(&reg, &predictive(dp, sr)))
}

/// Prior on the heterogeneity standard deviation for sensitivity analyses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TauPrior {
    PointMass(f64),
    HalfNormal { scale: f64 },
    Uniform { lo: f64, hi: f64 },
}

impl TauPrior {
    pub fn validate(&self) -> Result<()> {
        match *self {
            TauPrior::PointMass(t) => {
                if t.is_finite() && t >= 0.0 {
                    Ok(())
                } else {
                    Err(Error::Domain(format!(
                        "heterogeneity point mass must be finite and non-negative, got {t}"
                    )))
                }
            }
            TauPrior::HalfNormal { scale } => {
                if scale.is_finite() && scale > 0.0 {
                    Ok(())
                } else {
                    Err(Error::Domain(format!(
                        "half-normal scale must be finite and positive, got {scale}"
                    )))
                }
            }
            TauPrior::Uniform { lo, hi } => {
                if lo.is_finite() && hi.is_finite() && lo >= 0.0 && lo < hi {
                    Ok(())
                } else {
                    Err(Error::Domain(format!(
                        "uniform support must satisfy 0 <= lo < hi, got [{lo}, {hi}]"
                    )))
                }
            }
        }
    }
}

/// Success probability averaged over uncertainty about the heterogeneity
/// scale, at fixed replication standard error `sr`.
pub fn pors_tau_marginal(
    method: &Method,
    original: &EffectEstimate,
    initial: &InitialPrior,
    tau_prior: &TauPrior,
    sr: f64,
) -> Result<f64> {
    tau_prior.validate()?;
    let reg = region(method, original, sr)?;
    let at_tau = |tau: f64| {
        let dp = design_prior(original, initial, tau * tau);
        pors(&reg, &predictive(&dp, sr))
    };
    match *tau_prior {
        TauPrior::PointMass(t) => Ok(at_tau(t)),
        TauPrior::HalfNormal { scale } => {
            let norm = (2.0 / std::f64::consts::PI).sqrt() / scale;
            integrate(
                |t| norm * (-0.5 * (t / scale) * (t / scale)).exp() * at_tau(t),
                0.0,
                f64::INFINITY,
                1e-8,
            )
        }
        TauPrior::Uniform { lo, hi } => {
            let dens = 1.0 / (hi - lo);
            integrate(|t| dens * at_tau(t), lo, hi, 1e-8)
        }
    }
}
