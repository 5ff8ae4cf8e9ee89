//! Sample-size determination: find the largest replication standard error
//! (equivalently, the smallest replication) whose probability of success
//! meets a target.

use crate::effect::{predictive, DesignPrior, Rounding, UnitVariance};
use crate::error::{Error, Result};
use crate::numeric::normal::{norm_cdf, norm_quantile};
use crate::numeric::root::{find_root, RootBracket, DEFAULT_ROOT_TOL};
use crate::success::{lim_pr, pors, region, skeptical_q, Method};

/// Design limits a sample-size answer is checked against.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Constraints {
    pub max_n: Option<u64>,
    pub max_t1e: Option<f64>,
}

/// A constraint the solved design fails to respect.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Violation {
    MaxSampleSize { n_r: u64, max_n: u64 },
    MaxTypeIError { t1e: f64, max_t1e: f64 },
}

/// What the search concluded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SsdOutcome {
    /// A finite replication meets the target.
    Solved {
        /// Largest replication standard error reaching the target.
        sr_star: f64,
        /// Relative sample size c = (original se / sr_star)^2.
        relative_size: f64,
        /// Per-study sample size at `sr_star`, rounded to nearest.
        n_r: u64,
        /// Success probability recomputed at `sr_star`.
        achieved: f64,
    },
    /// Every replication in the search range meets the target already.
    AlwaysSatisfied,
    /// No replication, however large, reaches the target.
    Infeasible,
}

/// Outcome of a sample-size search, with the context needed to report it.
#[derive(Debug, Clone, PartialEq)]
pub struct SsdResult {
    pub method: Method,
    pub target: f64,
    /// Success probability in the infinite-sample limit.
    pub limit: f64,
    pub outcome: SsdOutcome,
    pub violations: Vec<Violation>,
}

impl SsdResult {
    pub fn sr_star(&self) -> Option<f64> {
        match self.outcome {
            SsdOutcome::Solved { sr_star, .. } => Some(sr_star),
            _ => None,
        }
    }

    pub fn n_r(&self) -> Option<u64> {
        match self.outcome {
            SsdOutcome::Solved { n_r, .. } => Some(n_r),
            _ => None,
        }
    }
}

pub(crate) fn validate_target(target: f64) -> Result<()> {
    if target.is_finite() && target > 0.0 && target < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "target success probability must lie strictly in (0, 1), got {target}"
        )))
    }
}

fn solved(
    method: Method,
    dp: &DesignPrior,
    target: f64,
    limit: f64,
    sr_star: f64,
    achieved: f64,
    unit: &UnitVariance,
) -> SsdResult {
    let se_o = dp.origin().se;
    SsdResult {
        method,
        target,
        limit,
        outcome: SsdOutcome::Solved {
            sr_star,
            relative_size: (se_o / sr_star) * (se_o / sr_star),
            n_r: unit.n_from_se(sr_star, Rounding::Nearest),
            achieved,
        },
        violations: Vec::new(),
    }
}

fn unsolved(method: Method, target: f64, limit: f64, outcome: SsdOutcome) -> SsdResult {
    SsdResult {
        method,
        target,
        limit,
        outcome,
        violations: Vec::new(),
    }
}

// Positive root x of (mu - z_a x) / sqrt(x^2 + v) = z_b, if the closed form
// yields one. `v` is a variance offset and may be negative (used by the
// skeptical p-value solver after a change of variables).
fn gaussian_target_candidate(mu: f64, v: f64, z_a: f64, z_b: f64) -> Option<f64> {
    let dd = z_a * z_a - z_b * z_b;
    if dd == 0.0 {
        return None;
    }
    let disc = mu * mu + dd * v;
    if disc < 0.0 {
        return None;
    }
    let x = (mu * z_a - z_b * disc.sqrt()) / dd;
    (x.is_finite() && x > 0.0).then_some(x)
}

// Tolerance accepted between the recomputed success probability and the
// target before the closed form defers to the generic search.
const CLOSED_FORM_CHECK_TOL: f64 = 1e-9;

/// Closed-form sample size for the two-trials criterion at one-sided level
/// `alpha`. Falls back to [`ssd_generic`] whenever the closed form does not
/// verifiably hit the target (e.g. `alpha` not below `1 - target`).
pub fn ssd_two_trials_closed(
    dp: &DesignPrior,
    alpha: f64,
    target: f64,
    unit: &UnitVariance,
) -> Result<SsdResult> {
    let method = Method::TwoTrials { alpha };
    method.validate()?;
    validate_target(target)?;
    let limit = lim_pr(&method, dp)?;
    if target >= limit {
        return Ok(unsolved(method, target, limit, SsdOutcome::Infeasible));
    }
    let mu = dp.mean();
    let v = dp.limiting_variance();
    let z_a = norm_quantile(1.0 - alpha);
    let z_b = norm_quantile(target);
    if let Some(sr) = gaussian_target_candidate(mu, v, z_a, z_b) {
        let achieved = norm_cdf((mu - z_a * sr) / (sr * sr + v).sqrt());
        if (achieved - target).abs() <= CLOSED_FORM_CHECK_TOL {
            return Ok(solved(method, dp, target, limit, sr, achieved, unit));
        }
    }
    ssd_generic(&method, dp, target, unit, None)
}

/// Closed-form sample size for the skeptical p-value criterion at level
/// `alpha`, via a change of variables onto the two-trials form. Falls back
/// to [`ssd_generic`] when the closed form does not verifiably hit the
/// target. Fails if the original is not significant at `alpha`.
pub fn ssd_skeptical_p_closed(
    dp: &DesignPrior,
    alpha: f64,
    target: f64,
    unit: &UnitVariance,
) -> Result<SsdResult> {
    let method = Method::SkepticalP { alpha };
    method.validate()?;
    validate_target(target)?;
    let original = dp.origin().effect();
    let q = skeptical_q(alpha, &original)?;
    let limit = lim_pr(&method, dp)?;
    if target >= limit {
        return Ok(unsolved(method, target, limit, SsdOutcome::Infeasible));
    }
    let mu = dp.mean();
    let v = dp.limiting_variance();
    let z_a = norm_quantile(1.0 - alpha);
    let z_b = norm_quantile(target);
    if let Some(x) = gaussian_target_candidate(mu, v - q, z_a, z_b) {
        let sr2 = x * x - q;
        if sr2 > 0.0 {
            let sr = sr2.sqrt();
            let achieved = norm_cdf((mu - z_a * (sr2 + q).sqrt()) / (sr2 + v).sqrt());
            if (achieved - target).abs() <= CLOSED_FORM_CHECK_TOL {
                return Ok(solved(method, dp, target, limit, sr, achieved, unit));
            }
        }
    }
    ssd_generic(&method, dp, target, unit, None)
}

pub(crate) enum BracketSolve {
    AllAbove,
    AllBelow,
    Root(f64),
}

// Scans a log-spaced grid from the top of the bracket downward and refines
// the largest upward crossing of `target` with Brent's method. The scan from
// above makes non-monotone curves (meta-analysis) land on the largest
// standard error that meets the target rather than an inner crossing.
pub(crate) fn solve_largest_crossing(
    pors_at: &mut dyn FnMut(f64) -> f64,
    lo: f64,
    hi: f64,
    target: f64,
    tol: f64,
) -> Result<BracketSolve> {
    const GRID: usize = 200;
    let ratio = lo / hi;
    let mut prev_sr = hi;
    let mut prev_p = pors_at(hi);
    let mut all_above = prev_p >= target;
    let mut all_below = prev_p < target;
    let mut crossing: Option<(RootBracket,)> = None;
    for i in 1..GRID {
        let sr = hi * ratio.powf(i as f64 / (GRID - 1) as f64);
        let p = pors_at(sr);
        if p >= target {
            all_below = false;
        } else {
            all_above = false;
        }
        if crossing.is_none() && prev_p < target && p >= target {
            crossing = Some((RootBracket::new(sr, prev_sr, p - target, prev_p - target)?,));
        }
        prev_sr = sr;
        prev_p = p;
    }
    if all_above {
        return Ok(BracketSolve::AllAbove);
    }
    if let Some((bracket,)) = crossing {
        let root = find_root(|s| pors_at(s) - target, bracket, tol)?;
        return Ok(BracketSolve::Root(root));
    }
    if all_below {
        return Ok(BracketSolve::AllBelow);
    }
    // Mixed signs but no upward crossing: only the noisy top of the bracket
    // meets the target (a meta-analysis quirk for borderline originals), so
    // no finite refinement applies.
    Ok(BracketSolve::AllAbove)
}

/// Grid-plus-Brent search for the largest replication standard error whose
/// success probability reaches `target`. Works for every criterion; the
/// closed forms above use it as their fallback. `bracket` overrides the
/// default search range of `[se_o * 1e-4, se_o * 1e2]`.
pub fn ssd_generic(
    method: &Method,
    dp: &DesignPrior,
    target: f64,
    unit: &UnitVariance,
    bracket: Option<(f64, f64)>,
) -> Result<SsdResult> {
    method.validate()?;
    validate_target(target)?;
    let original = dp.origin().effect();
    let limit = lim_pr(method, dp)?;
    let se_o = original.se();
    let (lo, hi) = bracket.unwrap_or((se_o * 1e-4, se_o * 1e2));
    if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && lo < hi) {
        return Err(Error::Domain(format!(
            "search bracket must satisfy 0 < lo < hi, got [{lo}, {hi}]"
        )));
    }
    // Surface data-dependent failures (weak original, bad parameters) once.
    region(method, &original, hi)?;
    let mut pors_at = |sr: f64| {
        let reg = region(method, &original, sr).expect("region valid across the bracket");
        pors(&reg, &predictive(dp, sr))
    };
    let state = solve_largest_crossing(&mut pors_at, lo, hi, target, se_o * DEFAULT_ROOT_TOL)?;
    Ok(match state {
        BracketSolve::AllAbove => unsolved(*method, target, limit, SsdOutcome::AlwaysSatisfied),
        BracketSolve::AllBelow => unsolved(*method, target, limit, SsdOutcome::Infeasible),
        BracketSolve::Root(sr) => {
            let achieved = pors_at(sr);
            solved(*method, dp, target, limit, sr, achieved, unit)
        }
    })
}

/// Sample-size determination for any criterion: closed forms where they
/// exist (two-trials, skeptical p-value), the generic search otherwise.
pub fn ssd(method: &Method, dp: &DesignPrior, target: f64, unit: &UnitVariance) -> Result<SsdResult> {
    match *method {
        Method::TwoTrials { alpha } => ssd_two_trials_closed(dp, alpha, target, unit),
        Method::SkepticalP { alpha } => ssd_skeptical_p_closed(dp, alpha, target, unit),
        _ => ssd_generic(method, dp, target, unit, None),
    }
}

/// Probability of declaring success when the true effect is exactly zero
/// (and there is no heterogeneity), at replication standard error `sr`.
pub fn type_i_error(method: &Method, original: &crate::effect::EffectEstimate, sr: f64) -> Result<f64> {
    let reg = region(method, original, sr)?;
    let null_pred = crate::effect::PredictiveDist::from_moments(0.0, sr * sr);
    Ok(pors(&reg, &null_pred))
}

/// Appends constraint violations to a solved result. The answer itself is
/// never altered; unsolved outcomes pass through untouched.
pub fn check_constraints(
    mut result: SsdResult,
    constraints: &Constraints,
    original: &crate::effect::EffectEstimate,
) -> Result<SsdResult> {
    if let Some(max_t1e) = constraints.max_t1e {
        if !(max_t1e.is_finite() && max_t1e > 0.0 && max_t1e < 1.0) {
            return Err(Error::Domain(format!(
                "type I error bound must lie in (0, 1), got {max_t1e}"
            )));
        }
    }
    if let SsdOutcome::Solved { sr_star, n_r, .. } = result.outcome {
        if let Some(max_n) = constraints.max_n {
            if n_r > max_n {
                result.violations.push(Violation::MaxSampleSize { n_r, max_n });
            }
        }
        if let Some(max_t1e) = constraints.max_t1e {
            let t1e = type_i_error(&result.method, original, sr_star)?;
            if t1e > max_t1e {
                result.violations.push(Violation::MaxTypeIError { t1e, max_t1e });
            }
        }
    }
    Ok(result)
}

/// The joint requirement over several per-method results: the binding
/// method is the one demanding the smallest standard error (largest study).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CombinedRequirement {
    Infeasible,
    AlwaysSatisfied,
    Solved { binding: usize, sr_star: f64 },
}

/// Combines per-method results into the single requirement that satisfies
/// all of them. Returns `None` for an empty slice.
pub fn combined_requirement(results: &[SsdResult]) -> Option<CombinedRequirement> {
    if results.is_empty() {
        return None;
    }
    if results
        .iter()
        .any(|r| matches!(r.outcome, SsdOutcome::Infeasible))
    {
        return Some(CombinedRequirement::Infeasible);
    }
    let mut best: Option<(usize, f64)> = None;
    for (i, r) in results.iter().enumerate() {
        if let SsdOutcome::Solved { sr_star, .. } = r.outcome {
            if best.is_none_or(|(_, s)| sr_star < s) {
                best = Some((i, sr_star));
            }
        }
    }
    Some(match best {
        Some((binding, sr_star)) => CombinedRequirement::Solved { binding, sr_star },
        None => CombinedRequirement::AlwaysSatisfied,
    })
}
