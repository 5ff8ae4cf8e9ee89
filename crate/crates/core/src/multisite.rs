//! Planning a replication carried out at several sites.
//!
//! Site estimates share the effect drawn from the design prior but get
//! independent heterogeneity perturbations and sampling noise, which makes
//! them exchangeable and positively correlated. Success is judged on the
//! pooled (weighted mean) estimate; the analysis models are defined for
//! balanced designs.

use std::ops::RangeInclusive;

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::effect::{DesignPrior, PredictiveDist, Rounding, UnitVariance};
use crate::error::{Error, Result};
use crate::numeric::interval::Interval;
use crate::numeric::normal::norm_quantile;
use crate::numeric::rng;
use crate::numeric::root::DEFAULT_ROOT_TOL;
use crate::ssd::{solve_largest_crossing, validate_target, BracketSolve, SsdOutcome};
use crate::success::{pors, rep_bf_region, McEstimate, Method, SuccessRegion};

/// Standard errors and pooling weights of the per-site estimates.
#[derive(Debug, Clone, PartialEq)]
pub struct MultisiteDesign {
    ses: Vec<f64>,
    weights: Vec<f64>,
}

impl MultisiteDesign {
    /// `m` sites of equal size, each yielding standard error `sr`, pooled
    /// with equal weights.
    pub fn balanced(m: usize, sr: f64) -> Result<Self> {
        if m == 0 {
            return Err(Error::Domain("a design needs at least one site".into()));
        }
        if !(sr.is_finite() && sr > 0.0) {
            return Err(Error::Domain(format!(
                "site standard error must be finite and positive, got {sr}"
            )));
        }
        Ok(Self {
            ses: vec![sr; m],
            weights: vec![1.0; m],
        })
    }

    /// Arbitrary per-site standard errors and positive pooling weights.
    pub fn with_weights(ses: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if ses.is_empty() || ses.len() != weights.len() {
            return Err(Error::Domain(format!(
                "need matching non-empty site and weight lists, got {} and {}",
                ses.len(),
                weights.len()
            )));
        }
        if !ses.iter().all(|s| s.is_finite() && *s > 0.0) {
            return Err(Error::Domain("site standard errors must be finite and positive".into()));
        }
        if !weights.iter().all(|w| w.is_finite() && *w > 0.0) {
            return Err(Error::Domain("pooling weights must be finite and positive".into()));
        }
        Ok(Self { ses, weights })
    }

    pub fn m(&self) -> usize {
        self.ses.len()
    }

    pub fn site_ses(&self) -> &[f64] {
        &self.ses
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// The common site standard error, if the design is balanced.
    pub fn balanced_sr(&self) -> Option<f64> {
        let sr = self.ses[0];
        let w = self.weights[0];
        (self.ses.iter().all(|&s| s == sr) && self.weights.iter().all(|&x| x == w)).then_some(sr)
    }
}

/// Joint predictive distribution of the site estimates: common mean, and a
/// covariance with `se_i^2 + tau^2` noise on the diagonal plus the design
/// prior variance shared across every pair.
pub fn predictive_vector(dp: &DesignPrior, design: &MultisiteDesign) -> (DVector<f64>, DMatrix<f64>) {
    let m = design.m();
    let mean = DVector::from_element(m, dp.mean());
    let tau2 = dp.tau2();
    let mut cov = DMatrix::from_element(m, m, dp.variance());
    for (i, se) in design.site_ses().iter().enumerate() {
        cov[(i, i)] += se * se + tau2;
    }
    (mean, cov)
}

/// Predictive distribution of the weighted mean of the site estimates.
pub fn predictive_pooled(dp: &DesignPrior, design: &MultisiteDesign) -> PredictiveDist {
    let (_, cov) = predictive_vector(dp, design);
    let w = DVector::from_column_slice(design.weights());
    let sum_w: f64 = design.weights().iter().sum();
    let var = (w.transpose() * &cov * &w)[(0, 0)] / (sum_w * sum_w);
    PredictiveDist::from_moments(dp.mean(), var)
}

// Sampling variance of the pooled estimate under the analysis model
// (true effect fixed): (sr^2 + tau^2) / m. Balanced designs only.
fn pooled_analysis_variance(dp: &DesignPrior, design: &MultisiteDesign) -> Result<f64> {
    match design.balanced_sr() {
        Some(sr) => Ok((sr * sr + dp.tau2()) / design.m() as f64),
        None => Err(Error::Unsupported(
            "multisite analysis models are defined for balanced designs only".into(),
        )),
    }
}

/// Success region on the pooled-estimate scale. Defined for the two-trials
/// and replication Bayes factor criteria; the others have no multisite
/// analysis model here.
pub fn multisite_region(
    method: &Method,
    dp: &DesignPrior,
    design: &MultisiteDesign,
) -> Result<SuccessRegion> {
    method.validate()?;
    let u = pooled_analysis_variance(dp, design)?;
    match *method {
        Method::TwoTrials { alpha } => Ok(SuccessRegion::single(Interval::at_least(
            norm_quantile(1.0 - alpha) * u.sqrt(),
        ))),
        Method::RepBayesFactor { gamma, same_sign_only } => {
            let origin = dp.origin();
            if origin.estimate < 0.0 {
                return Err(Error::Domain(
                    "original estimate is negative; reflect the problem to the positive orientation first".into(),
                ));
            }
            Ok(rep_bf_region(
                gamma,
                same_sign_only,
                origin.estimate,
                origin.se * origin.se,
                u,
            ))
        }
        _ => Err(Error::Unsupported(format!(
            "{} has no multisite analysis model",
            method.name()
        ))),
    }
}

/// Probability that the pooled estimate lands in the multisite success
/// region.
pub fn pors_multisite(method: &Method, dp: &DesignPrior, design: &MultisiteDesign) -> Result<f64> {
    let reg = multisite_region(method, dp, design)?;
    Ok(pors(&reg, &predictive_pooled(dp, design)))
}

// Marginal model of the site estimates when the effect follows the
// original's posterior: mean est, covariance v0 I + var_o J. Factored once;
// evaluated per draw.
struct PosteriorPredictive {
    chol: Cholesky<f64, nalgebra::Dyn>,
    est: f64,
    log_det: f64,
    m: usize,
}

impl PosteriorPredictive {
    fn new(m: usize, v0: f64, est: f64, var_o: f64) -> Self {
        let mut cov = DMatrix::from_element(m, m, var_o);
        for i in 0..m {
            cov[(i, i)] += v0;
        }
        let chol = Cholesky::new(cov).expect("site covariance is positive definite");
        let log_det = 2.0 * chol.l_dirty().diagonal().iter().map(|d| d.ln()).sum::<f64>();
        Self { chol, est, log_det, m }
    }

    fn log_pdf(&self, x: &DVector<f64>) -> f64 {
        let z = x.map(|xi| xi - self.est);
        let quad = self.chol.solve(&z).dot(&z);
        -0.5 * (self.m as f64 * LN_2PI + self.log_det + quad)
    }
}

const LN_2PI: f64 = 1.837_877_066_409_345_5;

fn log_null_pdf(x: &DVector<f64>, v0: f64) -> f64 {
    let quad: f64 = x.iter().map(|xi| xi * xi).sum::<f64>() / v0;
    -0.5 * (x.len() as f64 * (LN_2PI + v0.ln()) + quad)
}

/// Simulation cross-check of [`pors_multisite`] that never goes through the
/// pooled-mean reduction: it draws the full site vector and applies the
/// decision rule directly (threshold on the mean for two-trials, the joint
/// Bayes factor of the whole vector for the Bayes factor criterion).
///
/// Panics if `n < 1000`.
pub fn pors_multisite_mc(
    method: &Method,
    dp: &DesignPrior,
    design: &MultisiteDesign,
    n: usize,
    seed: u64,
) -> Result<McEstimate> {
    assert!(n >= 1000, "pors_multisite_mc: need at least 1000 draws, got {n}");
    method.validate()?;
    let sr = design.balanced_sr().ok_or_else(|| {
        Error::Unsupported("multisite analysis models are defined for balanced designs only".into())
    })?;
    let m = design.m();
    let v0 = sr * sr + dp.tau2();
    match *method {
        Method::TwoTrials { alpha } => {
            let bound = norm_quantile(1.0 - alpha) * (v0 / m as f64).sqrt();
            Ok(run_vector_mc(dp, sr, m, n, seed, |x| x.mean() >= bound))
        }
        Method::RepBayesFactor { gamma, same_sign_only } => {
            let origin = *dp.origin();
            if origin.estimate < 0.0 {
                return Err(Error::Domain(
                    "original estimate is negative; reflect the problem to the positive orientation first".into(),
                ));
            }
            let var_o = origin.se * origin.se;
            let alt = PosteriorPredictive::new(m, v0, origin.estimate, var_o);
            let log_gamma = gamma.ln();
            // Split point between the two components of the success set on
            // the pooled scale (centre of the Bayes factor gap).
            let gap_centre = -origin.estimate * (v0 / m as f64) / var_o;
            Ok(run_vector_mc(dp, sr, m, n, seed, |x| {
                let lbf = log_null_pdf(x, v0) - alt.log_pdf(x);
                lbf <= log_gamma && (!same_sign_only || x.mean() >= gap_centre)
            }))
        }
        _ => Err(Error::Unsupported(format!(
            "{} has no multisite analysis model",
            method.name()
        ))),
    }
}

fn run_vector_mc(
    dp: &DesignPrior,
    sr: f64,
    m: usize,
    n: usize,
    seed: u64,
    mut success: impl FnMut(&DVector<f64>) -> bool,
) -> McEstimate {
    let prior_sd = dp.sd();
    let tau = dp.tau2().sqrt();
    let mut stream = rng::stream(seed);
    let mut x = DVector::zeros(m);
    let mut hits = 0usize;
    for _ in 0..n {
        let effect = dp.mean() + prior_sd * rng::draw_std_normal(&mut stream);
        for i in 0..m {
            x[i] = effect
                + tau * rng::draw_std_normal(&mut stream)
                + sr * rng::draw_std_normal(&mut stream);
        }
        if success(&x) {
            hits += 1;
        }
    }
    let p = hits as f64 / n as f64;
    McEstimate {
        estimate: p,
        std_err: (p * (1.0 - p) / n as f64).sqrt(),
    }
}

/// Per-site and per-participant costs of running the replication.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostModel {
    per_site: f64,
    per_unit: f64,
}

impl CostModel {
    pub fn new(per_site: f64, per_unit: f64) -> Result<Self> {
        if !(per_site.is_finite() && per_site >= 0.0) {
            return Err(Error::Domain(format!(
                "per-site cost must be finite and non-negative, got {per_site}"
            )));
        }
        if !(per_unit.is_finite() && per_unit > 0.0) {
            return Err(Error::Domain(format!(
                "per-participant cost must be finite and positive, got {per_unit}"
            )));
        }
        Ok(Self { per_site, per_unit })
    }

    pub fn per_site(&self) -> f64 {
        self.per_site
    }

    pub fn per_unit(&self) -> f64 {
        self.per_unit
    }

    /// Total cost of `m` sites with `site_n` participants each.
    pub fn total(&self, m: usize, site_n: u64) -> f64 {
        m as f64 * (self.per_unit * site_n as f64 + self.per_site)
    }
}

/// Cost-minimizing number of participants per site when the number of sites
/// is free: (lambda / tau) * sqrt(per-site / per-participant cost), rounded
/// to the nearest whole participant (at least one).
///
/// Fails without heterogeneity: as tau goes to zero ever-larger sites become
/// optimal and no finite answer exists.
pub fn optimal_site_size(tau: f64, unit: &UnitVariance, cost: &CostModel) -> Result<u64> {
    if !(tau.is_finite() && tau >= 0.0) {
        return Err(Error::Domain(format!(
            "heterogeneity must be finite and non-negative, got {tau}"
        )));
    }
    if tau == 0.0 {
        return Err(Error::Unsupported(
            "without heterogeneity the per-site size has no finite optimum".into(),
        ));
    }
    let raw = (unit.lambda() / tau) * (cost.per_site / cost.per_unit).sqrt();
    Ok((raw.round() as u64).max(1))
}

/// One number-of-sites option: the solved per-site requirement and what the
/// whole design costs. `total_n` and `total_cost` are absent when the target
/// is unreachable at this `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct CostPoint {
    pub m: usize,
    pub outcome: SsdOutcome,
    pub total_n: Option<u64>,
    pub total_cost: Option<f64>,
}

/// Solves the per-site sample size for each number of sites in `sites` and
/// prices the resulting designs. Per-site sizes are rounded up, so every
/// listed design genuinely meets the target.
pub fn cost_curve(
    method: &Method,
    dp: &DesignPrior,
    target: f64,
    unit: &UnitVariance,
    cost: &CostModel,
    sites: RangeInclusive<usize>,
) -> Result<Vec<CostPoint>> {
    validate_target(target)?;
    if sites.is_empty() || *sites.start() == 0 {
        return Err(Error::Domain(format!(
            "site range must be non-empty and start at 1 or more, got {sites:?}"
        )));
    }
    let se_o = dp.origin().se;
    let (lo, hi) = (se_o * 1e-4, se_o * 1e2);
    let mut curve = Vec::new();
    for m in sites {
        // Surface structural failures (unsupported method, bad parameters)
        // before entering the search.
        pors_multisite(method, dp, &MultisiteDesign::balanced(m, hi)?)?;
        let mut pors_at = |sr: f64| {
            let design = MultisiteDesign::balanced(m, sr).expect("positive sr");
            pors_multisite(method, dp, &design).expect("validated above")
        };
        let state = solve_largest_crossing(&mut pors_at, lo, hi, target, se_o * DEFAULT_ROOT_TOL)?;
        curve.push(match state {
            BracketSolve::Root(sr_star) => {
                let achieved = pors_at(sr_star);
                let site_n = unit.n_from_se(sr_star, Rounding::Up);
                CostPoint {
                    m,
                    outcome: SsdOutcome::Solved {
                        sr_star,
                        relative_size: (se_o / sr_star) * (se_o / sr_star),
                        n_r: site_n,
                        achieved,
                    },
                    total_n: Some(site_n * m as u64),
                    total_cost: Some(cost.total(m, site_n)),
                }
            }
            BracketSolve::AllAbove => CostPoint {
                m,
                outcome: SsdOutcome::AlwaysSatisfied,
                total_n: Some(m as u64),
                total_cost: Some(cost.total(m, 1)),
            },
            BracketSolve::AllBelow => CostPoint {
                m,
                outcome: SsdOutcome::Infeasible,
                total_n: None,
                total_cost: None,
            },
        });
    }
    Ok(curve)
}

/// The cheapest feasible point on a cost curve; ties go to fewer sites.
pub fn optimal_allocation(curve: &[CostPoint]) -> Option<&CostPoint> {
    let mut best: Option<&CostPoint> = None;
    for p in curve {
        let (Some(c), best_c) = (p.total_cost, best.and_then(|b| b.total_cost)) else {
            continue;
        };
        if best_c.is_none_or(|bc| c < bc) {
            best = Some(p);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::effect::{design_prior, predictive, EffectEstimate, InitialPrior};
    use crate::success::region;
    use approx::assert_abs_diff_eq;

    fn labels() -> EffectEstimate {
        EffectEstimate::new(0.205, 0.051).unwrap()
    }

    fn flat_dp(tau: f64) -> DesignPrior {
        design_prior(&labels(), &InitialPrior::Flat, tau * tau)
    }

    fn unit() -> UnitVariance {
        UnitVariance::two_group()
    }

    #[test]
    fn design_validation() {
        assert!(MultisiteDesign::balanced(0, 0.1).is_err());
        assert!(MultisiteDesign::balanced(3, 0.0).is_err());
        assert!(MultisiteDesign::with_weights(vec![0.1, 0.2], vec![1.0]).is_err());
        assert!(MultisiteDesign::with_weights(vec![0.1, -0.2], vec![1.0, 1.0]).is_err());
        assert!(MultisiteDesign::with_weights(vec![0.1, 0.2], vec![1.0, 0.0]).is_err());
        let d = MultisiteDesign::with_weights(vec![0.1, 0.2], vec![2.0, 1.0]).unwrap();
        assert_eq!(d.m(), 2);
        assert_eq!(d.balanced_sr(), None);
        assert_eq!(MultisiteDesign::balanced(4, 0.1).unwrap().balanced_sr(), Some(0.1));
    }

    #[test]
    fn predictive_vector_structure() {
        let dp = flat_dp(0.05);
        let d = MultisiteDesign::balanced(3, 0.1).unwrap();
        let (mean, cov) = predictive_vector(&dp, &d);
        assert!(mean.iter().all(|&m| m == 0.205));
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 0.017_601 } else { 0.005_101 };
                assert_abs_diff_eq!(cov[(i, j)], want, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn pooled_variance_equal_weights() {
        let dp = flat_dp(0.05);
        let d = MultisiteDesign::balanced(4, 0.102).unwrap();
        let pooled = predictive_pooled(&dp, &d);
        assert_abs_diff_eq!(pooled.variance(), 0.008_327, epsilon = 1e-12);
        // Matches the direct decomposition B + (sr^2 + tau^2)/m.
        assert_abs_diff_eq!(
            pooled.variance(),
            dp.variance() + (0.102f64.powi(2) + 0.0025) / 4.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn pooled_variance_general_weights() {
        let dp = flat_dp(0.05);
        let d = MultisiteDesign::with_weights(vec![0.1, 0.2], vec![2.0, 1.0]).unwrap();
        let pooled = predictive_pooled(&dp, &d);
        // B + sum w_i^2 (se_i^2 + tau^2) / (sum w)^2, computed by hand.
        let want = 0.005_101 + (4.0 * 0.0125 + 1.0 * 0.0425) / 9.0;
        assert_abs_diff_eq!(pooled.variance(), want, epsilon = 1e-15);
    }

    #[test]
    fn single_site_reduces_to_plain_predictive() {
        for tau in [0.0, 0.05] {
            let dp = flat_dp(tau);
            let d = MultisiteDesign::balanced(1, 0.06).unwrap();
            let pooled = predictive_pooled(&dp, &d);
            let plain = predictive(&dp, 0.06);
            assert_abs_diff_eq!(pooled.variance(), plain.variance(), epsilon = 1e-18);
            assert_eq!(pooled.mean(), plain.mean());
        }
    }

    #[test]
    fn single_site_matches_single_study_without_heterogeneity() {
        // With tau = 0 the pooled analysis variance is exactly sr^2, so one
        // site reproduces the single-study machinery.
        let dp = flat_dp(0.0);
        let d = MultisiteDesign::balanced(1, 0.051).unwrap();
        for m in [
            Method::TwoTrials { alpha: 0.025 },
            Method::RepBayesFactor { gamma: 0.1, same_sign_only: false },
        ] {
            let multi = pors_multisite(&m, &dp, &d).unwrap();
            let reg = region(&m, &labels(), 0.051).unwrap();
            let single = pors(&reg, &predictive(&dp, 0.051));
            assert_abs_diff_eq!(multi, single, epsilon = 1e-14);
        }
    }

    #[test]
    fn splitting_a_fixed_total_helps_under_heterogeneity() {
        let dp = flat_dp(0.05);
        let m_tt = Method::TwoTrials { alpha: 0.025 };
        // 1500 participants in one site versus two sites of 750.
        let one = pors_multisite(&m_tt, &dp, &MultisiteDesign::balanced(1, unit().se_from_n(1500)).unwrap())
            .unwrap();
        let two = pors_multisite(&m_tt, &dp, &MultisiteDesign::balanced(2, unit().se_from_n(750)).unwrap())
            .unwrap();
        assert_abs_diff_eq!(one, 0.736_559_5, epsilon = 1e-6);
        assert_abs_diff_eq!(two, 0.807_050_6, epsilon = 1e-6);
        assert!(two > one);
    }

    #[test]
    fn unsupported_methods_are_rejected() {
        let dp = flat_dp(0.05);
        let d = MultisiteDesign::balanced(2, 0.1).unwrap();
        for m in [
            Method::MetaAnalysis { alpha: 0.025 },
            Method::Equivalence { alpha: 0.1, margin: 0.2 },
            Method::SkepticalP { alpha: 0.062 },
        ] {
            assert!(matches!(
                pors_multisite(&m, &dp, &d),
                Err(Error::Unsupported(_))
            ));
        }
        // Unbalanced designs have no analysis model either.
        let unbal = MultisiteDesign::with_weights(vec![0.1, 0.2], vec![1.0, 1.0]).unwrap();
        assert!(matches!(
            pors_multisite(&Method::TwoTrials { alpha: 0.025 }, &dp, &unbal),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn vector_bayes_factor_matches_pooled_boundary() {
        // Any site vector whose mean sits on the pooled-region boundary has
        // a joint Bayes factor exactly at the threshold: the pooled mean is
        // sufficient.
        let dp = flat_dp(0.05);
        let d = MultisiteDesign::balanced(3, 0.07).unwrap();
        let method = Method::RepBayesFactor { gamma: 0.1, same_sign_only: false };
        let reg = multisite_region(&method, &dp, &d).unwrap();
        let v0 = 0.07f64.powi(2) + 0.0025;
        let alt = PosteriorPredictive::new(3, v0, 0.205, 0.051f64.powi(2));
        for boundary in [reg.intervals()[1].lower(), reg.intervals()[0].upper()] {
            for spread in [0.0, 0.02] {
                let x = DVector::from_vec(vec![boundary - spread, boundary, boundary + spread]);
                let lbf = log_null_pdf(&x, v0) - alt.log_pdf(&x);
                assert_abs_diff_eq!(lbf.exp(), 0.1, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn monte_carlo_agrees_with_pooled_closed_form() {
        let dp = flat_dp(0.05);
        let d = MultisiteDesign::balanced(3, 0.07).unwrap();
        for method in [
            Method::TwoTrials { alpha: 0.025 },
            Method::RepBayesFactor { gamma: 0.1, same_sign_only: false },
        ] {
            let exact = pors_multisite(&method, &dp, &d).unwrap();
            let mc = pors_multisite_mc(&method, &dp, &d, 200_000, 31).unwrap();
            assert!(
                (mc.estimate - exact).abs() < 4.0 * mc.std_err,
                "{}: mc {} vs exact {} (se {})",
                method.name(),
                mc.estimate,
                exact,
                mc.std_err
            );
        }
    }

    #[test]
    fn cost_curve_two_trials_matches_reference_sizes() {
        let dp = flat_dp(0.05);
        let method = Method::TwoTrials { alpha: 0.025 };
        let cheap_sites = CostModel::new(30.0, 1.0).unwrap();
        let curve = cost_curve(&method, &dp, 0.8, &unit(), &cheap_sites, 1..=6).unwrap();
        let site_ns: Vec<u64> = curve
            .iter()
            .map(|p| match p.outcome {
                SsdOutcome::Solved { n_r, .. } => n_r,
                _ => panic!("expected Solved at m = {}", p.m),
            })
            .collect();
        assert_eq!(site_ns, vec![2602, 718, 417, 294, 227, 185]);
        assert_eq!(curve[0].total_cost, Some(2632.0));
        assert_eq!(curve[4].total_cost, Some(1285.0));
        assert_eq!(optimal_allocation(&curve).unwrap().m, 5);

        let dear_sites = CostModel::new(300.0, 1.0).unwrap();
        let curve = cost_curve(&method, &dp, 0.8, &unit(), &dear_sites, 1..=6).unwrap();
        assert_eq!(curve[1].total_cost, Some(2036.0));
        assert_eq!(optimal_allocation(&curve).unwrap().m, 2);
    }

    #[test]
    fn cost_curve_bayes_factor_matches_reference_sizes() {
        let dp = flat_dp(0.05);
        let method = Method::RepBayesFactor { gamma: 0.1, same_sign_only: false };
        let cheap_sites = CostModel::new(30.0, 1.0).unwrap();
        let curve = cost_curve(&method, &dp, 0.8, &unit(), &cheap_sites, 1..=8).unwrap();
        let site_n = |m: usize| match curve[m - 1].outcome {
            SsdOutcome::Solved { n_r, .. } => n_r,
            _ => panic!("expected Solved at m = {m}"),
        };
        assert_eq!(site_n(2), 1379);
        assert_eq!(site_n(3), 715);
        assert_eq!(site_n(7), 244);
        assert_eq!(site_n(8), 210);
        assert_eq!(curve[6].total_cost, Some(1918.0));
        assert_eq!(curve[7].total_cost, Some(1920.0));
        assert_eq!(optimal_allocation(&curve).unwrap().m, 7);

        let dear_sites = CostModel::new(300.0, 1.0).unwrap();
        let curve = cost_curve(&method, &dp, 0.8, &unit(), &dear_sites, 1..=8).unwrap();
        assert_eq!(curve[2].total_cost, Some(3045.0));
        assert_eq!(optimal_allocation(&curve).unwrap().m, 3);
    }

    #[test]
    fn splitting_can_rescue_feasibility() {
        // Heterogeneity caps what one site can show; spreading the same
        // effort over several sites lifts the ceiling.
        let dp = flat_dp(0.05);
        let method = Method::TwoTrials { alpha: 0.025 };
        let cost = CostModel::new(30.0, 1.0).unwrap();
        let curve = cost_curve(&method, &dp, 0.95, &unit(), &cost, 1..=4).unwrap();
        assert_eq!(curve[0].outcome, SsdOutcome::Infeasible);
        assert_eq!(curve[0].total_cost, None);
        assert!(matches!(curve[3].outcome, SsdOutcome::Solved { .. }));
    }

    #[test]
    fn optimal_site_size_reference_values() {
        let cost100 = CostModel::new(100.0, 1.0).unwrap();
        assert_eq!(optimal_site_size(0.05, &unit(), &cost100).unwrap(), 400);
        let cost30 = CostModel::new(30.0, 1.0).unwrap();
        assert_eq!(optimal_site_size(0.05, &unit(), &cost30).unwrap(), 219);
        let even = CostModel::new(1.0, 1.0).unwrap();
        let u = UnitVariance::new(0.05).unwrap();
        assert_eq!(optimal_site_size(0.05, &u, &even).unwrap(), 1);
        assert!(matches!(
            optimal_site_size(0.0, &unit(), &cost30),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn cost_model_validation() {
        assert!(CostModel::new(-1.0, 1.0).is_err());
        assert!(CostModel::new(10.0, 0.0).is_err());
        let c = CostModel::new(30.0, 2.0).unwrap();
        assert_eq!(c.total(3, 100), 3.0 * 230.0);
    }
}
