//! Effect estimates, priors on the true effect, and the design prior /
//! predictive distributions used to plan a replication.

use crate::error::{Error, Result};
use crate::numeric::normal::norm_quantile;

/// An estimated effect with its standard error, e.g. from the original study
/// or from a pilot.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectEstimate {
    estimate: f64,
    se: f64,
    n: Option<u64>,
    groups: Option<GroupSummaries>,
}

impl EffectEstimate {
    /// Requires a finite estimate and a finite, strictly positive standard
    /// error.
    pub fn new(estimate: f64, se: f64) -> Result<Self> {
        if !estimate.is_finite() {
            return Err(Error::Domain(format!(
                "effect estimate must be finite, got {estimate}"
            )));
        }
        if !(se.is_finite() && se > 0.0) {
            return Err(Error::Domain(format!(
                "standard error must be finite and positive, got {se}"
            )));
        }
        Ok(Self {
            estimate,
            se,
            n: None,
            groups: None,
        })
    }

    /// Attaches a total sample size (metadata only; no recomputation).
    pub fn with_n(mut self, n: u64) -> Self {
        self.n = Some(n);
        self
    }

    /// Standardized mean difference from two-group summaries, with the usual
    /// pooled-SD estimate and its large-sample standard error.
    pub fn from_groups(groups: GroupSummaries) -> Result<Self> {
        groups.validate()?;
        let GroupSummaries {
            mean1,
            mean2,
            sd1,
            sd2,
            n1,
            n2,
        } = groups;
        let (n1f, n2f) = (n1 as f64, n2 as f64);
        let pooled_var =
            ((n1f - 1.0) * sd1 * sd1 + (n2f - 1.0) * sd2 * sd2) / (n1f + n2f - 2.0);
        let d = (mean1 - mean2) / pooled_var.sqrt();
        let total = n1f + n2f;
        let se = ((n1f + n2f) / (n1f * n2f) + d * d / (2.0 * total)).sqrt();
        Ok(Self {
            estimate: d,
            se,
            n: Some(n1 + n2),
            groups: Some(groups),
        })
    }

    pub fn estimate(&self) -> f64 {
        self.estimate
    }

    pub fn se(&self) -> f64 {
        self.se
    }

    pub fn variance(&self) -> f64 {
        self.se * self.se
    }

    /// z-statistic of the estimate.
    pub fn z(&self) -> f64 {
        self.estimate / self.se
    }

    pub fn n(&self) -> Option<u64> {
        self.n
    }

    pub fn groups(&self) -> Option<&GroupSummaries> {
        self.groups.as_ref()
    }

    /// The same effect with the sign flipped (for orienting a negative
    /// original to the positive convention the success criteria assume).
    pub fn reflected(&self) -> Self {
        Self {
            estimate: -self.estimate,
            ..self.clone()
        }
    }
}

/// Per-group summary statistics of a two-arm study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupSummaries {
    pub mean1: f64,
    pub mean2: f64,
    pub sd1: f64,
    pub sd2: f64,
    pub n1: u64,
    pub n2: u64,
}

impl GroupSummaries {
    fn validate(&self) -> Result<()> {
        if !(self.mean1.is_finite() && self.mean2.is_finite()) {
            return Err(Error::Domain("group means must be finite".into()));
        }
        if !(self.sd1.is_finite() && self.sd1 > 0.0 && self.sd2.is_finite() && self.sd2 > 0.0) {
            return Err(Error::Domain("group SDs must be finite and positive".into()));
        }
        if self.n1 < 2 || self.n2 < 2 {
            return Err(Error::Domain(format!(
                "each group needs at least 2 observations, got {} and {}",
                self.n1, self.n2
            )));
        }
        Ok(())
    }
}

/// Prior on the true underlying effect before seeing the original study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialPrior {
    /// Improper flat prior: the original estimate is taken at face value.
    Flat,
    /// N(mean, variance); `variance` may be zero (a point prior).
    Normal { mean: f64, variance: f64 },
}

impl InitialPrior {
    pub fn normal(mean: f64, variance: f64) -> Result<Self> {
        if !mean.is_finite() {
            return Err(Error::Domain(format!(
                "prior mean must be finite, got {mean}"
            )));
        }
        if !(variance.is_finite() && variance >= 0.0) {
            return Err(Error::Domain(format!(
                "prior variance must be finite and non-negative, got {variance}"
            )));
        }
        Ok(Self::Normal { mean, variance })
    }

    /// Normal prior centred at `mean` with variance chosen by method of
    /// moments from the original study: the excess of the observed squared
    /// deviation over what sampling noise and heterogeneity explain,
    /// truncated at zero.
    pub fn empirical_bayes(original: &EffectEstimate, mean: f64, tau2: f64) -> Result<Self> {
        assert!(
            tau2.is_finite() && tau2 >= 0.0,
            "empirical_bayes: tau2 must be finite and non-negative"
        );
        if !mean.is_finite() {
            return Err(Error::Domain(format!(
                "prior mean must be finite, got {mean}"
            )));
        }
        let dev = original.estimate() - mean;
        let variance = (dev * dev - tau2 - original.variance()).max(0.0);
        Ok(Self::Normal { mean, variance })
    }

    /// Prior formed by updating a flat prior with an external pilot study:
    /// simply N(pilot estimate, pilot variance).
    pub fn from_pilot(pilot: &EffectEstimate) -> Self {
        Self::Normal {
            mean: pilot.estimate(),
            variance: pilot.variance(),
        }
    }
}

/// Ratio of initial-prior variance to the original study's marginal variance.
/// Infinite for the flat prior.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RelativeVariance {
    Finite(f64),
    Infinite,
}

impl RelativeVariance {
    pub fn as_f64(&self) -> f64 {
        match self {
            Self::Finite(g) => *g,
            Self::Infinite => f64::INFINITY,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Self::Infinite)
    }
}

/// Summary of the study and prior a design prior was built from. Carried
/// along so downstream consumers (sample-size search, success regions) can
/// recover the original scale without extra plumbing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Origin {
    pub estimate: f64,
    pub se: f64,
    /// Mean of the initial prior; `None` under the flat prior.
    pub prior_mean: Option<f64>,
}

impl Origin {
    /// The original study as an effect estimate.
    pub fn effect(&self) -> EffectEstimate {
        EffectEstimate::new(self.estimate, self.se)
            .expect("origin always stores a valid estimate")
    }
}

/// Normal design prior on the replication's true site effect: the posterior
/// of the original study's effect given the initial prior, widened by
/// between-study heterogeneity.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignPrior {
    mean: f64,
    variance: f64,
    tau2: f64,
    g: RelativeVariance,
    origin: Origin,
}

impl DesignPrior {
    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }

    pub fn sd(&self) -> f64 {
        self.variance.sqrt()
    }

    /// Heterogeneity variance baked into this prior.
    pub fn tau2(&self) -> f64 {
        self.tau2
    }

    pub fn g(&self) -> RelativeVariance {
        self.g
    }

    pub fn origin(&self) -> &Origin {
        &self.origin
    }

    /// Fraction of the original estimate retained in the prior mean:
    /// 1 under the flat prior, g/(1+g) otherwise.
    pub fn shrinkage(&self) -> f64 {
        match self.g {
            RelativeVariance::Infinite => 1.0,
            RelativeVariance::Finite(g) => g / (1.0 + g),
        }
    }

    /// Variance of the limiting predictive distribution as the replication
    /// standard error goes to zero.
    pub fn limiting_variance(&self) -> f64 {
        self.tau2 + self.variance
    }

    /// Point-mass design prior at the original estimate (the conditional
    /// approach: no uncertainty about the effect, no heterogeneity).
    pub fn conditional(original: &EffectEstimate) -> Self {
        let prior = InitialPrior::Normal {
            mean: original.estimate(),
            variance: 0.0,
        };
        design_prior(original, &prior, 0.0)
    }
}

/// Builds the design prior from the original study, the initial prior on the
/// effect, and the heterogeneity variance `tau2`.
///
/// With a flat initial prior this is N(estimate, se^2 + tau2). A normal
/// initial prior shrinks the mean toward its own mean by g/(1+g), where
/// g is the prior variance over se^2 + tau2, and scales the variance by the
/// same factor.
///
/// Panics if `tau2` is negative or non-finite.
pub fn design_prior(original: &EffectEstimate, initial: &InitialPrior, tau2: f64) -> DesignPrior {
    assert!(
        tau2.is_finite() && tau2 >= 0.0,
        "design_prior: tau2 must be finite and non-negative, got {tau2}"
    );
    let marginal = original.variance() + tau2;
    match *initial {
        InitialPrior::Flat => DesignPrior {
            mean: original.estimate(),
            variance: marginal,
            tau2,
            g: RelativeVariance::Infinite,
            origin: Origin {
                estimate: original.estimate(),
                se: original.se(),
                prior_mean: None,
            },
        },
        InitialPrior::Normal { mean, variance } => {
            let g = variance / marginal;
            let shrink = g / (1.0 + g); // = 1/(1 + 1/g), exact at g = 0
            let dp_mean = shrink * original.estimate() + mean / (1.0 + g);
            DesignPrior {
                mean: dp_mean,
                variance: marginal * shrink,
                tau2,
                g: RelativeVariance::Finite(g),
                origin: Origin {
                    estimate: original.estimate(),
                    se: original.se(),
                    prior_mean: Some(mean),
                },
            }
        }
    }
}

/// Normal distribution of the replication estimate before the data arrive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredictiveDist {
    mean: f64,
    sd: f64,
}

impl PredictiveDist {
    pub(crate) fn from_moments(mean: f64, variance: f64) -> Self {
        assert!(
            variance >= 0.0 && variance.is_finite() && mean.is_finite(),
            "predictive distribution needs finite mean and non-negative variance"
        );
        Self {
            mean,
            sd: variance.sqrt(),
        }
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn sd(&self) -> f64 {
        self.sd
    }

    pub fn variance(&self) -> f64 {
        self.sd * self.sd
    }
}

/// Predictive distribution of a single replication estimate with standard
/// error `sr`: the design prior convolved with heterogeneity and sampling
/// noise, N(prior mean, sr^2 + tau2 + prior variance).
///
/// `sr` may be zero (the limiting predictive). Panics if `sr` is negative or
/// non-finite.
pub fn predictive(dp: &DesignPrior, sr: f64) -> PredictiveDist {
    assert!(
        sr.is_finite() && sr >= 0.0,
        "predictive: sr must be finite and non-negative, got {sr}"
    );
    PredictiveDist::from_moments(dp.mean(), sr * sr + dp.tau2() + dp.variance())
}

/// Heterogeneity scale from an anticipated absolute shift: the tau for which
/// the central `coverage` interval of N(0, tau^2) has total width `d`.
///
/// Panics unless `d >= 0` and `coverage` is in (0, 1).
pub fn tau_absolute(d: f64, coverage: f64) -> f64 {
    assert!(d.is_finite() && d >= 0.0, "tau_absolute: d must be >= 0");
    assert!(
        coverage > 0.0 && coverage < 1.0,
        "tau_absolute: coverage must lie in (0, 1)"
    );
    d / (2.0 * norm_quantile(0.5 * (1.0 + coverage)))
}

/// Heterogeneity variance from a relative measure: the fraction `i2` of
/// total variance attributed to between-study variation, so that
/// tau^2 / (tau^2 + sigma^2) = i2.
///
/// Requires `0 <= i2 < 1` and `sigma2 > 0`.
pub fn tau2_relative(i2: f64, sigma2: f64) -> Result<f64> {
    if !(i2.is_finite() && (0.0..1.0).contains(&i2)) {
        return Err(Error::Domain(format!(
            "relative heterogeneity must lie in [0, 1), got {i2}"
        )));
    }
    if !(sigma2.is_finite() && sigma2 > 0.0) {
        return Err(Error::Domain(format!(
            "variance must be finite and positive, got {sigma2}"
        )));
    }
    if i2 == 0.0 {
        return Ok(0.0);
    }
    Ok(sigma2 / (1.0 / i2 - 1.0))
}

/// How to turn a fractional sample size into a whole number of units.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Rounding {
    #[default]
    Nearest,
    Up,
}

/// Conversion between a per-study sample size and the standard error of its
/// effect estimate, via se = lambda / sqrt(n) for a unit standard deviation
/// `lambda` (2 for a balanced two-group standardized mean difference).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitVariance {
    lambda: f64,
}

impl UnitVariance {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::Domain(format!(
                "unit standard deviation must be finite and positive, got {lambda}"
            )));
        }
        Ok(Self { lambda })
    }

    /// The default two-group convention, lambda = 2.
    pub fn two_group() -> Self {
        Self { lambda: 2.0 }
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Sample size achieving standard error `se`, rounded per `rounding` and
    /// clamped to at least 1.
    ///
    /// Panics unless `se` is finite and positive.
    pub fn n_from_se(&self, se: f64, rounding: Rounding) -> u64 {
        assert!(
            se.is_finite() && se > 0.0,
            "n_from_se: se must be finite and positive, got {se}"
        );
        let raw = (self.lambda / se).powi(2);
        let n = match rounding {
            Rounding::Nearest => raw.round(),
            Rounding::Up => raw.ceil(),
        };
        (n as u64).max(1)
    }

    /// Standard error of the estimate at sample size `n`.
    ///
    /// Panics if `n` is zero.
    pub fn se_from_n(&self, n: u64) -> f64 {
        assert!(n >= 1, "se_from_n: n must be at least 1");
        self.lambda / (n as f64).sqrt()
    }
}
