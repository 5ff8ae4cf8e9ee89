//! Design and sample-size planning for replication studies.
//!
//! Starting from an original study's effect estimate and standard error, the
//! crate builds a design prior on the replication's true effect (optionally
//! shrunk towards an initial prior and widened by between-study
//! heterogeneity), evaluates the probability that a planned replication
//! meets a chosen success criterion, and solves for the sample size that
//! hits a target probability. Five success criteria are covered: one-sided
//! significance at replication (`two-trials`), significance of the pooled
//! evidence (`meta-analysis`), an equivalence test against the original,
//! the replication Bayes factor, and the skeptical p-value. The
//! [`multisite`] module extends the two-trials and Bayes factor criteria to
//! replications spread over several sites and optimizes the site/size
//! trade-off against a cost model.
//!
//! ```
//! use replan::effect::{design_prior, EffectEstimate, InitialPrior, UnitVariance};
//! use replan::ssd::ssd;
//! use replan::success::Method;
//!
//! // Two-group study: d = 0.205 with standard error 0.051. Plan a
//! // replication with 80% probability of one-sided significance at 2.5%,
//! // allowing between-study heterogeneity tau = 0.05.
//! let original = EffectEstimate::new(0.205, 0.051)?;
//! let prior = design_prior(&original, &InitialPrior::Flat, 0.05 * 0.05);
//! let method = Method::TwoTrials { alpha: 0.025 };
//! let result = ssd(&method, &prior, 0.8, &UnitVariance::two_group())?;
//! assert_eq!(result.n_r(), Some(1137));
//! # Ok::<(), replan::Error>(())
//! ```
//!
//! Failures a caller can anticipate and handle (infeasible targets,
//! unusable inputs, non-converging searches) come back as [`Error`];
//! programming errors (NaN inputs, out-of-range probabilities passed to the
//! low-level numeric routines) panic.

pub mod effect;
pub mod error;
pub mod multisite;
pub mod numeric;
pub mod ssd;
pub mod success;

pub use error::{Error, Result};
