//! Deterministic numeric kernels: normal distribution functions, root
//! finding, quadrature, intervals, and seeded sampling.
//!
//! Precondition violations here (NaN arguments, probabilities outside (0,1),
//! reversed interval endpoints) are programmer errors and panic; failures
//! that depend on the data, like a bracket without a sign change, return
//! [`crate::Error`].

pub mod interval;
pub mod normal;
pub mod quad;
pub(crate) mod rng;
pub mod root;

pub use interval::Interval;
pub use normal::{erfc, norm_cdf, norm_pdf, norm_quantile};
pub use quad::{integrate, DEFAULT_QUAD_TOL};
pub use rng::mc_sample;
pub use root::{find_root, RootBracket, DEFAULT_ROOT_TOL};
