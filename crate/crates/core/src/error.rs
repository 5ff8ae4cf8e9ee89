use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Failures that depend on the data or the request, as opposed to programmer
/// errors (those panic). Everything here is something a caller can hit with
/// legitimate inputs and may want to handle.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument fell outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A root-finding bracket whose endpoints do not straddle a zero.
    #[error("no sign change on bracket [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    NoSignChange { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    /// An iterative routine exhausted its budget before reaching tolerance.
    #[error("{routine} failed to converge within {budget} {unit}")]
    NonConvergence {
        routine: &'static str,
        budget: usize,
        unit: &'static str,
    },

    /// The original study is too weak for the requested analysis to ever
    /// declare success, no matter how large the replication.
    #[error("original study not convincing enough: {0}")]
    InfeasibleOriginal(String),

    /// A structurally valid request that this engine deliberately rejects.
    #[error("unsupported: {0}")]
    Unsupported(String),
}
