/// A closed interval on the extended real line.
///
/// Endpoints may be infinite; `lower <= upper` always holds and neither
/// endpoint is NaN. A zero-width interval (a single point) is allowed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    lower: f64,
    upper: f64,
}

impl Interval {
    /// Panics if an endpoint is NaN or `lower > upper`.
    pub fn new(lower: f64, upper: f64) -> Self {
        assert!(!lower.is_nan() && !upper.is_nan(), "Interval: NaN endpoint");
        assert!(
            lower <= upper,
            "Interval: lower {lower} exceeds upper {upper}"
        );
        Self { lower, upper }
    }

    /// The whole real line.
    pub fn all_reals() -> Self {
        Self::new(f64::NEG_INFINITY, f64::INFINITY)
    }

    /// `[lower, +inf)`.
    pub fn at_least(lower: f64) -> Self {
        Self::new(lower, f64::INFINITY)
    }

    /// `(-inf, upper]`.
    pub fn at_most(upper: f64) -> Self {
        Self::new(f64::NEG_INFINITY, upper)
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    /// Closed-interval membership.
    pub fn contains(&self, x: f64) -> bool {
        x >= self.lower && x <= self.upper
    }

    pub fn is_all_reals(&self) -> bool {
        self.lower == f64::NEG_INFINITY && self.upper == f64::INFINITY
    }
}
