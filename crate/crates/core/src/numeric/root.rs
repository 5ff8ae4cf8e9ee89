//! Scalar root finding with Brent's method.

use crate::error::{Error, Result};

/// Default absolute tolerance on the root location.
pub const DEFAULT_ROOT_TOL: f64 = 1e-9;

const MAX_ITER: usize = 200;

/// A bracket `[lo, hi]` whose endpoint values straddle zero (or hit it).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootBracket {
    pub lo: f64,
    pub hi: f64,
    pub f_lo: f64,
    pub f_hi: f64,
}

impl RootBracket {
    /// Builds a bracket from endpoints and their function values.
    ///
    /// Fails unless `lo < hi`, both values are finite, and the values have
    /// opposite signs (an exact zero at either end also counts).
    pub fn new(lo: f64, hi: f64, f_lo: f64, f_hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || lo >= hi {
            return Err(Error::Domain(format!(
                "bracket endpoints must be finite with lo < hi, got [{lo}, {hi}]"
            )));
        }
        if f_lo.is_nan() || f_hi.is_nan() {
            return Err(Error::Domain(format!(
                "bracket values must not be NaN: f(lo) = {f_lo}, f(hi) = {f_hi}"
            )));
        }
        if f_lo * f_hi > 0.0 {
            return Err(Error::NoSignChange {
                lo,
                hi,
                f_lo,
                f_hi,
            });
        }
        Ok(Self { lo, hi, f_lo, f_hi })
    }

    /// Evaluates `f` at both endpoints and builds the bracket.
    pub fn evaluate(mut f: impl FnMut(f64) -> f64, lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || lo >= hi {
            return Err(Error::Domain(format!(
                "bracket endpoints must be finite with lo < hi, got [{lo}, {hi}]"
            )));
        }
        let f_lo = f(lo);
        let f_hi = f(hi);
        Self::new(lo, hi, f_lo, f_hi)
    }
}

/// Finds a root of `f` inside `bracket` to absolute tolerance `tol`.
///
/// Classic Brent iteration: bisection interleaved with secant and inverse
/// quadratic steps, which keeps the bisection convergence guarantee while
/// usually converging superlinearly. Deterministic for given inputs.
pub fn find_root(mut f: impl FnMut(f64) -> f64, bracket: RootBracket, tol: f64) -> Result<f64> {
    assert!(tol > 0.0 && tol.is_finite(), "find_root: tol must be positive");
    let RootBracket {
        lo: mut a,
        hi: mut b,
        f_lo: mut fa,
        f_hi: mut fb,
    } = bracket;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }

    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;

    for _ in 0..MAX_ITER {
        if fb * fc > 0.0 {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            // Attempt inverse quadratic interpolation / secant.
            let s = fb / fa;
            let (mut p, mut q) = if a == c {
                (2.0 * xm * s, 1.0 - s)
            } else {
                let q = fa / fc;
                let r = fb / fc;
                (
                    s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0)),
                    (q - 1.0) * (r - 1.0) * (s - 1.0),
                )
            };
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        if d.abs() > tol1 {
            b += d;
        } else {
            b += tol1.copysign(xm);
        }
        fb = f(b);
        if fb.is_nan() {
            return Err(Error::Domain(format!("function returned NaN at {b}")));
        }
    }
    Err(Error::NonConvergence {
        routine: "find_root",
        budget: MAX_ITER,
        unit: "iterations",
    })
}
