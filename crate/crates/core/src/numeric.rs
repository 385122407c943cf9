//! Shared numeric plumbing: complex values as pairs of arbitrary-precision
//! floats, and upward-biased `f64` arithmetic for error bounds.
//!
//! Values are computed in MPFR floats at an explicit working precision; error
//! bounds travel separately as `f64`. Every bound operation inflates its
//! result by slightly more than one `f64` ulp plus the smallest positive
//! `f64`, so a chain of bound computations stays a true upper bound even
//! though the bounds themselves round.

use rug::Float;

/// Relative inflation per bound operation; > 4 ulps of f64, covering the
/// rounding of the operation itself with margin.
const SLACK: f64 = 1e-14;

/// Round a nonnegative bound upward.
pub(crate) fn fup(x: f64) -> f64 {
    debug_assert!(!x.is_nan(), "error bound is NaN");
    debug_assert!(x >= 0.0, "error bound must be nonnegative");
    x * (1.0 + SLACK) + f64::MIN_POSITIVE
}

pub(crate) fn add_up(a: f64, b: f64) -> f64 {
    fup(a + b)
}

pub(crate) fn mul_up(a: f64, b: f64) -> f64 {
    fup(a * b)
}

/// Upper bound on |x| as an `f64`.
pub(crate) fn mag_up(x: &Float) -> f64 {
    fup(x.to_f64().abs())
}

/// One relative unit in the last place at binary precision `prec`: 2^(1-prec).
/// Underflows to 0 for very high precision, which `fup`'s absolute floor
/// absorbs (the floor then exceeds the true sub-subnormal bound).
pub(crate) fn rel_ulp(prec: u32) -> f64 {
    // Clamping keeps the power representable as a normal f64; a clamped
    // (larger) value is still a valid upper bound on the relative error.
    2f64.powi(1 - prec.min(1000) as i32)
}

/// Complex value as a pair of floats at a common precision.
#[derive(Clone, Debug)]
pub struct CFloat {
    pub re: Float,
    pub im: Float,
}

impl CFloat {
    pub fn zero(prec: u32) -> Self {
        CFloat {
            re: Float::with_val(prec, 0),
            im: Float::with_val(prec, 0),
        }
    }

    pub fn new(re: Float, im: Float) -> Self {
        CFloat { re, im }
    }

    /// Componentwise magnitude bound: max(|re|, |im|), rounded up.
    pub fn mag_up(&self) -> f64 {
        fup(self.re.to_f64().abs().max(self.im.to_f64().abs()))
    }

    pub fn add_assign(&mut self, other: &CFloat) {
        self.re += &other.re;
        self.im += &other.im;
    }

    /// Multiply by a real scalar in place.
    pub fn scale_assign(&mut self, x: &Float) {
        self.re *= x;
        self.im *= x;
    }

    /// Full complex product.
    pub fn mul(&self, other: &CFloat) -> CFloat {
        let prec = self.re.prec().max(other.re.prec());
        let re = Float::with_val(prec, &self.re * &other.re)
            - Float::with_val(prec, &self.im * &other.im);
        let im = Float::with_val(prec, &self.re * &other.im)
            + Float::with_val(prec, &self.im * &other.re);
        CFloat { re, im }
    }

    pub fn conj(&self) -> CFloat {
        CFloat {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }
}
