//! Exact arithmetic around the modular group: weight/level bookkeeping,
//! Kronecker symbols, the fourth root of unity `eps_d`, Kloosterman sums in
//! both integrality classes, level-one cusp-form dimensions, and Euler's
//! totient.
//!
//! Conventions:
//! - weights live in (1/2)Z and are stored as `2k` so all weight arithmetic
//!   stays in integers;
//! - `e(x)` means exp(2 pi i x);
//! - for odd `2k` the sum carries the theta multiplier `(c/v) eps_v^{2k}` and
//!   is defined only when 4 | c (all moduli in the Poincare c-sums satisfy
//!   N | c with 4 | N in that case);
//! - `(c/v)` is the Kronecker extension of the Jacobi symbol, the standard
//!   convention for the half-integral automorphy factor.

use crate::error::{Error, Result};
use crate::numeric::{add_up, fup, mul_up, rel_ulp};
use rug::{Float, Integer};

/// Weight and level of a Poincare family: k in (1/2)Z with k >= 2, stored as
/// `2k`; positive level N, with 4 | N whenever k is genuinely half-integral.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct WeightProfile {
    two_k: i64,
    level: u64,
}

impl WeightProfile {
    pub fn new(two_k: i64, level: u64) -> Result<Self> {
        if two_k < 4 {
            return Err(Error::InvalidWeight(format!(
                "k must be at least 2, got 2k = {two_k}"
            )));
        }
        if level == 0 {
            return Err(Error::InvalidWeight("level must be positive".into()));
        }
        if two_k % 2 != 0 && level % 4 != 0 {
            return Err(Error::InvalidWeight(format!(
                "half-integral weight {two_k}/2 requires 4 | N, got N = {level}"
            )));
        }
        Ok(WeightProfile { two_k, level })
    }

    /// Profile from an exact rational weight; the denominator must divide 2.
    pub fn from_rational(k: &rug::Rational, level: u64) -> Result<Self> {
        let two_k = rug::Rational::from(k * rug::Rational::from(2));
        if !two_k.is_integer() {
            return Err(Error::InvalidWeight(format!(
                "weight must lie in (1/2)Z, got {k}"
            )));
        }
        let two_k = two_k.numer().to_i64().ok_or_else(|| {
            Error::InvalidWeight(format!("weight {k} out of range"))
        })?;
        WeightProfile::new(two_k, level)
    }

    pub fn two_k(&self) -> i64 {
        self.two_k
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn k(&self) -> rug::Rational {
        rug::Rational::from((self.two_k, 2))
    }

    pub fn k_f64(&self) -> f64 {
        self.two_k as f64 / 2.0
    }

    pub fn is_half_integral(&self) -> bool {
        self.two_k % 2 != 0
    }

    /// K_k(m, n; c) at this profile's weight.
    pub fn kloosterman(&self, m: i64, n: i64, c: u64, prec: u32) -> Result<KloostermanValue> {
        kloosterman(self.two_k, m, n, c, prec)
    }

    /// K_{2-k}(m, n; c), the dual-weight sum appearing in the Maass-side
    /// coefficient formulas. Same parity as K_k, so for integral k the two
    /// agree; for half-integral k the multiplier power differs mod 4.
    pub fn kloosterman_dual(&self, m: i64, n: i64, c: u64, prec: u32) -> Result<KloostermanValue> {
        kloosterman(4 - self.two_k, m, n, c, prec)
    }
}

/// Fourth root of unity i^e, e in {0,1,2,3}; exact arithmetic on the 4-torsion
/// of the unit circle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FourthRoot(u8);

impl FourthRoot {
    pub const ONE: FourthRoot = FourthRoot(0);
    pub const I: FourthRoot = FourthRoot(1);

    pub fn from_exponent(e: i64) -> Self {
        FourthRoot(e.rem_euclid(4) as u8)
    }

    /// Exponent e with self = i^e.
    pub fn exponent(&self) -> u8 {
        self.0
    }

    pub fn pow(&self, e: i64) -> Self {
        FourthRoot::from_exponent(self.0 as i64 * e)
    }

    pub fn mul(&self, other: FourthRoot) -> Self {
        FourthRoot::from_exponent(self.0 as i64 + other.0 as i64)
    }

    /// (re, im) with entries in {-1, 0, 1}.
    pub fn to_pair(&self) -> (i32, i32) {
        match self.0 {
            0 => (1, 0),
            1 => (0, 1),
            2 => (-1, 0),
            _ => (0, -1),
        }
    }
}

/// eps_d: 1 when d = 1 (mod 4), i when d = 3 (mod 4); defined for odd d only.
pub fn epsilon(d: i64) -> Result<FourthRoot> {
    if d % 2 == 0 {
        return Err(Error::InvalidArgument(format!(
            "epsilon(d) needs odd d, got {d}"
        )));
    }
    Ok(if d.rem_euclid(4) == 1 {
        FourthRoot::ONE
    } else {
        FourthRoot::I
    })
}

/// Kronecker symbol (a/b), the completely multiplicative extension of the
/// Jacobi symbol to all integer pairs.
pub fn kronecker_symbol(a: i64, b: i64) -> i32 {
    Integer::from(a).kronecker(&Integer::from(b))
}

/// Modular inverse of `a` mod `m` by extended Euclid; None when gcd(a,m) > 1.
pub fn mod_inv(a: u64, m: u64) -> Option<u64> {
    if m == 0 {
        return None;
    }
    let (mut t, mut new_t): (i128, i128) = (0, 1);
    let (mut r, mut new_r): (i128, i128) = (m as i128, (a % m.max(1)) as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    if r != 1 {
        None
    } else {
        Some(t.rem_euclid(m as i128) as u64)
    }
}

/// Euler's totient by trial division.
pub fn euler_phi(n: u64) -> u64 {
    assert!(n > 0, "euler_phi needs a positive argument");
    let mut n = n;
    let mut phi = n;
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            phi -= phi / p;
        }
        p += 1;
    }
    if n > 1 {
        phi -= phi / n;
    }
    phi
}

/// Kloosterman sum value: high-precision complex with a rigorous bound on the
/// accumulated rounding error. The residue arithmetic is exact; only the
/// complex exponentials round.
#[derive(Clone, Debug)]
pub struct KloostermanValue {
    pub re: Float,
    pub im: Float,
    /// Upper bound on the rounding error of each component.
    pub rounding_bound: f64,
    /// Modulus c of the sum.
    pub modulus: u64,
    /// Number of summands, phi(c).
    pub terms: u64,
}

impl KloostermanValue {
    /// Componentwise magnitude upper bound including the rounding slack.
    pub fn mag_up(&self) -> f64 {
        add_up(
            fup(self.re.to_f64().abs().max(self.im.to_f64().abs())),
            self.rounding_bound,
        )
    }
}

/// K_k(m, n; c) for 2k even: sum over v in (Z/cZ)^* of e((m vbar + n v)/c);
/// for 2k odd (requires 4 | c): sum of (c/v) eps_v^{2k} e((m vbar + n v)/c),
/// where v vbar = 1 (mod c).
///
/// Only the parity and the residue of `two_k` mod 4 enter the value, so the
/// dual weight 2-k (negative `two_k`) is accepted directly. For even `two_k`
/// the value does not depend on `two_k` at all.
pub fn kloosterman(two_k: i64, m: i64, n: i64, c: u64, prec: u32) -> Result<KloostermanValue> {
    if c == 0 {
        return Err(Error::InvalidArgument("Kloosterman modulus must be positive".into()));
    }
    let half_integral = two_k.rem_euclid(2) == 1;
    if half_integral && c % 4 != 0 {
        return Err(Error::InvalidArgument(format!(
            "half-integral Kloosterman sum needs 4 | c, got c = {c}"
        )));
    }
    let wp = prec.max(64);
    if c == 1 {
        // Single class v = 0 with vbar = 0: the summand is e(0) = 1.
        return Ok(KloostermanValue {
            re: Float::with_val(wp, 1),
            im: Float::with_val(wp, 0),
            rounding_bound: 0.0,
            modulus: 1,
            terms: 1,
        });
    }

    let mr = m.rem_euclid(c as i64) as u64;
    let nr = n.rem_euclid(c as i64) as u64;
    let two_pi = {
        let mut t = Float::with_val(wp, rug::float::Constant::Pi);
        t *= 2;
        t
    };

    let mut sum_re = Float::with_val(wp, 0);
    let mut sum_im = Float::with_val(wp, 0);
    let mut terms = 0u64;
    for v in 1..c {
        let Some(vbar) = mod_inv(v, c) else { continue };
        terms += 1;
        let phase = ((mr as u128 * vbar as u128 + nr as u128 * v as u128) % c as u128) as u64;
        let mut angle = Float::with_val(wp, phase);
        angle /= c;
        angle *= &two_pi;
        let (sin, cos) = angle.sin_cos(Float::new(wp));
        let (mut re, mut im) = (cos, sin);
        if half_integral {
            // v is odd: gcd(v, c) = 1 and 4 | c.
            let quarter = if v % 4 == 1 {
                FourthRoot::ONE
            } else {
                FourthRoot::I.pow(two_k)
            };
            match quarter.exponent() {
                0 => {}
                1 => (re, im) = (-im, re),
                2 => (re, im) = (-re, -im),
                _ => (re, im) = (im, -re),
            }
            let kron = kronecker_symbol(c as i64, v as i64);
            debug_assert!(kron != 0, "(c/v) cannot vanish for gcd(v,c) = 1");
            if kron < 0 {
                re = -re;
                im = -im;
            }
        }
        sum_re += re;
        sum_im += im;
    }

    // Each summand's components err by at most ~10 ulp (angle: 3 rounded ops
    // on a value <= 2 pi; sin/cos: correctly rounded, unit derivative), and
    // sequential summation of T unit-magnitude terms adds at most
    // u * T^2 / 2 with u = 2^(1-wp).
    let u = rel_ulp(wp);
    let t = terms as f64;
    let rounding_bound = add_up(mul_up(10.0 * t, u), mul_up(0.5 * t * t, u));

    Ok(KloostermanValue {
        re: sum_re,
        im: sum_im,
        rounding_bound,
        modulus: c,
        terms,
    })
}

/// dim S_k(1) for even k >= 4: floor(k/12) - 1 when k = 2 (mod 12), else
/// floor(k/12). Cross-checked in tests against the count of monomials
/// Delta^a E_4^b E_6^c of weight k with a >= 1.
/// Parse an exact rational from decimal text: either `p` or `p/q`, each with
/// an optional leading sign.  Non-canonical inputs like `4/6` are reduced.
pub fn parse_rational(text: &str) -> Result<rug::Rational> {
    let t = text.trim();
    let (num, den) = match t.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (t, "1"),
    };
    let parse_int = |s: &str| -> Result<Integer> {
        Integer::parse(s)
            .map(Integer::from)
            .map_err(|_| Error::Parse(format!("invalid integer `{s}` in rational `{text}`")))
    };
    let n = parse_int(num)?;
    let d = parse_int(den)?;
    if d == 0 {
        return Err(Error::Parse(format!("zero denominator in `{text}`")));
    }
    Ok(rug::Rational::from((n, d)))
}

pub fn dim_cusp_forms_level1(k: i64) -> Result<u64> {
    if k < 4 || k % 2 != 0 {
        return Err(Error::InvalidWeight(format!(
            "dimension formula needs even k >= 4, got {k}"
        )));
    }
    Ok(if k % 12 == 2 {
        (k / 12 - 1) as u64
    } else {
        (k / 12) as u64
    })
}
