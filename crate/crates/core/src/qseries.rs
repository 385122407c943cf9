//! Truncated Laurent series in q over exact arbitrary-precision rationals,
//! plus the level-one generators built from them: Eisenstein series E_s, the
//! discriminant Delta, the j-invariant, echelonized cusp-form bases, and
//! weakly holomorphic forms (E_s/Delta^r) F(j).
//!
//! Truncation semantics:
//! - a series carries exact coefficients on the window
//!   [lowest_exponent, trunc_order]; coefficients of q^n for
//!   n > trunc_order are unknown, never assumed zero;
//! - multiplication keeps the tightest window both factors justify,
//!   trunc = min(a.trunc + b.lowest, b.trunc + a.lowest);
//! - inversion preserves the window length of its input;
//! - no operation fabricates zeros beyond a window, so coefficient checks
//!   against truncated data cannot produce false positives.
//!
//! The zero series is stored with an empty window: no coefficients and
//! lowest_exponent = trunc_order + 1.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::exactarith::{dim_cusp_forms_level1, parse_rational};
use rug::ops::Pow;
use rug::{Integer, Rational};

/// Laurent series Σ c_n q^n known exactly for lowest_exponent <= n <=
/// trunc_order.  Immutable after construction; all operations are pure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QSeries {
    lowest: i64,
    trunc: i64,
    coeffs: Vec<Rational>,
}

impl QSeries {
    /// Series with the given coefficients starting at q^lowest; the window
    /// ends at lowest + coeffs.len() - 1.  Leading zeros are trimmed.
    pub fn new(lowest: i64, coeffs: Vec<Rational>) -> QSeries {
        let trunc = lowest + coeffs.len() as i64 - 1;
        QSeries::from_window(lowest, trunc, coeffs)
    }

    fn from_window(lowest: i64, trunc: i64, coeffs: Vec<Rational>) -> QSeries {
        debug_assert!(
            coeffs.is_empty() || trunc - lowest + 1 == coeffs.len() as i64,
            "window [{lowest}, {trunc}] inconsistent with {} coefficients",
            coeffs.len()
        );
        let mut s = QSeries {
            lowest,
            trunc,
            coeffs,
        };
        s.normalize();
        s
    }

    fn normalize(&mut self) {
        match self.coeffs.iter().position(|c| c.cmp0() != Ordering::Equal) {
            Some(0) => {}
            Some(i) => {
                self.coeffs.drain(0..i);
                self.lowest += i as i64;
            }
            None => {
                self.coeffs.clear();
                self.lowest = self.trunc + 1;
            }
        }
    }

    /// The zero series with window ending at `trunc`.
    pub fn zero(trunc: i64) -> QSeries {
        QSeries {
            lowest: trunc + 1,
            trunc,
            coeffs: Vec::new(),
        }
    }

    /// Constant series `value` known through q^trunc.  A constant with
    /// trunc < 0 cannot hold its q^0 term and degenerates to zero(trunc).
    pub fn constant(value: Rational, trunc: i64) -> QSeries {
        if trunc < 0 {
            return QSeries::zero(trunc);
        }
        let mut coeffs = vec![Rational::new(); trunc as usize + 1];
        coeffs[0] = value;
        QSeries::from_window(0, trunc, coeffs)
    }

    /// The constant series 1 known through q^trunc.
    pub fn one(trunc: i64) -> QSeries {
        QSeries::constant(Rational::from(1), trunc)
    }

    pub fn lowest_exponent(&self) -> i64 {
        self.lowest
    }

    pub fn trunc_order(&self) -> i64 {
        self.trunc
    }

    /// True when every known coefficient is zero.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Exponent and value of the first nonzero coefficient, if any.
    pub fn leading(&self) -> Option<(i64, &Rational)> {
        self.coeffs.first().map(|c| (self.lowest, c))
    }

    /// Coefficient of q^n.  Panics when n lies above the truncation order,
    /// where the coefficient is unknown rather than zero.
    pub fn coeff(&self, n: i64) -> Rational {
        assert!(
            n <= self.trunc,
            "coefficient of q^{n} lies beyond the truncation order {}",
            self.trunc
        );
        if n < self.lowest {
            Rational::new()
        } else {
            self.coeffs[(n - self.lowest) as usize].clone()
        }
    }

    /// Coefficient of q^n, or None when n lies above the truncation order.
    pub fn try_coeff(&self, n: i64) -> Option<Rational> {
        if n > self.trunc {
            None
        } else {
            Some(self.coeff(n))
        }
    }

    pub fn add(&self, other: &QSeries) -> QSeries {
        let trunc = self.trunc.min(other.trunc);
        let lowest = self.lowest.min(other.lowest).min(trunc + 1);
        if lowest > trunc {
            return QSeries::zero(trunc);
        }
        let mut coeffs = vec![Rational::new(); (trunc - lowest + 1) as usize];
        for (series, _) in [(self, 0), (other, 1)] {
            for (i, c) in series.coeffs.iter().enumerate() {
                let e = series.lowest + i as i64;
                if e > trunc {
                    break;
                }
                coeffs[(e - lowest) as usize] += c;
            }
        }
        QSeries::from_window(lowest, trunc, coeffs)
    }

    pub fn neg(&self) -> QSeries {
        QSeries {
            lowest: self.lowest,
            trunc: self.trunc,
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
        }
    }

    pub fn sub(&self, other: &QSeries) -> QSeries {
        self.add(&other.neg())
    }

    /// Add `value` to the coefficient of q^0 (window permitting).
    pub fn add_scalar(&self, value: &Rational) -> QSeries {
        if self.trunc < 0 || value.cmp0() == Ordering::Equal {
            // q^0 lies beyond the window: the sum is unknown there too.
            return self.clone();
        }
        let lowest = self.lowest.min(0);
        let mut coeffs = vec![Rational::new(); (self.trunc - lowest + 1) as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[(self.lowest - lowest) as usize + i] = c.clone();
        }
        coeffs[(-lowest) as usize] += value;
        QSeries::from_window(lowest, self.trunc, coeffs)
    }

    pub fn mul(&self, other: &QSeries) -> QSeries {
        let trunc = (self.trunc + other.lowest).min(other.trunc + self.lowest);
        let lowest = self.lowest + other.lowest;
        if self.coeffs.is_empty() || other.coeffs.is_empty() || lowest > trunc {
            return QSeries::zero(trunc);
        }
        let mut coeffs = vec![Rational::new(); (trunc - lowest + 1) as usize];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.cmp0() == Ordering::Equal {
                continue;
            }
            let ea = self.lowest + i as i64;
            for (j, b) in other.coeffs.iter().enumerate() {
                let eb = other.lowest + j as i64;
                if ea + eb > trunc {
                    break;
                }
                if b.cmp0() == Ordering::Equal {
                    continue;
                }
                coeffs[(ea + eb - lowest) as usize] += Rational::from(a * b);
            }
        }
        QSeries::from_window(lowest, trunc, coeffs)
    }

    pub fn mul_scalar(&self, value: &Rational) -> QSeries {
        if value.cmp0() == Ordering::Equal {
            return QSeries::zero(self.trunc);
        }
        QSeries {
            lowest: self.lowest,
            trunc: self.trunc,
            coeffs: self
                .coeffs
                .iter()
                .map(|c| Rational::from(c * value))
                .collect(),
        }
    }

    /// Multiply by q^e.
    pub fn shift(&self, e: i64) -> QSeries {
        QSeries {
            lowest: self.lowest + e,
            trunc: self.trunc + e,
            coeffs: self.coeffs.clone(),
        }
    }

    /// Multiplicative inverse.  Requires a nonzero leading coefficient; the
    /// result keeps the window length of the input (trunc - 2 lowest).
    pub fn inv(&self) -> Result<QSeries> {
        if self.coeffs.is_empty() {
            return Err(Error::ZeroLeadingCoefficient);
        }
        let c0 = &self.coeffs[0];
        let w = self.coeffs.len();
        let mut h = vec![Rational::new(); w];
        h[0] = self.coeffs[0].clone().recip();
        for n in 1..w {
            let mut acc = Rational::new();
            for i in 1..=n {
                if self.coeffs[i].cmp0() != Ordering::Equal
                    && h[n - i].cmp0() != Ordering::Equal
                {
                    acc += Rational::from(&self.coeffs[i] * &h[n - i]);
                }
            }
            h[n] = -(acc / c0);
        }
        Ok(QSeries::from_window(
            -self.lowest,
            self.trunc - 2 * self.lowest,
            h,
        ))
    }

    /// Integer power; negative exponents invert first.  pow(f, 0) is the
    /// constant 1 with the window length of f.
    pub fn pow(&self, e: i64) -> Result<QSeries> {
        if e == 0 {
            return Ok(QSeries::one(self.trunc - self.lowest));
        }
        if e < 0 {
            if e == i64::MIN {
                return Err(Error::InvalidArgument("exponent out of range".into()));
            }
            return self.inv()?.pow(-e);
        }
        let mut result: Option<QSeries> = None;
        let mut base = self.clone();
        let mut exp = e as u64;
        loop {
            if exp & 1 == 1 {
                result = Some(match result {
                    None => base.clone(),
                    Some(r) => r.mul(&base),
                });
            }
            exp >>= 1;
            if exp == 0 {
                break;
            }
            base = base.mul(&base);
        }
        Ok(result.expect("e >= 1 sets at least one bit"))
    }

    /// Shrink the window to end at `new_trunc`.  Never extends a window:
    /// a larger `new_trunc` would fabricate unknown coefficients.
    pub fn truncate_to(&self, new_trunc: i64) -> QSeries {
        if new_trunc >= self.trunc {
            return self.clone();
        }
        let keep = (new_trunc - self.lowest + 1).max(0) as usize;
        QSeries::from_window(
            if keep == 0 { new_trunc + 1 } else { self.lowest },
            new_trunc,
            self.coeffs[..keep].to_vec(),
        )
    }

    /// JSON encoding {lowest_exponent, trunc_order, coeffs: ["p/q", ...]}.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "lowest_exponent": self.lowest,
            "trunc_order": self.trunc,
            "coeffs": self.coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<QSeries> {
        let field_i64 = |name: &str| -> Result<i64> {
            v.get(name)
                .and_then(|x| x.as_i64())
                .ok_or_else(|| Error::Parse(format!("missing integer field `{name}`")))
        };
        let lowest = field_i64("lowest_exponent")?;
        let trunc = field_i64("trunc_order")?;
        let raw = v
            .get("coeffs")
            .and_then(|x| x.as_array())
            .ok_or_else(|| Error::Parse("missing array field `coeffs`".into()))?;
        let mut coeffs = Vec::with_capacity(raw.len());
        for item in raw {
            let s = item
                .as_str()
                .ok_or_else(|| Error::Parse("coefficients must be \"p/q\" strings".into()))?;
            coeffs.push(parse_rational(s)?);
        }
        if !coeffs.is_empty() && trunc - lowest + 1 != coeffs.len() as i64 {
            return Err(Error::Parse(format!(
                "window [{lowest}, {trunc}] inconsistent with {} coefficients",
                coeffs.len()
            )));
        }
        Ok(QSeries::from_window(lowest, trunc, coeffs))
    }
}

fn fmt_term(f: &mut fmt::Formatter<'_>, first: bool, c: &Rational, e: i64) -> fmt::Result {
    let neg = c.cmp0() == Ordering::Less;
    let mag = c.clone().abs();
    if first {
        if neg {
            write!(f, "-")?;
        }
    } else if neg {
        write!(f, " - ")?;
    } else {
        write!(f, " + ")?;
    }
    if e == 0 {
        return write!(f, "{mag}");
    }
    if mag != 1 {
        write!(f, "{mag}*")?;
    }
    if e == 1 {
        write!(f, "q")
    } else {
        write!(f, "q^{e}")
    }
}

impl fmt::Display for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.cmp0() == Ordering::Equal {
                continue;
            }
            fmt_term(f, first, c, self.lowest + i as i64)?;
            first = false;
        }
        if !first {
            write!(f, " + ")?;
        }
        write!(f, "O(q^{})", self.trunc + 1)
    }
}

/// Polynomial in q^{-1} with exact rational coefficients: the terms
/// Σ β_m q^{-m} a weakly holomorphic form is required to start with.
/// Keys are the pole orders m >= 1; values are nonzero.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PrincipalPart {
    terms: BTreeMap<u64, Rational>,
}

impl PrincipalPart {
    pub fn new() -> PrincipalPart {
        PrincipalPart::default()
    }

    /// Set the coefficient of q^{-m}; a zero value removes the term.
    pub fn set(&mut self, m: u64, beta: Rational) {
        assert!(m >= 1, "pole orders are positive, got m = {m}");
        if beta.cmp0() == Ordering::Equal {
            self.terms.remove(&m);
        } else {
            self.terms.insert(m, beta);
        }
    }

    /// Coefficient of q^{-m} (zero when absent).
    pub fn coefficient(&self, m: u64) -> Rational {
        assert!(m >= 1, "pole orders are positive, got m = {m}");
        self.terms.get(&m).cloned().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&u64, &Rational)> {
        self.terms.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    /// Largest pole order present, or 0 for the empty principal part.
    pub fn max_pole_order(&self) -> u64 {
        self.terms.keys().next_back().copied().unwrap_or(0)
    }

    /// Extract the strictly negative powers of a series.  Requires the
    /// window to cover all of them (trunc_order >= -1).
    pub fn from_series(f: &QSeries) -> Result<PrincipalPart> {
        if f.trunc_order() < -1 {
            return Err(Error::InvalidArgument(format!(
                "series truncated at q^{} leaves negative powers unknown",
                f.trunc_order()
            )));
        }
        let mut pp = PrincipalPart::new();
        let mut n = f.lowest_exponent();
        while n < 0 {
            let c = f.coeff(n);
            if c.cmp0() != Ordering::Equal {
                pp.set((-n) as u64, c);
            }
            n += 1;
        }
        Ok(pp)
    }

    /// Realize Σ β_m q^{-m} as a series with window ending at `trunc`.
    pub fn to_series(&self, trunc: i64) -> QSeries {
        match self.terms.keys().next_back() {
            None => QSeries::zero(trunc),
            Some(&max_m) => {
                let lowest = -(max_m as i64);
                if trunc < lowest {
                    return QSeries::zero(trunc);
                }
                let mut coeffs = vec![Rational::new(); (trunc - lowest + 1) as usize];
                for (&m, beta) in &self.terms {
                    coeffs[(max_m - m) as usize] = beta.clone();
                }
                QSeries::from_window(lowest, trunc, coeffs)
            }
        }
    }

    /// JSON encoding: an object {"m": "p/q", ...} keyed by pole order.
    pub fn to_json(&self) -> serde_json::Value {
        let mut map = serde_json::Map::new();
        for (m, beta) in &self.terms {
            map.insert(m.to_string(), serde_json::Value::String(beta.to_string()));
        }
        serde_json::Value::Object(map)
    }

    pub fn from_json(v: &serde_json::Value) -> Result<PrincipalPart> {
        let obj = v
            .as_object()
            .ok_or_else(|| Error::Parse("principal part must be a JSON object".into()))?;
        let mut pp = PrincipalPart::new();
        for (key, val) in obj {
            let m: u64 = key
                .parse()
                .map_err(|_| Error::Parse(format!("pole order `{key}` is not a positive integer")))?;
            if m == 0 {
                return Err(Error::Parse("pole orders must be >= 1".into()));
            }
            let s = val
                .as_str()
                .ok_or_else(|| Error::Parse("coefficients must be \"p/q\" strings".into()))?;
            pp.set(m, parse_rational(s)?);
        }
        Ok(pp)
    }
}

impl fmt::Display for PrincipalPart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&m, beta) in self.terms.iter().rev() {
            fmt_term(f, first, beta, -(m as i64))?;
            first = false;
        }
        Ok(())
    }
}

/// Exact Bernoulli number B_n with the convention B_1 = -1/2, via the
/// recurrence Σ_{j=0}^{n} C(n+1, j) B_j = 0.
pub fn bernoulli(n: u32) -> Rational {
    let mut b: Vec<Rational> = Vec::with_capacity(n as usize + 1);
    b.push(Rational::from(1));
    for m in 1..=n {
        let mut acc = Rational::new();
        for (j, bj) in b.iter().enumerate() {
            let c = Integer::from(Integer::binomial_u(m + 1, j as u32));
            acc += Rational::from(bj * &c);
        }
        b.push(-(acc / Rational::from(m + 1)));
    }
    b[n as usize].clone()
}

/// Divisor power sum σ_e(n) = Σ_{d | n} d^e for n >= 1.
pub fn sigma(e: u32, n: u64) -> Integer {
    assert!(n >= 1, "divisor sum needs n >= 1, got {n}");
    let mut acc = Integer::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            acc += Integer::from(d).pow(e);
            let q = n / d;
            if q != d {
                acc += Integer::from(q).pow(e);
            }
        }
        d += 1;
    }
    acc
}

const ADMISSIBLE_EISENSTEIN: [u32; 6] = [0, 4, 6, 8, 10, 14];

/// Normalized Eisenstein series E_s = 1 - (2s/B_s) Σ σ_{s-1}(n) q^n for
/// s in {4, 6, 8, 10, 14}, together with the convention E_0 = 1.
pub fn eisenstein(s: u32, order: i64) -> Result<QSeries> {
    if !ADMISSIBLE_EISENSTEIN.contains(&s) {
        return Err(Error::InvalidArgument(format!(
            "E_s is available for s in {{0, 4, 6, 8, 10, 14}}, got s = {s}"
        )));
    }
    if order < 0 {
        return Err(Error::InvalidArgument(format!(
            "Eisenstein expansion needs order >= 0, got {order}"
        )));
    }
    if s == 0 {
        return Ok(QSeries::one(order));
    }
    let factor = Rational::from(-2 * s as i64) / bernoulli(s);
    let mut coeffs = Vec::with_capacity(order as usize + 1);
    coeffs.push(Rational::from(1));
    for n in 1..=order {
        coeffs.push(Rational::from(&factor * &sigma(s - 1, n as u64)));
    }
    Ok(QSeries::new(0, coeffs))
}

/// Π_{n>=1} (1 - q^n) expanded by the pentagonal number theorem
/// Σ_{j in Z} (-1)^j q^{j(3j-1)/2}.
fn euler_product(order: i64) -> QSeries {
    let mut coeffs = vec![Rational::new(); (order.max(-1) + 1) as usize];
    if order >= 0 {
        coeffs[0] = Rational::from(1);
    }
    let mut j = 1i64;
    loop {
        let g1 = j * (3 * j - 1) / 2;
        let g2 = j * (3 * j + 1) / 2;
        if g1 > order {
            break;
        }
        let sign = if j % 2 == 0 { 1i64 } else { -1 };
        coeffs[g1 as usize] += sign;
        if g2 <= order {
            coeffs[g2 as usize] += sign;
        }
        j += 1;
    }
    QSeries::new(0, coeffs)
}

/// Δ = q Π_{n>=1} (1 - q^n)^24, the normalized weight-12 cusp form.
pub fn delta(order: i64) -> Result<QSeries> {
    if order < 1 {
        return Err(Error::InvalidArgument(format!(
            "Delta starts at q^1; need order >= 1, got {order}"
        )));
    }
    Ok(euler_product(order - 1).pow(24)?.shift(1))
}

/// j = E_4^3 / Δ = q^{-1} + 744 + 196884 q + ...
pub fn j_invariant(order: i64) -> Result<QSeries> {
    if order < -1 {
        return Err(Error::InvalidArgument(format!(
            "j expansion needs order >= -1, got {order}"
        )));
    }
    let extended = order + 2;
    let e4 = eisenstein(4, extended)?;
    let d = delta(extended)?;
    Ok(e4.pow(3)?.mul(&d.inv()?).truncate_to(order))
}

/// q-expansion of E_s/Δ^r from q^{-r} through q^order; the coefficient of
/// q^n is written τ(r, s; n).
pub fn tau_coeffs(r: u32, s: u32, order: i64) -> Result<QSeries> {
    if r < 1 {
        return Err(Error::InvalidArgument(format!(
            "need r >= 1 powers of Delta, got r = {r}"
        )));
    }
    let r_i = r as i64;
    if order < -r_i {
        return Err(Error::InvalidArgument(format!(
            "E_s/Delta^r starts at q^{}; order {order} is below it",
            -r_i
        )));
    }
    let extended = order + 2 * r_i;
    let es = eisenstein(s, extended)?;
    let d_pow = delta(extended)?.pow(r_i)?;
    Ok(es.mul(&d_pow.inv()?).truncate_to(order))
}

/// The unique pair (s, r) with s in {0, 4, 6, 8, 10, 14}, r >= 1 and
/// s - 12r = 2 - k.  Exists for every even k >= 4; k = 2 has none.
pub fn admissible_decomposition(k: i64) -> Result<(u32, u32)> {
    if k % 2 != 0 || k < 2 {
        return Err(Error::InvalidWeight(format!(
            "weight decomposition needs even k >= 2, got {k}"
        )));
    }
    let s = match (2 - k).rem_euclid(12) {
        2 => 14,
        residue @ (0 | 4 | 6 | 8 | 10) => residue as u32,
        _ => unreachable!("even k leaves an even residue"),
    };
    let r = (s as i64 - 2 + k) / 12;
    if r < 1 {
        return Err(Error::InvalidWeight(format!(
            "no admissible (s, r) with s - 12r = 2 - k exists for k = {k}"
        )));
    }
    Ok((s, r as u32))
}

/// q-expansion of (E_s/Δ^r) F(j) of weight 2 - k, where F is the
/// polynomial with coefficients `f_of_j` (ascending powers of j) and (s, r)
/// is the admissible decomposition of k.  The lowest exponent is
/// -r - deg F.
pub fn weakly_holomorphic_level1(k: i64, f_of_j: &[Rational], order: i64) -> Result<QSeries> {
    let (s, r) = admissible_decomposition(k)?;
    let r_i = r as i64;
    let mut deg_plus_1 = f_of_j.len();
    while deg_plus_1 > 0 && f_of_j[deg_plus_1 - 1].cmp0() == Ordering::Equal {
        deg_plus_1 -= 1;
    }
    if deg_plus_1 == 0 {
        return Ok(QSeries::zero(order));
    }
    let d = deg_plus_1 as i64 - 1;
    if order < -(r_i + d) {
        return Err(Error::InvalidArgument(format!(
            "(E_s/Delta^r) F(j) starts at q^{}; order {order} is below it",
            -(r_i + d)
        )));
    }
    let base = tau_coeffs(r, s, order + d)?;
    if d == 0 {
        return Ok(base.mul_scalar(&f_of_j[0]).truncate_to(order));
    }
    let jj = j_invariant((order + r_i + d - 1).max(-1))?;
    let mut acc = QSeries::constant(f_of_j[deg_plus_1 - 1].clone(), jj.trunc_order() + d);
    for t in (0..deg_plus_1 - 1).rev() {
        acc = acc.mul(&jj).add_scalar(&f_of_j[t]);
    }
    Ok(base.mul(&acc).truncate_to(order))
}

/// Echelonized basis g_1, ..., g_d of the cusp forms S_k(1): integer
/// coefficients with g_i = q^i + O(q^{d+1}), obtained by row-reducing the
/// monomials Δ^a E_4^b E_6^c of weight k with a >= 1.
pub fn cusp_basis_level1(k: i64, order: i64) -> Result<Vec<QSeries>> {
    let d = dim_cusp_forms_level1(k)?;
    if d == 0 {
        return Ok(Vec::new());
    }
    if order < d as i64 {
        return Err(Error::InvalidArgument(format!(
            "echelonizing S_{k}(1) of dimension {d} needs order >= {d}, got {order}"
        )));
    }
    let e4 = eisenstein(4, order)?;
    let e6 = eisenstein(6, order)?;
    let dl = delta(order)?;
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    for a in 1..=k / 12 {
        let rem = k - 12 * a;
        for c in 0..=rem / 6 {
            if (rem - 6 * c) % 4 != 0 {
                continue;
            }
            let b = (rem - 6 * c) / 4;
            let form = dl
                .pow(a)?
                .mul(&e4.pow(b)?)
                .mul(&e6.pow(c)?)
                .truncate_to(order);
            assert!(
                form.lowest_exponent() >= 1,
                "cusp monomials vanish at q^0"
            );
            rows.push((1..=order).map(|n| form.coeff(n)).collect());
        }
    }
    // Reduced row echelon over Q; columns are the exponents 1..=order.
    let ncols = order as usize;
    let mut pivots: Vec<usize> = Vec::new();
    let mut rank = 0usize;
    for col in 0..ncols {
        let Some(p) = (rank..rows.len()).find(|&i| rows[i][col].cmp0() != Ordering::Equal)
        else {
            continue;
        };
        rows.swap(rank, p);
        let inv = rows[rank][col].clone().recip();
        for x in rows[rank].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows.len() {
            if i != rank && rows[i][col].cmp0() != Ordering::Equal {
                let f = rows[i][col].clone();
                for c2 in col..ncols {
                    let t = Rational::from(&rows[rank][c2] * &f);
                    rows[i][c2] -= t;
                }
            }
        }
        pivots.push(col);
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    assert!(
        rank as u64 == d,
        "monomials of weight {k} must span a space of dimension {d}, found rank {rank}"
    );
    assert!(
        pivots == (0..d as usize).collect::<Vec<_>>(),
        "echelon pivots of S_{k}(1) must sit at q^1..q^{d}"
    );
    Ok(rows
        .into_iter()
        .take(d as usize)
        .map(|row| QSeries::new(1, row))
        .collect())
}
