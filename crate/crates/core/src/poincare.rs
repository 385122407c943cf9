//! Error-bounded Fourier coefficients of the cuspidal Poincare series
//! P(m,k,N) and of the Maass-Poincare series Q(-m,k,N), computed from their
//! Kloosterman/Bessel c-sums.
//!
//! Families (all sums run over c > 0 with N | c):
//! - classical (n >= 1):
//!   a(m,k,N;n) = delta_{mn}
//!     + 2 pi i^{-k} (n/m)^{(k-1)/2} Sum K_k(m,n,c)/c * J_{k-1}(4 pi sqrt(mn)/c);
//! - Maass, n >= 1:
//!   b(-m,k,N;n) = -2 pi i^k (m/n)^{(k-1)/2}
//!                 Sum K_{2-k}(-m,n,c)/c * I_{k-1}(4 pi sqrt(mn)/c);
//! - Maass, n = 0:
//!   b(-m,k,N;0) = -(2 pi i)^k m^{k-1} / Gamma(k) * Sum K_{2-k}(-m,0,c)/c^k;
//! - Maass, n <= -1:
//!   b(-m,k,N;n) = -2 pi i^k / Gamma(k-1) * |m/n|^{(k-1)/2}
//!                 Sum K_{2-k}(-m,n,c)/c * J_{k-1}(4 pi sqrt(|mn|)/c).
//!   At n = -m this is the c-sum only: the seed term
//!   -Gamma(k-1, 4 pi m y)/(k-2)! q^{-m} of Q^- is deliberately not produced.
//!
//! Rigor:
//! - every result carries a tail bound (the omitted c > C terms, via
//!   |K| <= phi(c) <= c, |J_nu(x)| <= (x/2)^nu / Gamma(nu+1),
//!   |I_nu(x)| <= (x/2)^nu e^{x^2/(4(nu+1))} / Gamma(nu+1), and integral
//!   comparison of the remaining c-powers) and a rounding bound (upward f64
//!   accumulation over every floating-point operation);
//! - the true coefficient lies within value +/- (tail_bound + rounding_bound),
//!   componentwise;
//! - k = 2 is the lone exception: its c-sum converges only conditionally, so
//!   results are marked `heuristic` with an estimated (non-rigorous) tail.
//!
//! Absolute targets need working precision commensurate with the values: the
//! I-Bessel family grows like e^{4 pi sqrt(mn)/N}, so callers raise
//! `precision_bits` by about 1.443 * (4 pi sqrt(mn)/N) bits for large m*n.
//! Summation is sequential in ascending c and bit-for-bit deterministic.

use crate::error::{Error, Result};
use crate::exactarith::{FourthRoot, KloostermanValue, WeightProfile};
use crate::numeric::{add_up, fup, mag_up, mul_up, rel_ulp, CFloat};
use crate::special::{bessel_i, bessel_j, gamma_half, BoundedReal};
use rug::float::Constant;
use rug::ops::Pow;
use rug::{Float, Rational};

const LN_2PI: f64 = 1.837_877_066_409_345_4;

/// Knobs for the coefficient computations.  `precision_bits` is the working
/// precision of the c-sum (the Bessel evaluations elevate internally as
/// needed); `max_c` caps the cutoff modulus the tail solver may request.
#[derive(Clone, Copy, Debug)]
pub struct NumericConfig {
    pub precision_bits: u32,
    pub max_c: u64,
}

impl Default for NumericConfig {
    fn default() -> Self {
        NumericConfig {
            precision_bits: 128,
            max_c: 5_000_000,
        }
    }
}

/// Which coefficient family a result belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoeffFamily {
    Classical,
    MaassPositive,
    MaassZero,
    MaassNegative,
}

/// A computed Fourier coefficient with a certificate: the true value lies
/// within `value` +/- (`tail_bound` + `rounding_bound`) componentwise, unless
/// `heuristic` is set (k = 2), in which case `tail_bound` is an estimate.
#[derive(Clone, Debug)]
pub struct CoeffResult {
    pub family: CoeffFamily,
    pub profile: WeightProfile,
    pub m: u64,
    /// Index n of the coefficient: positive, zero, or negative by family.
    pub n: i64,
    pub value: CFloat,
    pub tail_bound: f64,
    pub rounding_bound: f64,
    /// Largest modulus included in the c-sum.
    pub c_used: u64,
    pub heuristic: bool,
}

impl CoeffResult {
    /// tail_bound + rounding_bound, rounded up.
    pub fn total_bound(&self) -> f64 {
        add_up(self.tail_bound, self.rounding_bound)
    }

    /// (re, im) as f64.
    pub fn value_f64(&self) -> (f64, f64) {
        self.value.to_f64_pair()
    }
}

fn exp_up(ln: f64) -> f64 {
    fup(fup(ln.exp()) * 1.01)
}

fn ln_gamma_f64(x: f64) -> f64 {
    Float::with_val(64, x).gamma().ln().to_f64()
}

/// Tail envelope: every omitted term with modulus c satisfies
/// |term| <= exp(a_ln) * c^{1-k} [* exp((x_base/c)^2 / (4k)) in I-mode],
/// where a_ln already includes the family prefactor.
struct TailModel {
    a_ln: f64,
    km2: f64,
    level: u64,
    /// Some((4 pi sqrt(mn), 4k)) switches on the I-Bessel exponential factor.
    i_mode: Option<(f64, f64)>,
}

impl TailModel {
    /// ln of the tail bound when every c <= cutoff is summed:
    /// sum_{c > cutoff, N | c} c^{1-k} <= N^{1-k} (cutoff/N - 1)^{2-k}/(k-2)
    /// by integral comparison (the -1 covers the floor of the first omitted
    /// index), with the I-factor frozen at its largest omitted argument.
    fn ln_tail(&self, cutoff: f64) -> f64 {
        let nn = self.level as f64;
        let t = (cutoff / nn - 1.0).max(1.0);
        let mut ln = self.a_ln - (self.km2 + 1.0) * nn.ln() - self.km2 * t.ln() - self.km2.ln();
        if let Some((x_base, four_k)) = self.i_mode {
            ln += (x_base / cutoff).powi(2) / four_k;
        }
        ln
    }

    /// Smallest cutoff (doubling search from the closed-form seed) whose
    /// tail bound is <= eps; reports (cutoff, tail_bound).
    fn solve(&self, eps: f64, max_c: u64) -> Result<(u64, f64)> {
        let nn = self.level as f64;
        let ln_eps = eps.ln();
        let seed = (self.a_ln - (self.km2 + 1.0) * nn.ln() - self.km2.ln() - ln_eps) / self.km2;
        let mut cutoff = if seed.is_finite() {
            let c = nn * (seed.exp() + 2.0);
            if c.is_finite() {
                (c.ceil() as u64).clamp(self.level, max_c)
            } else {
                max_c
            }
        } else {
            self.level
        };
        loop {
            let ln_t = self.ln_tail(cutoff as f64);
            if ln_t <= ln_eps {
                return Ok((cutoff, exp_up(ln_t)));
            }
            if cutoff >= max_c {
                return Err(Error::UnreachableTolerance(format!(
                    "tail bound {:.3e} at the cutoff cap c = {} still exceeds the tail budget {:.3e}",
                    exp_up(ln_t),
                    max_c,
                    eps
                )));
            }
            cutoff = cutoff.saturating_mul(2).min(max_c);
        }
    }
}

struct CSum {
    sum: CFloat,
    rounding: f64,
    /// Magnitudes of consecutive 64-term partial sums (for the k = 2
    /// convergence estimate).
    chunk_mags: Vec<f64>,
}

/// Sum K(c) * factor(c) over c = level, 2*level, ..., <= cutoff, sequentially
/// and deterministically, accumulating a rigorous rounding bound.
fn c_sum<FK, FF>(level: u64, cutoff: u64, wp: u32, mut kloo: FK, mut factor: FF) -> Result<CSum>
where
    FK: FnMut(u64) -> Result<KloostermanValue>,
    FF: FnMut(u64) -> Result<BoundedReal>,
{
    let u = rel_ulp(wp);
    let mut sum = CFloat::zero(wp);
    let mut chunk = CFloat::zero(wp);
    let mut rounding = 0.0f64;
    let mut sum_mag = 0.0f64;
    let mut chunk_mags = Vec::new();
    let mut in_chunk = 0u32;
    let mut c = level;
    while c <= cutoff {
        let kv = kloo(c)?;
        let fv = factor(c)?;
        let kmag = kv.mag_up();
        let fmag = fv.mag_up();
        let t_re = Float::with_val(wp, &kv.re * &fv.value);
        let t_im = Float::with_val(wp, &kv.im * &fv.value);
        let t_mag = mul_up(kmag, fmag);
        let e_term = add_up(
            add_up(mul_up(kmag, fv.abs_error), mul_up(kv.rounding_bound, fmag)),
            mul_up(t_mag, 4.0 * u),
        );
        sum.re += &t_re;
        sum.im += &t_im;
        chunk.re += &t_re;
        chunk.im += &t_im;
        sum_mag = add_up(sum_mag, t_mag);
        rounding = add_up(rounding, add_up(e_term, mul_up(sum_mag, 2.0 * u)));
        in_chunk += 1;
        if in_chunk == 64 {
            chunk_mags.push(chunk.mag_up());
            chunk = CFloat::zero(wp);
            in_chunk = 0;
        }
        c = match c.checked_add(level) {
            Some(next) => next,
            None => break,
        };
    }
    if in_chunk > 0 {
        chunk_mags.push(chunk.mag_up());
    }
    Ok(CSum {
        sum,
        rounding,
        chunk_mags,
    })
}

/// e^{i pi t / 4} as a CFloat: exact for even t, sqrt(1/2) pairs (error a few
/// ulp) for odd t.  Returns (root, componentwise abs error).
fn eighth_root(t: i64, wp: u32) -> (CFloat, f64) {
    let t = t.rem_euclid(8);
    if t % 2 == 0 {
        let (re, im) = FourthRoot::from_exponent(t / 2).to_pair();
        (
            CFloat::new(Float::with_val(wp, re), Float::with_val(wp, im)),
            0.0,
        )
    } else {
        let s = Float::with_val(wp, 0.5f64).sqrt();
        let (sr, si) = match t {
            1 => (1, 1),
            3 => (-1, 1),
            5 => (-1, -1),
            _ => (1, -1),
        };
        let root = CFloat::new(Float::with_val(wp, &s * sr), Float::with_val(wp, &s * si));
        (root, 4.0 * rel_ulp(wp))
    }
}

/// 4 pi sqrt(mn) at working precision (relative error a few ulp).
fn bessel_arg_base(mn: u128, wp: u32) -> Float {
    let four_pi = Float::with_val(wp, Constant::Pi) * 4u32;
    four_pi * Float::with_val(wp, mn).sqrt()
}

/// J_{nu}(x_base/c)/c with the error widened for the rounding of the
/// argument itself (|J_nu'| <= 1 for nu >= 1).
fn j_factor(two_nu: i64, x_base: &Float, c: u64, wp: u32) -> Result<BoundedReal> {
    let x = Float::with_val(wp, x_base / c);
    let x_f = x.to_f64().abs();
    let b = bessel_j(two_nu, &x, wp)?;
    let input_err = mul_up(x_f, 8.0 * rel_ulp(wp));
    let value = Float::with_val(wp, &b.value / c);
    let c_f = c as f64;
    let abs_error = add_up(
        fup(add_up(b.abs_error, input_err) / c_f),
        mul_up(fup(add_up(b.mag_up(), input_err) / c_f), 2.0 * rel_ulp(wp)),
    );
    Ok(BoundedReal { value, abs_error })
}

/// I_{nu}(x_base/c)/c with the argument-rounding error widened via
/// |I_nu'(x)| <= I_{nu-1}(x) <= e^x (nu >= 1).
fn i_factor(two_nu: i64, x_base: &Float, c: u64, wp: u32) -> Result<BoundedReal> {
    let x = Float::with_val(wp, x_base / c);
    let x_f = x.to_f64().abs();
    let b = bessel_i(two_nu, &x, wp)?;
    let input_err = if x_f > 0.0 {
        exp_up(x_f + (8.0 * x_f).ln() + (1.0 - wp as f64) * std::f64::consts::LN_2)
    } else {
        0.0
    };
    let value = Float::with_val(wp, &b.value / c);
    let c_f = c as f64;
    let abs_error = add_up(
        fup(add_up(b.abs_error, input_err) / c_f),
        mul_up(fup(add_up(b.mag_up(), input_err) / c_f), 2.0 * rel_ulp(wp)),
    );
    Ok(BoundedReal { value, abs_error })
}

/// c^{-k} (correctly rounded power, error a few ulp).
fn power_factor(neg_k: &Float, c: u64, wp: u32) -> Result<BoundedReal> {
    let value = Float::with_val(wp, Float::with_val(wp, c).pow(neg_k));
    let abs_error = mul_up(mag_up(&value), 4.0 * rel_ulp(wp));
    Ok(BoundedReal { value, abs_error })
}

/// 2 pi (num/den)^{(2k-2)/4} as (magnitude, abs error); exponent is exact.
fn ratio_power_2pi(num: u64, den: u64, two_k: i64, wp: u32) -> (Float, f64) {
    let two_pi = Float::with_val(wp, Constant::Pi) * 2u32;
    let ratio = Float::with_val(wp, num) / Float::with_val(wp, den);
    let e = Float::with_val(wp, Rational::from((two_k - 2, 4)));
    let p = Float::with_val(wp, ratio.pow(&e));
    let mag = two_pi * p;
    let err = mul_up(mag_up(&mag), (two_k.unsigned_abs() as f64 + 8.0) * rel_ulp(wp));
    (mag, err)
}

struct Prefactor {
    mag: Float,
    mag_err: f64,
    rot: CFloat,
    rot_err: f64,
}

struct Assembly<'a> {
    family: CoeffFamily,
    profile: &'a WeightProfile,
    m: u64,
    n: i64,
    cs: CSum,
    pref: Prefactor,
    add_delta: bool,
    /// Rigorous tail bound (already includes the prefactor), or 0.
    tail_absolute: f64,
    /// Heuristic c-sum tail estimate to be scaled by |prefactor|, or 0.
    tail_scaled: f64,
    c_used: u64,
    heuristic: bool,
    wp: u32,
    target: f64,
}

fn assemble(a: Assembly<'_>) -> Result<CoeffResult> {
    let u = rel_ulp(a.wp);
    let s_mag = add_up(a.cs.sum.mag_up(), a.cs.rounding);
    let p_mag = add_up(mag_up(&a.pref.mag), a.pref.mag_err);
    let mut v = a.cs.sum;
    v.scale_assign(&a.pref.mag);
    let mut v = v.mul(&a.pref.rot);
    let v_mag = mul_up(p_mag, s_mag);
    let mut rounding = add_up(
        add_up(mul_up(p_mag, a.cs.rounding), mul_up(a.pref.mag_err, s_mag)),
        add_up(mul_up(a.pref.rot_err, v_mag), mul_up(v_mag, 10.0 * u)),
    );
    if a.add_delta {
        v.re += 1u32;
        rounding = add_up(rounding, mul_up(add_up(v_mag, 1.0), 2.0 * u));
    }
    let tail_bound = add_up(a.tail_absolute, mul_up(a.tail_scaled, p_mag));
    if tail_bound > a.target / 2.0 {
        return Err(Error::UnreachableTolerance(format!(
            "{}tail bound {:.3e} exceeds half the target {:.3e} (cutoff c = {})",
            if a.heuristic {
                "k = 2 has no rigorous tail; estimated "
            } else {
                ""
            },
            tail_bound,
            a.target,
            a.c_used
        )));
    }
    if rounding > a.target / 2.0 {
        return Err(Error::UnreachableTolerance(format!(
            "rounding bound {:.3e} exceeds half the target {:.3e} at {} working bits; raise the precision",
            rounding, a.target, a.wp
        )));
    }
    Ok(CoeffResult {
        family: a.family,
        profile: *a.profile,
        m: a.m,
        n: a.n,
        value: v,
        tail_bound,
        rounding_bound: rounding,
        c_used: a.c_used,
        heuristic: a.heuristic,
    })
}

fn validate_common(m: u64, target_error: f64) -> Result<()> {
    if m == 0 {
        return Err(Error::InvalidArgument("index m must be positive".into()));
    }
    if !(target_error > 0.0) || !target_error.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "target error must be a positive finite number, got {target_error}"
        )));
    }
    Ok(())
}

fn heuristic_cutoff(level: u64, max_c: u64) -> u64 {
    level.saturating_mul(2048).min(max_c).max(level)
}

/// 4 * the largest 64-term partial-sum magnitude over the trailing quarter
/// of the summed range: a convergence estimate, not a bound.
fn heuristic_estimate(chunk_mags: &[f64]) -> f64 {
    if chunk_mags.is_empty() {
        return 0.0;
    }
    let tail_len = (chunk_mags.len() / 4).max(1);
    let peak = chunk_mags[chunk_mags.len() - tail_len..]
        .iter()
        .fold(0.0f64, |acc, &x| acc.max(x));
    mul_up(4.0, peak)
}

/// a(m,k,N;n) = delta_{mn} + 2 pi i^{-k} (n/m)^{(k-1)/2}
///              Sum_{N|c} K_k(m,n,c)/c J_{k-1}(4 pi sqrt(mn)/c), n >= 1.
pub fn classical_coeff(
    w: &WeightProfile,
    m: u64,
    n: u64,
    target_error: f64,
    cfg: &NumericConfig,
) -> Result<CoeffResult> {
    validate_common(m, target_error)?;
    if n == 0 {
        return Err(Error::InvalidArgument(
            "classical coefficients have index n >= 1".into(),
        ));
    }
    let two_k = w.two_k();
    let k_f = w.k_f64();
    let level = w.level();
    let wp = cfg.precision_bits.max(32);
    let heuristic = two_k == 4;
    let (c_used, tail_absolute) = if heuristic {
        (heuristic_cutoff(level, cfg.max_c), 0.0)
    } else {
        TailModel {
            a_ln: k_f * LN_2PI + (k_f - 1.0) * (n as f64).ln() - ln_gamma_f64(k_f),
            km2: k_f - 2.0,
            level,
            i_mode: None,
        }
        .solve(target_error / 2.0, cfg.max_c)?
    };
    let x_base = bessel_arg_base(m as u128 * n as u128, wp);
    let cs = c_sum(
        level,
        c_used,
        wp,
        |c| w.kloosterman(m as i64, n as i64, c, wp),
        |c| j_factor(two_k - 2, &x_base, c, wp),
    )?;
    let tail_scaled = if heuristic {
        heuristic_estimate(&cs.chunk_mags)
    } else {
        0.0
    };
    let (mag, mag_err) = ratio_power_2pi(n, m, two_k, wp);
    let (rot, rot_err) = eighth_root(-two_k, wp);
    assemble(Assembly {
        family: CoeffFamily::Classical,
        profile: w,
        m,
        n: n as i64,
        cs,
        pref: Prefactor {
            mag,
            mag_err,
            rot,
            rot_err,
        },
        add_delta: m == n,
        tail_absolute,
        tail_scaled,
        c_used,
        heuristic,
        wp,
        target: target_error,
    })
}

/// b(-m,k,N;n) = -2 pi i^k (m/n)^{(k-1)/2}
///               Sum_{N|c} K_{2-k}(-m,n,c)/c I_{k-1}(4 pi sqrt(mn)/c), n >= 1.
pub fn maass_coeff_positive(
    w: &WeightProfile,
    m: u64,
    n: u64,
    target_error: f64,
    cfg: &NumericConfig,
) -> Result<CoeffResult> {
    validate_common(m, target_error)?;
    if n == 0 {
        return Err(Error::InvalidArgument(
            "this family has index n >= 1".into(),
        ));
    }
    let two_k = w.two_k();
    let k_f = w.k_f64();
    let level = w.level();
    let wp = cfg.precision_bits.max(32);
    let heuristic = two_k == 4;
    let x_base_f = 4.0 * std::f64::consts::PI * ((m as f64) * (n as f64)).sqrt();
    let (c_used, tail_absolute) = if heuristic {
        (heuristic_cutoff(level, cfg.max_c), 0.0)
    } else {
        TailModel {
            a_ln: k_f * LN_2PI + (k_f - 1.0) * (m as f64).ln() - ln_gamma_f64(k_f),
            km2: k_f - 2.0,
            level,
            i_mode: Some((x_base_f, 4.0 * k_f)),
        }
        .solve(target_error / 2.0, cfg.max_c)?
    };
    let x_base = bessel_arg_base(m as u128 * n as u128, wp);
    let cs = c_sum(
        level,
        c_used,
        wp,
        |c| w.kloosterman_dual(-(m as i64), n as i64, c, wp),
        |c| i_factor(two_k - 2, &x_base, c, wp),
    )?;
    let tail_scaled = if heuristic {
        heuristic_estimate(&cs.chunk_mags)
    } else {
        0.0
    };
    let (mag, mag_err) = ratio_power_2pi(m, n, two_k, wp);
    let (rot, rot_err) = eighth_root(two_k + 4, wp);
    assemble(Assembly {
        family: CoeffFamily::MaassPositive,
        profile: w,
        m,
        n: n as i64,
        cs,
        pref: Prefactor {
            mag,
            mag_err,
            rot,
            rot_err,
        },
        add_delta: false,
        tail_absolute,
        tail_scaled,
        c_used,
        heuristic,
        wp,
        target: target_error,
    })
}

/// b(-m,k,N;0) = -(2 pi i)^k m^{k-1} / Gamma(k) Sum_{N|c} K_{2-k}(-m,0,c)/c^k.
pub fn maass_coeff_zero(
    w: &WeightProfile,
    m: u64,
    target_error: f64,
    cfg: &NumericConfig,
) -> Result<CoeffResult> {
    validate_common(m, target_error)?;
    let two_k = w.two_k();
    let k_f = w.k_f64();
    let level = w.level();
    let wp = cfg.precision_bits.max(32);
    let heuristic = two_k == 4;
    let (c_used, tail_absolute) = if heuristic {
        (heuristic_cutoff(level, cfg.max_c), 0.0)
    } else {
        TailModel {
            a_ln: k_f * LN_2PI + (k_f - 1.0) * (m as f64).ln() - ln_gamma_f64(k_f),
            km2: k_f - 2.0,
            level,
            i_mode: None,
        }
        .solve(target_error / 2.0, cfg.max_c)?
    };
    let neg_k = Float::with_val(wp, Rational::from((-two_k, 2)));
    let cs = c_sum(
        level,
        c_used,
        wp,
        |c| w.kloosterman_dual(-(m as i64), 0, c, wp),
        |c| power_factor(&neg_k, c, wp),
    )?;
    let tail_scaled = if heuristic {
        heuristic_estimate(&cs.chunk_mags)
    } else {
        0.0
    };
    // (2 pi)^k m^{k-1} / Gamma(k), rotated by -i^k.
    let k_exact = Float::with_val(wp, Rational::from((two_k, 2)));
    let km1_exact = Float::with_val(wp, Rational::from((two_k - 2, 2)));
    let two_pi = Float::with_val(wp, Constant::Pi) * 2u32;
    let p1 = Float::with_val(wp, two_pi.pow(&k_exact));
    let p2 = Float::with_val(wp, Float::with_val(wp, m).pow(&km1_exact));
    let g = gamma_half(two_k, wp)?;
    let mag = p1 * p2 / g;
    let mag_err = mul_up(
        mag_up(&mag),
        (two_k.unsigned_abs() as f64 + 12.0) * rel_ulp(wp),
    );
    let (rot, rot_err) = eighth_root(two_k + 4, wp);
    assemble(Assembly {
        family: CoeffFamily::MaassZero,
        profile: w,
        m,
        n: 0,
        cs,
        pref: Prefactor {
            mag,
            mag_err,
            rot,
            rot_err,
        },
        add_delta: false,
        tail_absolute,
        tail_scaled,
        c_used,
        heuristic,
        wp,
        target: target_error,
    })
}

/// b(-m,k,N;n) = -2 pi i^k / Gamma(k-1) |m/n|^{(k-1)/2}
///               Sum_{N|c} K_{2-k}(-m,n,c)/c J_{k-1}(4 pi sqrt(|mn|)/c), n <= -1.
///
/// At n = -m only the c-sum is returned; the q^{-m} seed term of Q^- (the
/// incomplete-gamma leading coefficient) is not a Fourier coefficient of
/// this kind and is excluded by construction.
pub fn maass_coeff_negative(
    w: &WeightProfile,
    m: u64,
    n: i64,
    target_error: f64,
    cfg: &NumericConfig,
) -> Result<CoeffResult> {
    validate_common(m, target_error)?;
    if n >= 0 {
        return Err(Error::InvalidArgument(
            "this family has index n <= -1".into(),
        ));
    }
    let n_abs = n.unsigned_abs();
    let two_k = w.two_k();
    let k_f = w.k_f64();
    let level = w.level();
    let wp = cfg.precision_bits.max(32);
    let heuristic = two_k == 4;
    let (c_used, tail_absolute) = if heuristic {
        (heuristic_cutoff(level, cfg.max_c), 0.0)
    } else {
        TailModel {
            a_ln: k_f * LN_2PI + (k_f - 1.0) * (m as f64).ln()
                - ln_gamma_f64(k_f)
                - ln_gamma_f64(k_f - 1.0),
            km2: k_f - 2.0,
            level,
            i_mode: None,
        }
        .solve(target_error / 2.0, cfg.max_c)?
    };
    let x_base = bessel_arg_base(m as u128 * n_abs as u128, wp);
    let cs = c_sum(
        level,
        c_used,
        wp,
        |c| w.kloosterman_dual(-(m as i64), n, c, wp),
        |c| j_factor(two_k - 2, &x_base, c, wp),
    )?;
    let tail_scaled = if heuristic {
        heuristic_estimate(&cs.chunk_mags)
    } else {
        0.0
    };
    let (mag0, mag0_err) = ratio_power_2pi(m, n_abs, two_k, wp);
    let g = gamma_half(two_k - 2, wp)?;
    let g_f = g.to_f64();
    let mag = mag0 / g;
    let mag_err = add_up(
        mul_up(mag0_err, fup(1.0 / g_f.max(f64::MIN_POSITIVE))),
        mul_up(mag_up(&mag), 4.0 * rel_ulp(wp)),
    );
    let (rot, rot_err) = eighth_root(two_k + 4, wp);
    assemble(Assembly {
        family: CoeffFamily::MaassNegative,
        profile: w,
        m,
        n,
        cs,
        pref: Prefactor {
            mag,
            mag_err,
            rot,
            rot_err,
        },
        add_delta: false,
        tail_absolute,
        tail_scaled,
        c_used,
        heuristic,
        wp,
        target: target_error,
    })
}
