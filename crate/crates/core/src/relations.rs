//! Linear relations among the cuspidal series P(m, k, N) and the dual
//! principal-part picture that produces, certifies, and refutes them.
//!
//! For level 1 and even integral k >= 4 with d = dim S_k(1):
//! - a relation Sum_m alpha_m P(m,k,1) = 0 corresponds exactly to a weakly
//!   holomorphic form of weight 2 - k whose principal part is
//!   Sum_m (alpha_m / m^{k-1}) q^{-m};
//! - the generator with the smallest admissible pole order is
//!   E_s/Delta^{d+1} (with s - 12(d+1) = 2 - k), giving the closed-form
//!   relation alpha_m = tau(d+1, s; -m) * m^{k-1} for m = 1..d+1;
//! - no nonzero relation involves only P(1), ..., P(d); every P(m) with
//!   m > d is a combination of those.
//!
//! Certification is layered: `dual_pairing_oracle` checks the exact rational
//! pairing Sum_m alpha_m a_g(m) / m^{k-1} = 0 against the echelon cusp basis,
//! and `verify_relation_numeric` recomputes coefficient columns of the actual
//! Poincare series with error certificates, reporting per-column residuals
//! against rigorous budgets (consistent / refuted / inconclusive).

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use crate::error::{Error, Result};
use crate::exactarith::{parse_rational, WeightProfile};
use crate::numeric::{add_up, fup, mul_up};
use crate::poincare::{classical_coeff, NumericConfig};
use crate::qseries::{
    admissible_decomposition, cusp_basis_level1, j_invariant, tau_coeffs,
    weakly_holomorphic_level1, PrincipalPart, QSeries,
};

/// Where a relation came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    /// The closed-form generator E_s/Delta^{d+1}.
    Corollary,
    /// Derived by the principal-part solver / relation finder.
    Solver,
    /// Supplied externally (e.g. parsed from a file).
    User,
}

impl Provenance {
    pub fn as_str(&self) -> &'static str {
        match self {
            Provenance::Corollary => "corollary",
            Provenance::Solver => "solver",
            Provenance::User => "user",
        }
    }

    pub fn parse(text: &str) -> Result<Provenance> {
        match text {
            "corollary" => Ok(Provenance::Corollary),
            "solver" => Ok(Provenance::Solver),
            "user" => Ok(Provenance::User),
            other => Err(Error::Parse(format!("unknown provenance '{other}'"))),
        }
    }
}

/// A candidate identity Sum_m alpha_m P(m, k, N) = 0 with exact rational
/// coefficients alpha_m, keyed by the index m >= 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub weight: i64,
    pub level: u64,
    pub coefficients: BTreeMap<u64, Rational>,
    pub provenance: Provenance,
}

impl Relation {
    /// Validates the weight (even, 4 <= k <= 60000), the level (>= 1), and
    /// the indices (m >= 1); zero coefficients are dropped and at least one
    /// nonzero coefficient must remain.
    pub fn new(
        weight: i64,
        level: u64,
        coefficients: BTreeMap<u64, Rational>,
        provenance: Provenance,
    ) -> Result<Relation> {
        if weight % 2 != 0 || !(4..=60_000).contains(&weight) {
            return Err(Error::InvalidWeight(format!(
                "relations need even integral weight in [4, 60000], got {weight}"
            )));
        }
        if level == 0 {
            return Err(Error::InvalidArgument("level must be >= 1".into()));
        }
        let mut kept = BTreeMap::new();
        for (m, alpha) in coefficients {
            if m == 0 {
                return Err(Error::InvalidArgument(
                    "relation indices m must be >= 1".into(),
                ));
            }
            if alpha.cmp0() != Ordering::Equal {
                kept.insert(m, alpha);
            }
        }
        if kept.is_empty() {
            return Err(Error::InvalidArgument(
                "a relation needs at least one nonzero coefficient".into(),
            ));
        }
        Ok(Relation {
            weight,
            level,
            coefficients: kept,
            provenance,
        })
    }

    /// The principal part Sum_m (alpha_m / m^{k-1}) q^{-m} of the weight
    /// 2 - k form this relation corresponds to.
    pub fn principal_part(&self) -> PrincipalPart {
        let mut pp = PrincipalPart::new();
        for (&m, alpha) in &self.coefficients {
            let scale = Rational::from(Integer::from(m).pow((self.weight - 1) as u32));
            pp.set(m, alpha.clone() / scale);
        }
        pp
    }

    /// The relation whose coefficients are alpha_m = beta_m * m^{k-1} for
    /// the principal part Sum beta_m q^{-m} (level 1).
    pub fn from_principal_part(
        weight: i64,
        pp: &PrincipalPart,
        provenance: Provenance,
    ) -> Result<Relation> {
        let mut coefficients = BTreeMap::new();
        for (&m, beta) in pp.iter() {
            let scale = Rational::from(Integer::from(m).pow((weight - 1) as u32));
            coefficients.insert(m, beta.clone() * scale);
        }
        Relation::new(weight, 1, coefficients, provenance)
    }

    /// The same relation scaled to primitive integer coefficients (content
    /// 1) with the largest-index coefficient positive.
    pub fn content_normalized(&self) -> Relation {
        let mut lcm = Integer::from(1);
        for alpha in self.coefficients.values() {
            lcm.lcm_mut(alpha.denom());
        }
        let scaled: BTreeMap<u64, Integer> = self
            .coefficients
            .iter()
            .map(|(&m, alpha)| {
                let v = Rational::from(alpha * Rational::from(&lcm));
                assert!(v.is_integer(), "lcm of denominators clears every entry");
                (m, v.numer().clone())
            })
            .collect();
        let mut content = Integer::new();
        for v in scaled.values() {
            content.gcd_mut(v);
        }
        let top_negative = scaled
            .values()
            .next_back()
            .map(|v| v.cmp0() == Ordering::Less)
            .unwrap_or(false);
        if top_negative {
            content = -content;
        }
        let coefficients = scaled
            .into_iter()
            .map(|(m, v)| (m, Rational::from(v / &content)))
            .collect();
        Relation {
            weight: self.weight,
            level: self.level,
            coefficients,
            provenance: self.provenance,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut coeffs = serde_json::Map::new();
        for (m, alpha) in &self.coefficients {
            coeffs.insert(m.to_string(), serde_json::Value::String(alpha.to_string()));
        }
        serde_json::json!({
            "k": self.weight.to_string(),
            "N": self.level,
            "coeffs": coeffs,
            "provenance": self.provenance.as_str(),
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Relation> {
        let obj = v
            .as_object()
            .ok_or_else(|| Error::Parse("relation JSON must be an object".into()))?;
        let k_str = obj
            .get("k")
            .and_then(|x| x.as_str())
            .ok_or_else(|| Error::Parse("relation JSON needs a string field 'k'".into()))?;
        let k_rat = parse_rational(k_str)?;
        if !k_rat.is_integer() {
            return Err(Error::InvalidWeight(format!(
                "relations need integral weight, got {k_rat}"
            )));
        }
        let weight = k_rat
            .numer()
            .to_i64()
            .ok_or_else(|| Error::InvalidWeight("weight out of range".into()))?;
        let level = obj
            .get("N")
            .and_then(|x| x.as_u64())
            .ok_or_else(|| Error::Parse("relation JSON needs an integer field 'N'".into()))?;
        let coeffs = obj
            .get("coeffs")
            .and_then(|x| x.as_object())
            .ok_or_else(|| Error::Parse("relation JSON needs an object field 'coeffs'".into()))?;
        let mut coefficients = BTreeMap::new();
        for (key, value) in coeffs {
            let m: u64 = key
                .parse()
                .map_err(|_| Error::Parse(format!("bad relation index '{key}'")))?;
            let text = value
                .as_str()
                .ok_or_else(|| Error::Parse(format!("coefficient of m={key} must be a string")))?;
            coefficients.insert(m, parse_rational(text)?);
        }
        let provenance = match obj.get("provenance") {
            Some(p) => Provenance::parse(p.as_str().ok_or_else(|| {
                Error::Parse("provenance must be a string".into())
            })?)?,
            None => Provenance::User,
        };
        Relation::new(weight, level, coefficients, provenance)
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (m, alpha)) in self.coefficients.iter().enumerate() {
            if i == 0 {
                if alpha.cmp0() == Ordering::Less {
                    write!(f, "-")?;
                }
            } else if alpha.cmp0() == Ordering::Less {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let a = alpha.clone().abs();
            if a != 1u32 {
                write!(f, "{a} ")?;
            }
            write!(f, "P({m}, {}, {})", self.weight, self.level)?;
        }
        write!(f, " = 0")
    }
}

/// The closed-form relation from the generator E_s/Delta^{d+1}:
/// alpha_m = tau(d+1, s; -m) * m^{k-1} for m = 1..d+1, d = dim S_k(1).
pub fn corollary_relation(k: i64) -> Result<Relation> {
    let (s, r) = admissible_decomposition(k)?;
    let base = tau_coeffs(r, s, -1)?;
    let mut coefficients = BTreeMap::new();
    for m in 1..=r as i64 {
        let tau_m = base.coeff(-m);
        if tau_m.cmp0() != Ordering::Equal {
            let alpha = tau_m * Rational::from(Integer::from(m).pow((k - 1) as u32));
            coefficients.insert(m as u64, alpha);
        }
    }
    Relation::new(k, 1, coefficients, Provenance::Corollary)
}

/// All reduced relations among P(1,k,1), ..., P(m_max,k,1): one generator
/// for each pole order d+1 <= m0 <= m_max, involving P(m0) (with
/// coefficient m0^{k-1}) and only P(1), ..., P(d) besides it.  Empty when
/// m_max <= d: those series are linearly independent.
pub fn find_relations(k: i64, m_max: u64) -> Result<Vec<Relation>> {
    let (s, r) = admissible_decomposition(k)?;
    let r_i = r as i64;
    if (m_max as i64) < r_i {
        return Ok(Vec::new());
    }
    let t_max = m_max as i64 - r_i;
    let order = m_max as i64 + 2;
    let base = tau_coeffs(r, s, order)?;
    let jj = j_invariant(order)?;
    let mut gs: Vec<QSeries> = vec![base];
    for _ in 1..=t_max {
        let next = gs.last().expect("nonempty").mul(&jj);
        gs.push(next);
    }
    let mut out = Vec::with_capacity(t_max as usize + 1);
    for t in 0..=t_max {
        let mut f = gs[t as usize].clone();
        for j in (r_i..r_i + t).rev() {
            let c = f.coeff(-j);
            if c.cmp0() != Ordering::Equal {
                f = f.sub(&gs[(j - r_i) as usize].mul_scalar(&c));
            }
        }
        assert!(
            f.coeff(-(r_i + t)) == 1u32,
            "reduced generator stays monic at its pole"
        );
        let pp = PrincipalPart::from_series(&f)?;
        out.push(Relation::from_principal_part(k, &pp, Provenance::Solver)?);
    }
    Ok(out)
}

/// Realize the principal part `pp` as a weakly holomorphic form of weight
/// 2 - k and level 1, expanded through `order`, or report that no such form
/// exists (`None`).  The empty principal part realizes as the zero form.
pub fn solve_principal_part_level1(
    k: i64,
    pp: &PrincipalPart,
    order: i64,
) -> Result<Option<QSeries>> {
    let (s, r) = admissible_decomposition(k)?;
    let r_i = r as i64;
    if pp.is_empty() {
        return Ok(Some(QSeries::zero(order)));
    }
    let m_top = pp.max_pole_order() as i64;
    if m_top < r_i {
        // A nonzero form of weight 2 - k has a pole of order >= d + 1:
        // multiplying by Delta^{d+1} would otherwise yield a cusp form of
        // weight s in {0, 4, 6, 8, 10, 14}, which vanishes.
        return Ok(None);
    }
    let t_max = m_top - r_i;
    let iorder = m_top + 2;
    let base = tau_coeffs(r, s, iorder)?;
    let jj = j_invariant(iorder)?;
    let mut gs: Vec<QSeries> = vec![base];
    for _ in 1..=t_max {
        let next = gs.last().expect("nonempty").mul(&jj);
        gs.push(next);
    }
    let mut remaining = pp.to_series(2);
    let mut f_of_j = vec![Rational::new(); t_max as usize + 1];
    for t in (0..=t_max).rev() {
        let c = remaining.coeff(-(r_i + t));
        if c.cmp0() != Ordering::Equal {
            remaining = remaining.sub(&gs[t as usize].mul_scalar(&c));
            f_of_j[t as usize] = c;
        }
    }
    for j in 1..r_i {
        if remaining.coeff(-j).cmp0() != Ordering::Equal {
            return Ok(None);
        }
    }
    weakly_holomorphic_level1(k, &f_of_j, order).map(Some)
}

/// Exact rational certificate: a relation holds iff
/// Sum_m alpha_m a_g(m) / m^{k-1} = 0 for every g in the echelon basis of
/// S_k(1).  Level 1 only; vacuously true when S_k(1) = 0.
pub fn dual_pairing_oracle(rel: &Relation) -> Result<bool> {
    if rel.level != 1 {
        return Err(Error::InvalidArgument(
            "the exact pairing oracle covers level 1 only".into(),
        ));
    }
    let k = rel.weight;
    let (_, r) = admissible_decomposition(k)?;
    let d = r as i64 - 1;
    let m_max = *rel
        .coefficients
        .keys()
        .next_back()
        .expect("relations are nonempty") as i64;
    let basis = cusp_basis_level1(k, m_max.max(d))?;
    for g in &basis {
        let mut acc = Rational::new();
        for (&m, alpha) in &rel.coefficients {
            let scale = Rational::from(Integer::from(m).pow((k - 1) as u32));
            acc += alpha.clone() * g.coeff(m as i64) / scale;
        }
        if acc.cmp0() != Ordering::Equal {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Outcome of a numeric check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// Residual within the rigorous error budget.
    Consistent,
    /// Residual more than 10x the budget: the identity is false.
    Refuted,
    /// Between the two, or the budget itself was unreachable.
    Inconclusive,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Consistent => "consistent",
            Verdict::Refuted => "refuted",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

/// One coefficient column n: the residual |Sum_m alpha_m a(m,k,N;n)| against
/// the budget Sum_m |alpha_m| (tail_m + rounding_m).
#[derive(Clone, Debug)]
pub struct ResidualEntry {
    pub n: u64,
    pub residual: f64,
    /// Magnitude of the largest single term |alpha_m a(m,k,N;n)| in the
    /// column, for judging how much cancellation the residual represents.
    pub largest: f64,
    pub budget: f64,
    pub verdict: Verdict,
    pub note: Option<String>,
}

/// Per-column verdicts plus the overall one (refuted if any column refutes,
/// else inconclusive if any column is, else consistent).
#[derive(Clone, Debug)]
pub struct VerificationReport {
    pub relation: Relation,
    pub entries: Vec<ResidualEntry>,
    pub verdict: Verdict,
}

impl VerificationReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "relation": self.relation.to_json(),
            "verdict": self.verdict.as_str(),
            "entries": self.entries.iter().map(|e| serde_json::json!({
                "n": e.n,
                "residual": e.residual,
                "largest_term": e.largest,
                "budget": e.budget,
                "verdict": e.verdict.as_str(),
                "note": e.note,
            })).collect::<Vec<_>>(),
        })
    }
}

/// Recompute the coefficient columns n = 1..n_max of Sum alpha_m P(m,k,N)
/// with certified errors and compare the residuals against the budgets.
/// The target is split over the terms as tau_m = target / (S max(1,|alpha_m|))
/// after content normalization, so each column's budget stays near `target`.
/// Columns run in parallel; within a column the summation is deterministic.
pub fn verify_relation_numeric(
    rel: &Relation,
    n_max: u64,
    target_error: f64,
    cfg: &NumericConfig,
) -> Result<VerificationReport> {
    if n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be >= 1".into()));
    }
    if !(target_error > 0.0) || !target_error.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "target error must be a positive finite number, got {target_error}"
        )));
    }
    let norm = rel.content_normalized();
    let w = WeightProfile::new(2 * norm.weight, norm.level)?;
    let terms: Vec<(u64, Rational)> = norm
        .coefficients
        .iter()
        .map(|(&m, a)| (m, a.clone()))
        .collect();
    let s_count = terms.len() as f64;
    let entries: Vec<ResidualEntry> = (1..=n_max)
        .into_par_iter()
        .map(|n| -> Result<ResidualEntry> {
            let mut acc = Float::with_val(256, 0);
            let mut budget = 0.0f64;
            let mut largest = 0.0f64;
            let mut note = None;
            for (m, alpha) in &terms {
                let alpha_f = fup(alpha.to_f64().abs());
                let tau_m = target_error / (s_count * alpha_f.max(1.0));
                match classical_coeff(&w, *m, n, tau_m, cfg) {
                    Ok(r) => {
                        let term = Float::with_val(256, alpha) * &r.value.re;
                        largest = largest.max(term.to_f64().abs());
                        acc += term;
                        budget = add_up(budget, mul_up(alpha_f, r.total_bound()));
                    }
                    Err(Error::UnreachableTolerance(msg)) => {
                        note = Some(format!("term m = {m}: {msg}"));
                        break;
                    }
                    Err(e) => return Err(e),
                }
            }
            if let Some(msg) = note {
                return Ok(ResidualEntry {
                    n,
                    residual: f64::NAN,
                    largest: f64::NAN,
                    budget: f64::INFINITY,
                    verdict: Verdict::Inconclusive,
                    note: Some(msg),
                });
            }
            let residual = acc.to_f64().abs();
            let budget = fup(budget * 1.000_000_1);
            let verdict = if residual <= budget {
                Verdict::Consistent
            } else if residual > 10.0 * budget {
                Verdict::Refuted
            } else {
                Verdict::Inconclusive
            };
            Ok(ResidualEntry {
                n,
                residual,
                largest,
                budget,
                verdict,
                note: None,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let verdict = if entries.iter().any(|e| e.verdict == Verdict::Refuted) {
        Verdict::Refuted
    } else if entries.iter().any(|e| e.verdict == Verdict::Inconclusive) {
        Verdict::Inconclusive
    } else {
        Verdict::Consistent
    };
    Ok(VerificationReport {
        relation: norm,
        entries,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(k: i64, pairs: &[(u64, i64)]) -> Relation {
        let coefficients = pairs
            .iter()
            .map(|&(m, a)| (m, Rational::from(a)))
            .collect();
        Relation::new(k, 1, coefficients, Provenance::User).unwrap()
    }

    #[test]
    fn corollary_relation_for_weight_24_is_exact() {
        let r = corollary_relation(24).unwrap();
        assert_eq!(r.provenance, Provenance::Corollary);
        assert_eq!(r.weight, 24);
        assert_eq!(r.level, 1);
        let expect: BTreeMap<u64, Rational> = [
            (1u64, Rational::from(-195660)),
            (2, Rational::from(48) * Rational::from(Integer::from(2).pow(23u32))),
            (3, Rational::from(Integer::from(3).pow(23u32))),
        ]
        .into_iter()
        .collect();
        assert_eq!(r.coefficients, expect);
        assert_eq!(r.coefficients[&2], Rational::from(402653184u64));
        assert_eq!(
            r.coefficients[&3],
            Rational::from(94143178827u64),
            "3^23 tops the relation"
        );
        assert!(dual_pairing_oracle(&r).unwrap());
    }

    #[test]
    fn corollary_relation_for_weight_12_pairs_with_the_discriminant_form() {
        // E_14/Delta^2 = q^{-2} + 24 q^{-1} + ..., so the relation is
        // 24 P(1,12,1) + 2^11 P(2,12,1) = 0; pairing against the cusp form
        // q - 24 q^2 + ... gives 24*1 + 2048*(-24)/2^11 = 0 exactly.
        let r = corollary_relation(12).unwrap();
        assert_eq!(r.coefficients.len(), 2);
        assert_eq!(r.coefficients[&1], Rational::from(24));
        assert_eq!(r.coefficients[&2], Rational::from(2048));
        assert!(dual_pairing_oracle(&r).unwrap());
    }

    #[test]
    fn single_series_relations_exist_exactly_when_the_cusp_space_vanishes() {
        // d = 0 for k in {4,6,8,10,14}: P(1,k,1) = 0 is a (true) relation.
        for k in [4i64, 6, 8, 10, 14] {
            let r = corollary_relation(k).unwrap();
            assert_eq!(r.coefficients.len(), 1, "k = {k}");
            assert_eq!(r.coefficients[&1], Rational::from(1), "k = {k}");
            assert!(dual_pairing_oracle(&r).unwrap(), "k = {k}: vacuous pairing");
        }
        // d = 1 for k = 26: the two-term relation has 2-adic coefficient 2^25.
        let r = corollary_relation(26).unwrap();
        assert_eq!(r.coefficients[&1], Rational::from(48));
        assert_eq!(
            r.coefficients[&2],
            Rational::from(Integer::from(2).pow(25u32))
        );
        assert!(dual_pairing_oracle(&r).unwrap());
    }

    #[test]
    fn finder_reproduces_the_corollary_generator_bit_for_bit() {
        for k in [12i64, 16, 20, 24, 26] {
            let c = corollary_relation(k).unwrap();
            let found = find_relations(k, *c.coefficients.keys().next_back().unwrap()).unwrap();
            assert_eq!(found.len(), 1, "exactly the generator at m_max = d+1");
            assert_eq!(found[0].coefficients, c.coefficients, "k = {k}");
            assert_eq!(found[0].weight, c.weight);
        }
    }

    #[test]
    fn finder_produces_reduced_generators_up_to_m_max() {
        // k = 24: d = 2, so relations exist for m0 = 3, 4, 5; each reduced
        // generator involves only P(1), P(2), and P(m0), is monic at m0
        // (times m0^23), and passes the exact pairing oracle.
        let rels = find_relations(24, 5).unwrap();
        assert_eq!(rels.len(), 3);
        for (i, r) in rels.iter().enumerate() {
            let m0 = 3 + i as u64;
            let top = r.coefficients.keys().next_back().copied().unwrap();
            assert_eq!(top, m0);
            assert_eq!(
                r.coefficients[&m0],
                Rational::from(Integer::from(m0).pow(23u32)),
                "leading normalization m0^(k-1)"
            );
            for &m in r.coefficients.keys() {
                assert!(
                    m <= 2 || m == m0,
                    "reduced generator touches only P(1), P(2), P({m0}); found P({m})"
                );
            }
            assert!(dual_pairing_oracle(r).unwrap(), "m0 = {m0}");
        }
        assert!(find_relations(24, 1).unwrap().is_empty());
        assert!(find_relations(24, 2).unwrap().is_empty());
        assert_eq!(find_relations(16, 2).unwrap().len(), 1);
    }

    #[test]
    fn oracle_rejects_perturbed_relations() {
        let mut r = corollary_relation(24).unwrap();
        assert!(dual_pairing_oracle(&r).unwrap());
        r.coefficients
            .entry(1)
            .and_modify(|a| *a += Rational::from(1));
        assert!(!dual_pairing_oracle(&r).unwrap());
        // Any single P(m) with m <= d cannot vanish: S_24 has a form with
        // nonzero m-th coefficient.
        for m in 1..=2u64 {
            assert!(!dual_pairing_oracle(&rel(24, &[(m, 1)])).unwrap());
        }
    }

    #[test]
    fn solver_realizes_exactly_the_unobstructed_principal_parts() {
        // The corollary principal part realizes as E_14/Delta^3 itself.
        let c = corollary_relation(24).unwrap();
        let pp = c.principal_part();
        assert_eq!(pp.coefficient(3), Rational::from(1));
        assert_eq!(pp.coefficient(2), Rational::from(48));
        assert_eq!(pp.coefficient(1), Rational::from(-195660));
        let f = solve_principal_part_level1(24, &pp, 6).unwrap().unwrap();
        assert_eq!(f, tau_coeffs(3, 14, 6).unwrap());
        assert_eq!(PrincipalPart::from_series(&f).unwrap(), pp);

        // Dropping the forced lower terms obstructs the request.
        let mut only_top = PrincipalPart::new();
        only_top.set(3, Rational::from(1));
        assert!(solve_principal_part_level1(24, &only_top, 6)
            .unwrap()
            .is_none());

        // Poles of order <= d are never realizable.
        for m in 1..=2u64 {
            let mut shallow = PrincipalPart::new();
            shallow.set(m, Rational::from(1));
            assert!(solve_principal_part_level1(24, &shallow, 6)
                .unwrap()
                .is_none());
        }

        // The empty principal part realizes as zero.
        let z = solve_principal_part_level1(24, &PrincipalPart::new(), 4)
            .unwrap()
            .unwrap();
        assert!(z.is_zero());
    }

    #[test]
    fn solver_handles_gaps_and_deep_poles() {
        // Request the principal part of a reduced generator with a gap
        // (poles at 5, 2, 1 but not 3, 4) and round-trip it.
        let rels = find_relations(24, 5).unwrap();
        let pp = rels[2].principal_part();
        assert_eq!(*pp.iter().map(|(m, _)| m).max().unwrap(), 5);
        let f = solve_principal_part_level1(24, &pp, 3).unwrap().unwrap();
        assert_eq!(PrincipalPart::from_series(&f).unwrap(), pp);
        // Perturbing a forced coefficient kills realizability.
        let mut wrong = pp.clone();
        wrong.set(1, pp.coefficient(1) + Rational::from(1));
        assert!(solve_principal_part_level1(24, &wrong, 3).unwrap().is_none());
    }

    #[test]
    fn relation_json_round_trips() {
        let mut coefficients = BTreeMap::new();
        coefficients.insert(1, Rational::from((-3, 2)));
        coefficients.insert(4, Rational::from(7));
        let r = Relation::new(16, 1, coefficients, Provenance::Solver).unwrap();
        let back = Relation::from_json(&r.to_json()).unwrap();
        assert_eq!(back, r);
        let c = corollary_relation(24).unwrap();
        assert_eq!(Relation::from_json(&c.to_json()).unwrap(), c);

        assert!(Relation::from_json(&serde_json::json!({
            "k": "15/2", "N": 1, "coeffs": {"1": "1"}
        }))
        .is_err());
        assert!(Relation::from_json(&serde_json::json!({
            "k": "24", "N": 1, "coeffs": {"0": "1"}
        }))
        .is_err());
        assert!(Relation::from_json(&serde_json::json!({
            "k": "24", "N": 1, "coeffs": {"1": "1/0"}
        }))
        .is_err());
        // Missing provenance defaults to user input.
        let u = Relation::from_json(&serde_json::json!({
            "k": "24", "N": 1, "coeffs": {"2": "5"}
        }))
        .unwrap();
        assert_eq!(u.provenance, Provenance::User);
    }

    #[test]
    fn content_normalization_is_primitive_and_sign_fixed() {
        let mut coefficients = BTreeMap::new();
        coefficients.insert(1, Rational::from((1, 2)));
        coefficients.insert(2, Rational::from((-3, 4)));
        let r = Relation::new(12, 1, coefficients, Provenance::User).unwrap();
        let n = r.content_normalized();
        assert_eq!(n.coefficients[&1], Rational::from(-2));
        assert_eq!(n.coefficients[&2], Rational::from(3));
        // The weight-24 generator has content 3; normalization divides it
        // out while preserving proportionality.
        let c = corollary_relation(24).unwrap();
        let p = c.content_normalized();
        for (m, alpha) in &p.coefficients {
            assert!(alpha.is_integer());
            assert_eq!(
                Rational::from(alpha * Rational::from(3)),
                c.coefficients[m]
            );
        }
        let mut content = Integer::new();
        for alpha in p.coefficients.values() {
            content.gcd_mut(alpha.numer());
        }
        assert_eq!(content, 1u32);
    }

    #[test]
    fn numeric_verification_confirms_true_relations() {
        let cfg = NumericConfig::default();
        let report =
            verify_relation_numeric(&corollary_relation(12).unwrap(), 4, 1e-8, &cfg).unwrap();
        assert_eq!(report.verdict, Verdict::Consistent);
        assert_eq!(report.entries.len(), 4);
        for e in &report.entries {
            assert_eq!(e.verdict, Verdict::Consistent);
            assert!(e.residual <= e.budget);
            assert!(e.budget <= 1e-7, "budget {:.3e} stays near target", e.budget);
        }
        let report =
            verify_relation_numeric(&corollary_relation(24).unwrap(), 2, 1e-9, &cfg).unwrap();
        assert_eq!(report.verdict, Verdict::Consistent);
    }

    #[test]
    fn numeric_verification_refutes_false_relations() {
        // P(1,24,1) = 0 is false: the n = 1 column is ~1, the budget ~1e-9.
        let cfg = NumericConfig::default();
        let report = verify_relation_numeric(&rel(24, &[(1, 1)]), 2, 1e-9, &cfg).unwrap();
        assert_eq!(report.verdict, Verdict::Refuted);
        assert!(report.entries.iter().any(|e| e.verdict == Verdict::Refuted));
        // A wrong ratio between two honest series is also caught.
        let report = verify_relation_numeric(&rel(12, &[(1, 25), (2, 2048)]), 2, 1e-8, &cfg).unwrap();
        assert_eq!(report.verdict, Verdict::Refuted);
    }

    #[test]
    fn numeric_verification_reports_unreachable_budgets_as_inconclusive() {
        let cfg = NumericConfig {
            precision_bits: 64,
            ..NumericConfig::default()
        };
        let report =
            verify_relation_numeric(&corollary_relation(12).unwrap(), 1, 1e-18, &cfg).unwrap();
        assert_eq!(report.verdict, Verdict::Inconclusive);
        assert!(report.entries[0].note.is_some());
        assert!(report.entries[0].residual.is_nan());
    }

    #[test]
    fn verification_is_scale_invariant() {
        let cfg = NumericConfig::default();
        let base = corollary_relation(12).unwrap();
        let mut scaled_coeffs = base.coefficients.clone();
        for a in scaled_coeffs.values_mut() {
            *a *= Rational::from((-7, 3));
        }
        let scaled = Relation::new(12, 1, scaled_coeffs, Provenance::User).unwrap();
        let r1 = verify_relation_numeric(&base, 3, 1e-8, &cfg).unwrap();
        let r2 = verify_relation_numeric(&scaled, 3, 1e-8, &cfg).unwrap();
        for (a, b) in r1.entries.iter().zip(&r2.entries) {
            assert_eq!(a.residual.to_bits(), b.residual.to_bits());
            assert_eq!(a.budget.to_bits(), b.budget.to_bits());
        }
    }

    #[test]
    fn invalid_relations_are_rejected() {
        assert!(Relation::new(13, 1, BTreeMap::new(), Provenance::User).is_err());
        assert!(Relation::new(2, 1, BTreeMap::new(), Provenance::User).is_err());
        let mut zeros = BTreeMap::new();
        zeros.insert(1u64, Rational::new());
        assert!(Relation::new(24, 1, zeros, Provenance::User).is_err());
        let mut bad_index = BTreeMap::new();
        bad_index.insert(0u64, Rational::from(1));
        assert!(Relation::new(24, 1, bad_index, Provenance::User).is_err());
        assert!(corollary_relation(2).is_err());
        assert!(corollary_relation(13).is_err());
        let r = rel(24, &[(1, 1)]);
        assert!(verify_relation_numeric(&r, 0, 1e-9, &NumericConfig::default()).is_err());
        assert!(verify_relation_numeric(&r, 1, -1.0, &NumericConfig::default()).is_err());
        let mut off_level = rel(24, &[(1, 1)]);
        off_level.level = 2;
        assert!(dual_pairing_oracle(&off_level).is_err());
    }
}
