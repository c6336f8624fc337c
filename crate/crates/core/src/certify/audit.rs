//! Numerical audits: evaluate each inequality's two sides on a concrete instance.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::exact::{decimal, int, rat, Interval, Surd};
use crate::plane::{incidences, max_isotropic_line_count, LineMultiset, PointSet};
use crate::stats::{bisector_energy, isosceles_triples, BisectorVariant, TripleMode};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AuditError {
    #[error("audit {0} needs a prime field")]
    NotPrimeField(AuditId),
    #[error("|E| = {n} exceeds char^(4/3) for char = {p}")]
    RestrictionViolated { n: usize, p: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AuditId {
    /// `T*(E) <= |E|^3/p + 5 p^(2/3) |E|^(5/3) + 5 p^(1/4) |E|^2`.
    TripleBound,
    /// `Q(E) <= 4|E|^4/p^2 + 10 p |E|^2`.
    BisectorBound,
    /// `I(F, L) <= |F||L|/p + p^(1/2) |F|^(1/2) (sum m^2)^(1/2)`.
    IncidenceBound,
    /// `T*(E) <= K |E|^(7/3)`.
    KConstant,
    /// Max isotropic-line occupancy against `M`.
    MCondition,
}

impl AuditId {
    pub const ALL: [AuditId; 5] = [
        AuditId::TripleBound,
        AuditId::BisectorBound,
        AuditId::IncidenceBound,
        AuditId::KConstant,
        AuditId::MCondition,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AuditId::TripleBound => "triple-bound",
            AuditId::BisectorBound => "bisector-bound",
            AuditId::IncidenceBound => "incidence-bound",
            AuditId::KConstant => "k-constant",
            AuditId::MCondition => "m-condition",
        }
    }
}

impl fmt::Display for AuditId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuditReport {
    pub id: AuditId,
    pub lhs: BigInt,
    /// Guaranteed enclosure of the right-hand side.
    pub rhs: Interval,
    pub holds: bool,
    /// `|lhs - rhs| <= 1e-9 * rhs`.
    pub borderline: bool,
    pub premise_in_range: bool,
    pub witness: Option<String>,
    /// Further named quantities (ratios, sub-conditions).
    pub details: Vec<(String, String)>,
}

impl AuditReport {
    fn new(id: AuditId, lhs: u128, rhs: Interval, premise_in_range: bool, instance: impl FnOnce() -> String) -> Self {
        let lhs_q = BigRational::from_integer(BigInt::from(lhs));
        // lhs <= rhs up to the enclosure width
        let holds = lhs_q <= rhs.hi;
        let tol = rhs.midpoint().abs() * rat(1, 1_000_000_000);
        let borderline = (&lhs_q - rhs.midpoint()).abs() <= tol;
        let witness = (!holds).then(|| format!("{}: lhs {} > rhs {}", instance(), lhs, rhs.decimal(6)));
        AuditReport {
            id,
            lhs: BigInt::from(lhs),
            rhs,
            holds,
            borderline,
            premise_in_range,
            witness,
            details: Vec::new(),
        }
    }

    pub fn rhs_decimal(&self) -> String {
        self.rhs.decimal(6)
    }

    pub fn detail(&self, key: &str) -> Option<&str> {
        self.details.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

fn describe(set: &PointSet) -> String {
    let ctx = set.ctx();
    let pts: Vec<String> = set.iter().map(|p| p.format(ctx)).collect();
    format!("{} points over F_{} [{}]", set.len(), ctx.q(), pts.join(" "))
}

fn require_prime(set: &PointSet, id: AuditId) -> Result<u64, AuditError> {
    if set.ctx().is_prime_field() {
        Ok(set.ctx().p() as u64)
    } else {
        Err(AuditError::NotPrimeField(id))
    }
}

/// `x^3 <= y^4`, the exact form of `x <= y^(4/3)`.
pub fn cube_le_fourth(x: u64, y: u64) -> bool {
    BigInt::from(x).pow(3) <= BigInt::from(y).pow(4)
}

/// `5 p^(5/4) <= n <= p^(4/3)`, as `5^4 p^5 <= n^4` and `n^3 <= p^4`.
pub fn triple_premise(n: u64, p: u64) -> bool {
    BigInt::from(625u32) * BigInt::from(p).pow(5) <= BigInt::from(n).pow(4) && cube_le_fourth(n, p)
}

pub fn audit_triple_bound(set: &PointSet) -> Result<AuditReport, AuditError> {
    let p = require_prime(set, AuditId::TripleBound)?;
    let n = set.len() as u64;
    let lhs = isosceles_triples(set, set, TripleMode::Paper).value;
    let rhs: Interval = [
        Surd::rational(int(n.pow(3)) / int(p)).interval(),
        // 5 (p^2 n^5)^(1/3)
        Surd { coef: int(5), base: (p * p).into(), num: 1, den: 3 }.interval_times(n, 5, 3),
        // 5 (p n^8)^(1/4)
        Surd { coef: int(5), base: p.into(), num: 1, den: 4 }.interval_times(n, 2, 1),
    ]
    .into_iter()
    .sum();
    Ok(AuditReport::new(AuditId::TripleBound, lhs as u128, rhs, triple_premise(n, p), || describe(set)))
}

impl Surd {
    /// Enclosure of `self * n^(a/b)` with both radicals combined under one root.
    fn interval_times(&self, n: u64, a: u32, b: u32) -> Interval {
        let den = num_integer::lcm(self.den, b);
        let base = self.base.pow(self.num * (den / self.den)) * num_bigint::BigUint::from(n).pow(a * (den / b));
        Surd { coef: self.coef.clone(), base, num: 1, den }.interval()
    }
}

pub fn audit_bisector_bound(set: &PointSet) -> Result<AuditReport, AuditError> {
    let p = require_prime(set, AuditId::BisectorBound)?;
    let n = set.len() as u64;
    let lhs = bisector_energy(set, BisectorVariant::Paper);
    let rhs = int(4 * n.pow(4)) / int(p * p) + int(10 * p * n * n);
    let mut report = AuditReport::new(AuditId::BisectorBound, lhs as u128, Interval::exact(rhs), true, || describe(set));
    report
        .details
        .push(("symmetric_q".into(), bisector_energy(set, BisectorVariant::Symmetric).to_string()));
    Ok(report)
}

/// Incidence bound, decided exactly by `(p I - |F||L|)^2 <= p^3 |F| sum m^2` when the
/// left side is positive.
pub fn audit_incidence_bound(points: &PointSet, lines: &LineMultiset) -> Result<AuditReport, AuditError> {
    let p = require_prime(points, AuditId::IncidenceBound)?;
    let f = points.len() as u128;
    let total = lines.total() as u128;
    let sq = lines.square_sum();
    let lhs = incidences(points, lines) as u128;
    let rhs: Interval = [
        Interval::exact(BigRational::new(BigInt::from(f * total), BigInt::from(p))),
        Surd { coef: int(1), base: (BigInt::from(p) * BigInt::from(f) * BigInt::from(sq)).to_biguint().unwrap(), num: 1, den: 2 }
            .interval(),
    ]
    .into_iter()
    .sum();
    let mut report = AuditReport::new(AuditId::IncidenceBound, lhs, rhs, true, || {
        format!("{} with {} lines ({} distinct)", describe(points), total, lines.distinct())
    });
    let excess = BigInt::from(p) * BigInt::from(lhs) - BigInt::from(f * total);
    let exact_holds = !excess.is_positive()
        || excess.pow(2) <= BigInt::from(p).pow(3) * BigInt::from(f) * BigInt::from(sq);
    report.holds = exact_holds;
    if exact_holds {
        report.witness = None;
    } else if report.witness.is_none() {
        report.witness = Some(format!("{}: lhs {} exceeds bound", describe(points), lhs));
    }
    Ok(report)
}

/// What to do when `|E| <= char^(4/3)` fails.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Restriction {
    /// Return [`AuditError::RestrictionViolated`].
    #[default]
    Enforce,
    /// Evaluate anyway and record `premise_in_range = false`.
    Record,
}

/// `T*(E) <= K |E|^(7/3)`; reports `K' = T* / |E|^(7/3)` under the `k_prime` detail.
pub fn audit_k_constant(set: &PointSet, k: &BigRational, restriction: Restriction) -> Result<AuditReport, AuditError> {
    let n = set.len() as u64;
    let p = set.ctx().p();
    let in_range = cube_le_fourth(n, p as u64);
    if !in_range && restriction == Restriction::Enforce {
        return Err(AuditError::RestrictionViolated { n: n as usize, p });
    }
    let lhs = isosceles_triples(set, set, TripleMode::Paper).value;
    let rhs = Surd::power(k.clone(), n, 7, 3);
    let mut report = AuditReport::new(AuditId::KConstant, lhs as u128, rhs.interval(), in_range, || describe(set));
    // exact decision: T*^3 <= K^3 n^7
    report.holds = Surd::integer(lhs).cmp_exact(&rhs) != Ordering::Greater;
    if report.holds {
        report.witness = None;
    }
    let k_prime = if n == 0 {
        Interval::exact(int(0))
    } else {
        let denom = Surd::power(BigRational::one(), n, 7, 3).interval();
        let t = int(lhs);
        Interval { lo: &t / &denom.hi, hi: &t / &denom.lo }
    };
    report.details.push(("k_prime".into(), k_prime.decimal(9)));
    Ok(report)
}

/// `M = 4^-1 (16K)^-(k-1) floor(n/8)^((2/3)^(k-1))`.
pub fn m_value(n: usize, k: u32, big_k: &BigRational) -> Surd {
    assert!(k >= 1);
    let sixteen_k = big_k * int(16);
    let coef = BigRational::one() / (int(4) * num_traits::pow(sixteen_k, (k - 1) as usize));
    Surd::power(coef, (n / 8) as u64, 2u32.pow(k - 1), 3u32.pow(k - 1))
}

/// Isotropic-line occupancy of `E cup F` against `M`, plus the inheritance conditions
/// for half-size pools: `M(k-1, floor(|F|/2)) >= M(k, |F|)` and, for each split
/// `k = k1 + k2`, `M(k2, floor(|F|/2)) >= M(k, |F|)`.
pub fn audit_m_condition(e: &PointSet, f: &PointSet, k: u32, big_k: &BigRational) -> AuditReport {
    let lhs = max_isotropic_line_count(&e.union(f)) as u64;
    let m = m_value(f.len(), k, big_k);
    let p = e.ctx().p() as u64;
    let premise = e.len() == f.len() && cube_le_fourth(e.len() as u64, p);
    let mut report = AuditReport::new(AuditId::MCondition, lhs as u128, m.interval(), premise, || {
        format!("E: {}; F: {}", describe(e), describe(f))
    });
    report.holds = Surd::integer(lhs).cmp_exact(&m) != Ordering::Greater;
    if report.holds {
        report.witness = None;
    }
    report.details.push(("m".into(), m.to_string()));
    let half = f.len() / 2;
    if k >= 2 {
        let ok = m_value(half, k - 1, big_k).cmp_exact(&m) != Ordering::Less;
        report.details.push(("mih".into(), ok.to_string()));
        for k2 in 1..k {
            let ok = m_value(half, k2, big_k).cmp_exact(&m) != Ordering::Less;
            report.details.push((format!("mih2_k2={k2}"), ok.to_string()));
        }
    }
    report
}

pub fn lhs_u64(report: &AuditReport) -> u64 {
    u64::try_from(&report.lhs).unwrap_or(u64::MAX)
}

pub fn rhs_string(report: &AuditReport) -> String {
    decimal(&report.rhs.midpoint(), 6)
}
