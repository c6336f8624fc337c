//! Mechanical extraction of good pins with checkable certificates, and numerical audits.

pub mod audit;
mod check;
pub mod exact;
mod extract;
pub mod json;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::FieldCtx;
use crate::plane::{PlanePoint, PointSet};
use crate::trees::{BoundCase, BoundNode, SplitStrategy, TreeError, TreeSpec, DEFAULT_BUDGET};

pub use audit::{
    audit_bisector_bound, audit_incidence_bound, audit_k_constant, audit_m_condition, audit_triple_bound, m_value,
    AuditError, AuditId, AuditReport, Restriction,
};
pub use check::{check_certificate, verify_certificate, CheckFailure};
pub use exact::{Interval, Surd};
pub use extract::{certify_tree, greedy_blocks, popular_pins};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertifyError {
    #[error("empty input set")]
    EmptyInput,
    #[error("regime mismatch: {0}")]
    RegimeMismatch(String),
    #[error("block size {size} outside 1..={available}")]
    BadBlockSize { size: usize, available: usize },
    #[error("invalid parameters: {0}")]
    BadParams(String),
    #[error(transparent)]
    Tree(#[from] TreeError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    MediumPrime,
    LargePrime,
    LargeQ,
    Arbitrary,
}

impl Regime {
    pub const ALL: [Regime; 4] = [Regime::MediumPrime, Regime::LargePrime, Regime::LargeQ, Regime::Arbitrary];

    pub fn name(self) -> &'static str {
        match self {
            Regime::MediumPrime => "medium_prime",
            Regime::LargePrime => "large_prime",
            Regime::LargeQ => "large_q",
            Regime::Arbitrary => "arbitrary",
        }
    }

    fn needs_prime_field(self) -> bool {
        matches!(self, Regime::MediumPrime | Regime::LargePrime)
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Regime {
    type Err = CertifyError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Regime::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| CertifyError::BadParams(format!("unknown regime {s:?}")))
    }
}

/// Pin threshold used at each extraction step.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum ThresholdRule {
    /// `p/129` (medium prime), `p/24` (large prime), `q/24` (large q) or
    /// `n^(2/3) / (8(K+1))` with `n` the compared pool size (arbitrary).
    #[default]
    Paper,
    /// The same rational threshold everywhere.
    Fixed(BigRational),
}

impl fmt::Display for ThresholdRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ThresholdRule::Paper => f.write_str("paper"),
            ThresholdRule::Fixed(t) => write!(f, "fixed:{t}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertifyParams {
    pub regime: Regime,
    /// Constant of the `K |E|^(7/3)` triple bound; at least 4.
    pub k_const: BigRational,
    pub threshold: ThresholdRule,
    pub split: SplitStrategy,
    pub enumeration_budget: u64,
    /// Cut oversized inputs down to `floor(char^(4/3))` points before extracting.
    pub range_split: bool,
}

impl CertifyParams {
    pub fn new(regime: Regime) -> Self {
        CertifyParams {
            regime,
            k_const: exact::int(4),
            threshold: ThresholdRule::Paper,
            split: SplitStrategy::default(),
            enumeration_budget: DEFAULT_BUDGET,
            range_split: false,
        }
    }

    pub fn with_threshold(mut self, t: BigRational) -> Self {
        self.threshold = ThresholdRule::Fixed(t);
        self
    }

    pub fn validate(&self) -> Result<(), CertifyError> {
        if self.k_const < exact::int(4) {
            return Err(CertifyError::BadParams(format!("K = {} is below 4", self.k_const)));
        }
        if let ThresholdRule::Fixed(t) = &self.threshold {
            if *t < exact::int(0) {
                return Err(CertifyError::BadParams(format!("negative threshold {t}")));
            }
        }
        Ok(())
    }

    /// Threshold against a compared pool of `n` points.
    pub fn threshold_for(&self, ctx: &FieldCtx, n: usize) -> Surd {
        match &self.threshold {
            ThresholdRule::Fixed(t) => Surd::rational(t.clone()),
            ThresholdRule::Paper => match self.regime {
                Regime::MediumPrime => Surd::rational(exact::int(ctx.p() as u64) / exact::int(129)),
                Regime::LargePrime => Surd::rational(exact::int(ctx.p() as u64) / exact::int(24)),
                Regime::LargeQ => Surd::rational(exact::int(ctx.q() as u64) / exact::int(24)),
                Regime::Arbitrary => {
                    let coef = exact::int(1) / (exact::int(8) * (&self.k_const + exact::int(1)));
                    Surd::power(coef, n as u64, 2, 3)
                }
            },
        }
    }
}

/// Where `|E|` sits relative to the regime's size windows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SizeRange {
    /// Below `5 * 2^(16k) * p^(5/4)`.
    Small,
    /// `5 * 2^(16k) * p^(5/4) <= n <= p^(4/3)`.
    Medium,
    /// `p^(4/3) < n < 4 * 2^(16k) * p^(4/3)`.
    Gap,
    /// `n >= 4 * 2^(16k) * p^(4/3)`.
    Large,
}

impl SizeRange {
    pub fn classify(n: usize, char_or_q: u64, k: usize) -> SizeRange {
        let n = BigInt::from(n);
        let c = BigInt::from(char_or_q);
        let two16k = BigInt::from(2u32).pow(16 * k as u32);
        if n.pow(3) >= (BigInt::from(4) * &two16k).pow(3) * c.pow(4) {
            SizeRange::Large
        } else if n.pow(3) > c.pow(4) {
            SizeRange::Gap
        } else if (BigInt::from(5) * two16k).pow(4) * c.pow(5) <= n.pow(4) {
            SizeRange::Medium
        } else {
            SizeRange::Small
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SizeRange::Small => "small",
            SizeRange::Medium => "medium",
            SizeRange::Gap => "gap",
            SizeRange::Large => "large",
        }
    }
}

/// One extraction step. Nodes are stored flat in pre-order; children point at parents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtractionNode {
    pub id: usize,
    pub parent: Option<usize>,
    pub case: BoundCase,
    pub tree: TreeSpec,
    /// Candidate pins.
    pub pins_in: PointSet,
    /// Points the tree's other vertices may use.
    pub pool: PointSet,
    /// `E_1, E_2` (split case).
    pub pin_halves: Vec<PointSet>,
    /// `F_1, F_2` (deg1 and split cases).
    pub pool_halves: Vec<PointSet>,
    /// `F_2'` (deg1), or one `F_2'` per half of the pins (split).
    pub reduced_pools: Vec<PointSet>,
    pub blocks: Vec<PointSet>,
    pub s: usize,
    /// Size of the pool the threshold was compared against.
    pub threshold_n: Option<usize>,
    pub threshold: Option<Surd>,
    pub pins_out: PointSet,
    /// Large-regime lemma premise `|pool| >= 4c, |cand| >= 8c, |cand||pool|^2 >= 64c^4`.
    pub lemma_premise: Option<bool>,
    /// Smallest lower bound over `pins_out` for this node's tree and pool.
    pub sub_bound: Option<u64>,
}

impl ExtractionNode {
    pub fn children<'a>(&self, all: &'a [ExtractionNode]) -> Vec<&'a ExtractionNode> {
        all.iter().filter(|n| n.parent == Some(self.id)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PinBound {
    pub pin: PlanePoint,
    pub bound: u64,
    pub trace: BoundNode,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub regime: Regime,
    /// Regime whose thresholds were applied, after any range dispatch.
    pub effective_regime: Regime,
    pub params: CertifyParams,
    pub tree: TreeSpec,
    pub pins: PointSet,
    pub per_pin_bound: u64,
    pub pin_bounds: Vec<PinBound>,
    pub recursion: Vec<ExtractionNode>,
    pub sound: bool,
    pub hypothesis_in_range: bool,
    pub size_range: SizeRange,
}

impl Certificate {
    pub fn root(&self) -> &ExtractionNode {
        &self.recursion[0]
    }
}

/// The regime's size hypothesis for `|E| = n`, decided by integer powers.
pub fn hypothesis_in_range(regime: Regime, e: &PointSet, f: &PointSet, k: usize, k_const: &BigRational) -> bool {
    let ctx = e.ctx();
    let n = e.len();
    match regime {
        Regime::MediumPrime => {
            ctx.is_prime_field() && SizeRange::classify(n, ctx.p() as u64, k) == SizeRange::Medium
        }
        Regime::LargePrime => ctx.is_prime_field() && SizeRange::classify(n, ctx.p() as u64, k) == SizeRange::Large,
        Regime::LargeQ => SizeRange::classify(n, ctx.q() as u64, k) == SizeRange::Large,
        Regime::Arbitrary => {
            audit::cube_le_fourth(n as u64, ctx.p() as u64)
                && audit_m_condition(e, f, k as u32, k_const).holds
        }
    }
}
