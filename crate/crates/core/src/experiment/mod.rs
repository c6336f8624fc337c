//! Seeded experiment sweeps: generate point sets, run statistics, audits and
//! certifications, and export the rows as CSV or JSON.

mod generate;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use num_rational::BigRational;
use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

pub use generate::{generate, sample_indices, GenError, GenKind, GenSpec};

use crate::certify::json::{audit_json, certificate_json, SCHEMA_VERSION};
use crate::certify::{
    audit_bisector_bound, audit_incidence_bound, audit_k_constant, audit_m_condition, audit_triple_bound,
    certify_tree, check_certificate, AuditId, AuditReport, CertifyParams, Regime, Restriction, ThresholdRule,
};
use crate::field::FieldCtx;
use crate::plane::{incidences, LineMultiset, PointSet};
use crate::stats::{bisector_energy, distance_set, isosceles_triples, BisectorVariant, TripleMode};
use crate::trees::{
    count_distinct_pinned_trees, pinned_tree_lower_bound, CountMode, SplitStrategy, TreeSpec, DEFAULT_BUDGET,
};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error("run {run}: {message}")]
    Run { run: u64, message: String },
}

fn config_err(e: impl fmt::Display) -> ExperimentError {
    ExperimentError::Config(e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Statistic {
    /// `T*(F, E, E)`.
    Triples,
    /// `Q(E)`.
    BisectorEnergy,
    /// Incidences between `F` and the nonzero bisectors of `E`.
    Incidences,
    /// `|D(E)|`, zero included.
    DistinctDistances,
    /// Distinct pinned trees at the first point of `E` over `F`.
    Trees,
}

impl Statistic {
    pub fn label(self) -> &'static str {
        match self {
            Statistic::Triples => "T*",
            Statistic::BisectorEnergy => "Q",
            Statistic::Incidences => "I",
            Statistic::DistinctDistances => "distinct_distances",
            Statistic::Trees => "trees",
        }
    }
}

impl FromStr for Statistic {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        serde_json::from_value(Value::String(s.to_string())).map_err(|_| format!("unknown statistic {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(format!("unknown format {s:?}")),
        }
    }
}

fn one() -> u32 {
    1
}
fn one_run() -> u64 {
    1
}
fn four() -> String {
    "4".into()
}
fn budget() -> u64 {
    DEFAULT_BUDGET
}

/// A sweep description, usually read from TOML.
///
/// Run `i` uses seed `seed + i` for `E`; `F` (when `f_set` is given) uses the first
/// SplitMix64 output of that seed. Without `f_set`, `F = E`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub p: u32,
    #[serde(default = "one")]
    pub e: u32,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "one_run")]
    pub runs: u64,
    pub e_set: GenKind,
    #[serde(default)]
    pub f_set: Option<GenKind>,
    #[serde(default)]
    pub statistics: Vec<Statistic>,
    #[serde(default)]
    pub audits: Vec<AuditId>,
    #[serde(default)]
    pub certify: Vec<Regime>,
    #[serde(default)]
    pub tree: Option<String>,
    #[serde(default)]
    pub triple_mode: TripleMode,
    #[serde(default)]
    pub bisector_variant: BisectorVariant,
    #[serde(default)]
    pub count_mode: CountMode,
    #[serde(default = "four")]
    pub k_const: String,
    /// Fixed certification threshold; the regime's own rule when absent.
    #[serde(default)]
    pub threshold: Option<String>,
    #[serde(default)]
    pub split: SplitStrategy,
    #[serde(default = "budget")]
    pub budget: u64,
    #[serde(default)]
    pub format: Format,
    #[serde(default)]
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(p: u32, e: u32, e_set: GenKind) -> Self {
        ExperimentConfig {
            p,
            e,
            seed: 0,
            runs: 1,
            e_set,
            f_set: None,
            statistics: Vec::new(),
            audits: Vec::new(),
            certify: Vec::new(),
            tree: None,
            triple_mode: TripleMode::default(),
            bisector_variant: BisectorVariant::default(),
            count_mode: CountMode::default(),
            k_const: four(),
            threshold: None,
            split: SplitStrategy::default(),
            budget: DEFAULT_BUDGET,
            format: Format::default(),
            out: None,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, ExperimentError> {
        let config: ExperimentConfig = toml::from_str(text).map_err(config_err)?;
        config.validate()?;
        Ok(config)
    }

    pub fn ctx(&self) -> Result<FieldCtx, ExperimentError> {
        FieldCtx::new(self.p as u64, self.e).map_err(config_err)
    }

    pub fn tree_spec(&self) -> Result<Option<TreeSpec>, ExperimentError> {
        self.tree.as_deref().map(|t| t.parse::<TreeSpec>().map_err(config_err)).transpose()
    }

    pub fn k_value(&self) -> Result<BigRational, ExperimentError> {
        self.k_const.trim().parse::<BigRational>().map_err(|_| config_err(format!("bad K {:?}", self.k_const)))
    }

    fn certify_params(&self, regime: Regime) -> Result<CertifyParams, ExperimentError> {
        let mut params = CertifyParams::new(regime);
        params.k_const = self.k_value()?;
        params.split = self.split;
        params.enumeration_budget = self.budget;
        if let Some(t) = &self.threshold {
            let t = t.trim().parse::<BigRational>().map_err(|_| config_err(format!("bad threshold {t:?}")))?;
            params.threshold = ThresholdRule::Fixed(t);
        }
        params.validate().map_err(config_err)?;
        Ok(params)
    }

    pub fn selection_count(&self) -> usize {
        self.statistics.len() + self.audits.len() + self.certify.len()
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        let ctx = self.ctx()?;
        if self.selection_count() == 0 {
            return Err(config_err("no statistics, audits or certifications selected"));
        }
        if self.runs == 0 {
            return Err(config_err("runs must be positive"));
        }
        let tree = self.tree_spec()?;
        if tree.is_none() && (self.statistics.contains(&Statistic::Trees) || !self.certify.is_empty()) {
            return Err(config_err("trees and certify need a tree spec"));
        }
        let needs_prime = [AuditId::TripleBound, AuditId::BisectorBound, AuditId::IncidenceBound];
        if !ctx.is_prime_field() && self.audits.iter().any(|a| needs_prime.contains(a)) {
            return Err(config_err("triple, bisector and incidence audits need e = 1"));
        }
        self.k_value()?;
        for &regime in &self.certify {
            self.certify_params(regime)?;
        }
        Ok(())
    }
}

/// One output line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Row {
    pub run_id: u64,
    pub seed: u64,
    pub p: u32,
    pub e: u32,
    pub n_e: usize,
    pub n_f: usize,
    pub statistic: String,
    pub mode: String,
    pub value: String,
    pub bound: String,
    pub holds: Option<bool>,
    pub borderline: Option<bool>,
    pub premise_in_range: Option<bool>,
    pub elapsed_ms: u64,
}

pub const CSV_HEADER: [&str; 14] = [
    "run_id",
    "seed",
    "p",
    "e",
    "n_E",
    "n_F",
    "statistic",
    "mode",
    "value",
    "bound",
    "holds",
    "borderline",
    "premise_in_range",
    "elapsed_ms",
];

fn flag(b: Option<bool>) -> String {
    b.map(|b| b.to_string()).unwrap_or_default()
}

impl Row {
    fn fields(&self) -> [String; 14] {
        [
            self.run_id.to_string(),
            self.seed.to_string(),
            self.p.to_string(),
            self.e.to_string(),
            self.n_e.to_string(),
            self.n_f.to_string(),
            self.statistic.clone(),
            self.mode.clone(),
            self.value.clone(),
            self.bound.clone(),
            flag(self.holds),
            flag(self.borderline),
            flag(self.premise_in_range),
            self.elapsed_ms.to_string(),
        ]
    }

    fn to_json(&self) -> Value {
        json!({
            "run_id": self.run_id.to_string(),
            "seed": self.seed.to_string(),
            "p": self.p,
            "e": self.e,
            "n_E": self.n_e,
            "n_F": self.n_f,
            "statistic": self.statistic,
            "mode": self.mode,
            "value": self.value,
            "bound": self.bound,
            "holds": self.holds,
            "borderline": self.borderline,
            "premise_in_range": self.premise_in_range,
            "elapsed_ms": self.elapsed_ms,
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    /// Sorted by `run_id`.
    pub rows: Vec<Row>,
    /// `(run_id, document)` for every audit row.
    pub audits: Vec<(u64, Value)>,
    /// `(run_id, document)` for every certification row.
    pub certificates: Vec<(u64, Value)>,
}

impl Report {
    /// Rows whose inequality or certificate check failed.
    pub fn violations(&self) -> impl Iterator<Item = &Row> {
        self.rows.iter().filter(|r| r.holds == Some(false))
    }

    pub fn has_violations(&self) -> bool {
        self.violations().next().is_some()
    }

    /// Process exit status: 0, or 2 when anything failed.
    pub fn exit_code(&self) -> i32 {
        if self.has_violations() {
            2
        } else {
            0
        }
    }

    /// Zeroes `elapsed_ms`, the only nondeterministic column.
    pub fn strip_timing(&mut self) {
        for r in &mut self.rows {
            r.elapsed_ms = 0;
        }
    }
}

pub fn export(report: &Report, format: Format) -> Result<Vec<u8>, ExperimentError> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(CSV_HEADER).map_err(std::io::Error::from)?;
            for row in &report.rows {
                w.write_record(row.fields()).map_err(std::io::Error::from)?;
            }
            w.into_inner().map_err(|e| ExperimentError::Io(e.into_error()))
        }
        Format::Json => {
            let doc = json!({
                "schema_version": SCHEMA_VERSION,
                "rows": report.rows.iter().map(Row::to_json).collect::<Vec<_>>(),
                "audits": report.audits.iter().map(|(id, v)| json!({ "run_id": id.to_string(), "report": v })).collect::<Vec<_>>(),
                "certificates": report.certificates.iter().map(|(id, v)| json!({ "run_id": id.to_string(), "certificate": v })).collect::<Vec<_>>(),
            });
            let mut out = serde_json::to_vec_pretty(&doc).map_err(std::io::Error::from)?;
            out.push(b'\n');
            Ok(out)
        }
    }
}

/// Seed of `F` in run seed `s`.
pub fn f_seed(s: u64) -> u64 {
    SplitMix64::seed_from_u64(s).next_u64()
}

enum Extra {
    None,
    Audit(Value),
    Certificate(Value),
}

struct RunOutput {
    rows: Vec<Row>,
    audits: Vec<(u64, Value)>,
    certificates: Vec<(u64, Value)>,
}

fn audit_row(base: &Row, r: &AuditReport) -> (Row, Extra) {
    let mut row = base.clone();
    row.statistic = r.id.name().into();
    row.mode = "exact".into();
    row.value = r.lhs.to_string();
    row.bound = r.rhs_decimal();
    row.holds = Some(r.holds);
    row.borderline = Some(r.borderline);
    row.premise_in_range = Some(r.premise_in_range);
    (row, Extra::Audit(audit_json(r)))
}

fn run_one(config: &ExperimentConfig, ctx: &FieldCtx, tree: Option<&TreeSpec>, run: u64) -> Result<RunOutput, ExperimentError> {
    let seed = config.seed.wrapping_add(run);
    let e_set = generate(ctx, &GenSpec::new(config.e_set.clone(), seed))?;
    let f_set = match &config.f_set {
        Some(kind) => generate(ctx, &GenSpec::new(kind.clone(), f_seed(seed)))?,
        None => e_set.clone(),
    };
    run_sets(config, ctx, tree, run, seed, &e_set, &f_set)
}

fn run_sets(
    config: &ExperimentConfig,
    ctx: &FieldCtx,
    tree: Option<&TreeSpec>,
    run: u64,
    seed: u64,
    e_set: &PointSet,
    f_set: &PointSet,
) -> Result<RunOutput, ExperimentError> {
    let (e_set, f_set) = (e_set.clone(), f_set.clone());
    let fail = |message: String| ExperimentError::Run { run, message };
    let k = config.k_value()?;
    let base = Row {
        run_id: 0,
        seed,
        p: config.p,
        e: config.e,
        n_e: e_set.len(),
        n_f: f_set.len(),
        statistic: String::new(),
        mode: String::new(),
        value: String::new(),
        bound: String::new(),
        holds: None,
        borderline: None,
        premise_in_range: None,
        elapsed_ms: 0,
    };
    let stat_row = |stat: Statistic, mode: String, value: String, bound: String| {
        let mut row = base.clone();
        row.statistic = stat.label().into();
        row.mode = mode;
        row.value = value;
        row.bound = bound;
        (row, Extra::None)
    };
    let first_run_id = run * config.selection_count() as u64;
    let mut out = RunOutput { rows: Vec::new(), audits: Vec::new(), certificates: Vec::new() };
    let mut push = |(mut row, extra): (Row, Extra), started: Instant| {
        row.run_id = first_run_id + out.rows.len() as u64;
        row.elapsed_ms = started.elapsed().as_millis() as u64;
        match extra {
            Extra::None => {}
            Extra::Audit(v) => out.audits.push((row.run_id, v)),
            Extra::Certificate(v) => out.certificates.push((row.run_id, v)),
        }
        out.rows.push(row);
    };

    for &stat in &config.statistics {
        let started = Instant::now();
        let row = match stat {
            Statistic::Triples => {
                let t = isosceles_triples(&f_set, &e_set, config.triple_mode);
                stat_row(stat, t.mode.to_string(), t.value.to_string(), String::new())
            }
            Statistic::BisectorEnergy => {
                let q = bisector_energy(&e_set, config.bisector_variant);
                stat_row(stat, config.bisector_variant.to_string(), q.to_string(), String::new())
            }
            Statistic::Incidences => {
                let i = incidences(&f_set, &LineMultiset::nonzero_bisectors(&e_set));
                stat_row(stat, "bisectors".into(), i.to_string(), String::new())
            }
            Statistic::DistinctDistances => {
                stat_row(stat, "all".into(), distance_set(&e_set).len().to_string(), String::new())
            }
            Statistic::Trees => {
                let tree = tree.expect("validated");
                let (value, bound) = match e_set.points().first() {
                    None => (String::new(), String::new()),
                    Some(&pin) => {
                        let count = count_distinct_pinned_trees(ctx, tree, pin, &f_set, config.count_mode, config.budget)
                            .map(|c| c.to_string())
                            .unwrap_or_default();
                        let lb = pinned_tree_lower_bound(ctx, tree, pin, &f_set, config.split)
                            .map(|(v, _)| v.to_string())
                            .unwrap_or_default();
                        (count, lb)
                    }
                };
                stat_row(stat, config.count_mode.to_string(), value, bound)
            }
        };
        push(row, started);
    }
    for &id in &config.audits {
        let started = Instant::now();
        let report = match id {
            AuditId::TripleBound => audit_triple_bound(&e_set),
            AuditId::BisectorBound => audit_bisector_bound(&e_set),
            AuditId::IncidenceBound => audit_incidence_bound(&f_set, &LineMultiset::nonzero_bisectors(&e_set)),
            AuditId::KConstant => audit_k_constant(&e_set, &k, Restriction::Record),
            AuditId::MCondition => {
                let edges = tree.map_or(1, |t| t.num_edges() as u32);
                Ok(audit_m_condition(&e_set, &f_set, edges, &k))
            }
        }
        .map_err(|e| fail(e.to_string()))?;
        push(audit_row(&base, &report), started);
    }
    for &regime in &config.certify {
        let started = Instant::now();
        let tree = tree.expect("validated");
        let params = config.certify_params(regime)?;
        let cert = certify_tree(&e_set, &f_set, tree, &params).map_err(|e| fail(e.to_string()))?;
        let mut row = base.clone();
        row.statistic = "certify".into();
        row.mode = regime.name().into();
        row.value = cert.per_pin_bound.to_string();
        row.bound = cert.pins.len().to_string();
        row.holds = Some(check_certificate(&cert, &e_set, &f_set, tree));
        row.premise_in_range = Some(cert.hypothesis_in_range);
        push((row, Extra::Certificate(certificate_json(&cert))), started);
    }
    Ok(out)
}

/// Runs every selection on every instance; rows come back sorted by `run_id`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Report, ExperimentError> {
    config.validate()?;
    let ctx = config.ctx()?;
    let tree = config.tree_spec()?;
    let outputs: Vec<RunOutput> = (0..config.runs)
        .into_par_iter()
        .map(|run| run_one(config, &ctx, tree.as_ref(), run))
        .collect::<Result<_, _>>()?;
    Ok(collect(outputs))
}

/// Runs the selections of `config` once on explicit sets (its generators are ignored).
pub fn run_on_sets(config: &ExperimentConfig, e_set: &PointSet, f_set: &PointSet) -> Result<Report, ExperimentError> {
    config.validate()?;
    let ctx = config.ctx()?;
    if e_set.ctx() != &ctx || f_set.ctx() != &ctx {
        return Err(config_err(format!("point sets are not over F_{}", ctx.q())));
    }
    let tree = config.tree_spec()?;
    let out = run_sets(config, &ctx, tree.as_ref(), 0, config.seed, e_set, f_set)?;
    Ok(collect(vec![out]))
}

fn collect(outputs: Vec<RunOutput>) -> Report {
    let mut report = Report::default();
    for o in outputs {
        report.rows.extend(o.rows);
        report.audits.extend(o.audits);
        report.certificates.extend(o.certificates);
    }
    report.rows.sort_by_key(|r| r.run_id);
    report.audits.sort_by_key(|(id, _)| *id);
    report.certificates.sort_by_key(|(id, _)| *id);
    report
}

/// Worker count from `explicit`, else `FFGEOM_THREADS`, else rayon's default.
pub fn thread_count(explicit: Option<usize>) -> Option<usize> {
    explicit.or_else(|| std::env::var("FFGEOM_THREADS").ok()?.trim().parse().ok()).filter(|&n| n > 0)
}

/// Runs `f` on a dedicated pool of `threads` workers (rayon's default when `None`).
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match threads {
        None => f(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .expect("thread pool")
            .install(f),
    }
}
