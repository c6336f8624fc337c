use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;

use super::exact::{floor_power, Surd};
use super::{
    hypothesis_in_range, Certificate, CertifyError, CertifyParams, ExtractionNode, PinBound, Regime, SizeRange,
};
use crate::field::FieldCtx;
use crate::plane::PointSet;
use crate::stats::pinned_nonzero_distances;
use crate::trees::{pinned_tree_lower_bound, BoundCase, TreeSpec};

pub(crate) fn admits(count: usize, threshold: &Surd) -> bool {
    Surd::integer(count as u64).cmp_exact(threshold) != Ordering::Less
}

pub(crate) fn popular_by(e: &PointSet, f: &PointSet, threshold: &Surd) -> PointSet {
    let keep: Vec<bool> = f
        .points()
        .par_iter()
        .map(|&x| admits(pinned_nonzero_distances(x, e).len(), threshold))
        .collect();
    let mut it = keep.into_iter();
    f.filter(|_| it.next().unwrap())
}

/// `{x in F : |D*_x(E)| >= threshold}`.
pub fn popular_pins(e: &PointSet, f: &PointSet, threshold: &BigRational) -> PointSet {
    let zero = BigRational::from_integer(BigInt::from(0));
    let t = if *threshold < zero { zero } else { threshold.clone() };
    popular_by(e, f, &Surd::rational(t))
}

/// `floor(|E| / block_size)` disjoint blocks of `block_size` consecutive points of `E`.
pub fn greedy_blocks(e: &PointSet, block_size: usize) -> Result<Vec<PointSet>, CertifyError> {
    if block_size == 0 || block_size > e.len() {
        return Err(CertifyError::BadBlockSize { size: block_size, available: e.len() });
    }
    let ctx = e.ctx();
    Ok(e.points()
        .chunks_exact(block_size)
        .map(|chunk| PointSet::new(ctx, chunk.iter().copied()))
        .collect())
}

pub(crate) fn lemma_premise(params: &CertifyParams, ctx: &FieldCtx, cand: usize, pool: usize) -> Option<bool> {
    let c = match params.regime {
        Regime::LargePrime => ctx.p() as u64,
        Regime::LargeQ => ctx.q() as u64,
        _ => return None,
    };
    let c = BigInt::from(c);
    let (e, f) = (BigInt::from(pool), BigInt::from(cand));
    Some(
        e >= BigInt::from(4) * &c
            && f >= BigInt::from(8) * &c
            && &f * &e * &e >= BigInt::from(64) * c.pow(4),
    )
}

pub(crate) fn sub_bound(ctx: &FieldCtx, tree: &TreeSpec, pins: &PointSet, pool: &PointSet, params: &CertifyParams) -> Option<u64> {
    pins.points()
        .par_iter()
        .map(|&x| pinned_tree_lower_bound(ctx, tree, x, pool, params.split).map_or(0, |(v, _)| v))
        .min()
}

struct Extractor<'a> {
    ctx: &'a FieldCtx,
    params: &'a CertifyParams,
    nodes: Vec<ExtractionNode>,
}

impl Extractor<'_> {
    fn node(&mut self, parent: Option<usize>, case: BoundCase, tree: &TreeSpec, pins_in: &PointSet, pool: &PointSet) -> usize {
        let id = self.nodes.len();
        self.nodes.push(ExtractionNode {
            id,
            parent,
            case,
            tree: tree.clone(),
            pins_in: pins_in.clone(),
            pool: pool.clone(),
            pin_halves: Vec::new(),
            pool_halves: Vec::new(),
            reduced_pools: Vec::new(),
            blocks: Vec::new(),
            s: 0,
            threshold_n: None,
            threshold: None,
            pins_out: PointSet::empty(self.ctx),
            lemma_premise: None,
            sub_bound: None,
        });
        id
    }

    /// Pins of `pins_in` that the recursion keeps for `tree` over `pool`.
    fn extract(&mut self, parent: Option<usize>, tree: &TreeSpec, pins_in: &PointSet, pool: &PointSet) -> PointSet {
        let params = self.params;
        let out = if tree.num_edges() == 1 {
            let id = self.node(parent, BoundCase::Base, tree, pins_in, pool);
            let t = params.threshold_for(self.ctx, pool.len());
            let out = popular_by(pool, pins_in, &t);
            let n = &mut self.nodes[id];
            n.threshold_n = Some(pool.len());
            n.threshold = Some(t);
            n.lemma_premise = lemma_premise(params, self.ctx, pins_in.len(), pool.len());
            self.finish(id, out)
        } else if let Some(rest) = tree.remove_leaf_pin() {
            let id = self.node(parent, BoundCase::Deg1, tree, pins_in, pool);
            let (f1, f2) = params.split.split(pool);
            let f2_reduced = self.extract(Some(id), &rest, &f2, &f1);
            let t = params.threshold_for(self.ctx, f2_reduced.len());
            let blocks = greedy_blocks(pins_in, f2_reduced.len()).unwrap_or_default();
            let mut kept = Vec::new();
            for g in &blocks {
                kept.extend(popular_by(&f2_reduced, g, &t).iter());
            }
            let n = &mut self.nodes[id];
            n.pool_halves = vec![f1, f2];
            n.s = blocks.len();
            n.blocks = blocks;
            n.threshold_n = Some(f2_reduced.len());
            n.threshold = Some(t);
            n.lemma_premise = lemma_premise(params, self.ctx, f2_reduced.len(), f2_reduced.len());
            n.reduced_pools = vec![f2_reduced];
            let out = PointSet::new(self.ctx, kept);
            self.finish(id, out)
        } else {
            let (t1, t2) = tree.split_at_pin().expect("pin of degree >= 2");
            let id = self.node(parent, BoundCase::Split, tree, pins_in, pool);
            let (e1, e2) = params.split.split(pins_in);
            let (f1, f2) = params.split.split(pool);
            let mut kept = Vec::new();
            let mut reduced = Vec::new();
            for ei in [&e1, &e2] {
                let ei1 = self.extract(Some(id), &t1, ei, &f1);
                let f2_reduced = f2.take(ei1.len());
                let ei2 = self.extract(Some(id), &t2, &ei1, &f2_reduced);
                kept.extend(ei2.iter());
                reduced.push(f2_reduced);
            }
            let n = &mut self.nodes[id];
            n.pin_halves = vec![e1, e2];
            n.pool_halves = vec![f1, f2];
            n.reduced_pools = reduced;
            let out = PointSet::new(self.ctx, kept);
            self.finish(id, out)
        };
        out
    }

    fn finish(&mut self, id: usize, out: PointSet) -> PointSet {
        let n = &self.nodes[id];
        let sb = sub_bound(self.ctx, &n.tree, &out, &n.pool, self.params);
        let n = &mut self.nodes[id];
        n.sub_bound = sb;
        n.pins_out = out.clone();
        out
    }
}

pub(crate) fn check_inputs(e: &PointSet, f: &PointSet, params: &CertifyParams) -> Result<(), CertifyError> {
    params.validate()?;
    if e.is_empty() || f.is_empty() {
        return Err(CertifyError::EmptyInput);
    }
    if e.ctx() != f.ctx() {
        return Err(CertifyError::RegimeMismatch("E and F live over different fields".into()));
    }
    if e.len() != f.len() {
        return Err(CertifyError::RegimeMismatch(format!("|E| = {} but |F| = {}", e.len(), f.len())));
    }
    if params.regime.needs_prime_field() && !e.ctx().is_prime_field() {
        return Err(CertifyError::RegimeMismatch(format!("{} needs a prime field, got q = {}", params.regime, e.ctx().q())));
    }
    Ok(())
}

/// Inputs after range dispatch, and the regime whose thresholds apply.
pub(crate) fn dispatch(e: &PointSet, f: &PointSet, k: usize, params: &CertifyParams) -> (PointSet, PointSet, Regime) {
    let ctx = e.ctx();
    let c = if params.regime == Regime::LargeQ { ctx.q() as u64 } else { ctx.p() as u64 };
    if !params.range_split {
        return (e.clone(), f.clone(), params.regime);
    }
    match (params.regime, SizeRange::classify(e.len(), c, k)) {
        (Regime::MediumPrime | Regime::Arbitrary, SizeRange::Gap) => {
            let m = floor_power(c, 4, 3) as usize;
            (e.take(m), f.take(m), params.regime)
        }
        (Regime::MediumPrime, SizeRange::Large) => (e.clone(), f.clone(), Regime::LargePrime),
        (Regime::Arbitrary, SizeRange::Large) => {
            let m = floor_power(c, 4, 3) as usize;
            (e.take(m), f.take(m), params.regime)
        }
        _ => (e.clone(), f.clone(), params.regime),
    }
}

/// Runs the extraction recursion for `(tree, pin)` over `E` and `F` and attaches a
/// sound lower bound, with trace, to every extracted pin.
pub fn certify_tree(e: &PointSet, f: &PointSet, tree: &TreeSpec, params: &CertifyParams) -> Result<Certificate, CertifyError> {
    check_inputs(e, f, params)?;
    let ctx = e.ctx();
    let k = tree.num_edges();
    let (e_used, f_used, effective) = dispatch(e, f, k, params);
    let mut run_params = params.clone();
    run_params.regime = effective;
    let mut ex = Extractor { ctx, params: &run_params, nodes: Vec::new() };
    let pins = ex.extract(None, tree, &e_used, &f_used);
    let pin_bounds: Vec<PinBound> = pins
        .points()
        .par_iter()
        .map(|&pin| -> Result<PinBound, CertifyError> {
            let (bound, trace) = pinned_tree_lower_bound(ctx, tree, pin, &f_used, params.split)?;
            Ok(PinBound { pin, bound, trace })
        })
        .collect::<Result<_, _>>()?;
    let per_pin_bound = pin_bounds.iter().map(|b| b.bound).min().unwrap_or(0);
    let c = if params.regime == Regime::LargeQ { ctx.q() as u64 } else { ctx.p() as u64 };
    Ok(Certificate {
        regime: params.regime,
        effective_regime: effective,
        params: params.clone(),
        tree: tree.clone(),
        pins,
        per_pin_bound,
        pin_bounds,
        recursion: ex.nodes,
        sound: true,
        hypothesis_in_range: hypothesis_in_range(params.regime, e, f, k, &params.k_const),
        size_range: SizeRange::classify(e.len(), c, k),
    })
}
