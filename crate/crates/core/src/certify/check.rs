use rayon::prelude::*;
use thiserror::Error;

use super::extract::{check_inputs, dispatch, lemma_premise, popular_by, sub_bound};
use super::{greedy_blocks, hypothesis_in_range, Certificate, CertifyParams, ExtractionNode, Regime, SizeRange};
use crate::field::FieldCtx;
use crate::plane::{distance, PointSet};
use crate::stats::pinned_nonzero_distances;
use crate::trees::{count_distinct_pinned_trees, pinned_tree_lower_bound, BoundCase, BoundNode, CountMode, TreeSpec};

/// First invariant a certificate was found to break.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("certificate rejected: {0}")]
pub struct CheckFailure(pub String);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), CheckFailure> {
    if ok {
        Ok(())
    } else {
        Err(CheckFailure(msg()))
    }
}

fn pairwise_disjoint(sets: &[PointSet]) -> bool {
    sets.iter()
        .enumerate()
        .all(|(i, a)| sets[i + 1..].iter().all(|b| a.is_disjoint(b)))
}

fn union(ctx: &FieldCtx, sets: &[PointSet]) -> PointSet {
    PointSet::new(ctx, sets.iter().flat_map(|s| s.iter()))
}

struct Replay<'a> {
    ctx: &'a FieldCtx,
    params: &'a CertifyParams,
    nodes: &'a [ExtractionNode],
}

impl Replay<'_> {
    fn check_halves(&self, whole: &PointSet, halves: &[PointSet], what: &str, id: usize) -> Result<(), CheckFailure> {
        ensure(halves.len() == 2, || format!("node {id}: {what} has {} halves", halves.len()))?;
        ensure(pairwise_disjoint(halves), || format!("node {id}: {what} halves overlap"))?;
        let (a, b) = self.params.split.split(whole);
        ensure(halves[0] == a && halves[1] == b, || format!("node {id}: {what} halves differ from the split"))
    }

    fn check_threshold(&self, node: &ExtractionNode, compared: usize) -> Result<(), CheckFailure> {
        let id = node.id;
        ensure(node.threshold_n == Some(compared), || format!("node {id}: threshold pool size"))?;
        let t = self.params.threshold_for(self.ctx, compared);
        ensure(node.threshold.as_ref() == Some(&t), || format!("node {id}: threshold differs from {t}"))
    }

    fn check_node(&self, node: &ExtractionNode) -> Result<(), CheckFailure> {
        let id = node.id;
        let children = node.children(self.nodes);
        let tree = &node.tree;
        for set in [&node.pins_in, &node.pool, &node.pins_out] {
            ensure(set.ctx() == self.ctx, || format!("node {id}: field mismatch"))?;
        }
        ensure(node.pins_out.is_subset(&node.pins_in), || format!("node {id}: pins_out not within pins_in"))?;
        match node.case {
            BoundCase::Base => {
                ensure(tree.num_edges() == 1, || format!("node {id}: base case on {tree}"))?;
                ensure(children.is_empty(), || format!("node {id}: base case with children"))?;
                self.check_threshold(node, node.pool.len())?;
                let t = node.threshold.as_ref().unwrap();
                ensure(popular_by(&node.pool, &node.pins_in, t) == node.pins_out, || {
                    format!("node {id}: admitted pins differ from the threshold")
                })?;
                ensure(
                    node.lemma_premise == lemma_premise(self.params, self.ctx, node.pins_in.len(), node.pool.len()),
                    || format!("node {id}: lemma premise"),
                )?;
            }
            BoundCase::Deg1 => {
                let rest = tree.remove_leaf_pin();
                ensure(rest.is_some(), || format!("node {id}: deg1 case on {tree}"))?;
                let rest = rest.unwrap();
                self.check_halves(&node.pool, &node.pool_halves, "pool", id)?;
                ensure(children.len() == 1, || format!("node {id}: deg1 case needs one child"))?;
                let child = children[0];
                ensure(
                    child.tree == rest && child.pins_in == node.pool_halves[1] && child.pool == node.pool_halves[0],
                    || format!("node {id}: child does not match T - v over (F2, F1)"),
                )?;
                ensure(node.reduced_pools.len() == 1 && node.reduced_pools[0] == child.pins_out, || {
                    format!("node {id}: F2' differs from the child's pins")
                })?;
                let f2r = &node.reduced_pools[0];
                ensure(pairwise_disjoint(&node.blocks), || format!("node {id}: blocks overlap"))?;
                ensure(node.blocks.iter().all(|g| g.len() == f2r.len() && g.is_subset(&node.pins_in)), || {
                    format!("node {id}: blocks of unequal size or outside the pins")
                })?;
                let expected = greedy_blocks(&node.pins_in, f2r.len()).unwrap_or_default();
                let s = if f2r.is_empty() { 0 } else { node.pins_in.len() / f2r.len() };
                ensure(node.s == s && node.blocks.len() == s, || format!("node {id}: s = {} but expected {s}", node.s))?;
                ensure(node.blocks == expected, || format!("node {id}: blocks differ from the greedy choice"))?;
                self.check_threshold(node, f2r.len())?;
                let t = node.threshold.as_ref().unwrap();
                let kept: Vec<PointSet> = node.blocks.iter().map(|g| popular_by(f2r, g, t)).collect();
                ensure(union(self.ctx, &kept) == node.pins_out, || format!("node {id}: admitted pins differ"))?;
                ensure(
                    node.lemma_premise == lemma_premise(self.params, self.ctx, f2r.len(), f2r.len()),
                    || format!("node {id}: lemma premise"),
                )?;
            }
            BoundCase::Split => {
                let parts = tree.split_at_pin();
                ensure(parts.is_some(), || format!("node {id}: split case on {tree}"))?;
                let (t1, t2) = parts.unwrap();
                self.check_halves(&node.pins_in, &node.pin_halves, "pin", id)?;
                self.check_halves(&node.pool, &node.pool_halves, "pool", id)?;
                ensure(children.len() == 4 && node.reduced_pools.len() == 2, || {
                    format!("node {id}: split case needs four children and two reduced pools")
                })?;
                for i in 0..2 {
                    let (first, second) = (children[2 * i], children[2 * i + 1]);
                    let reduced = &node.reduced_pools[i];
                    ensure(
                        first.tree == t1 && first.pins_in == node.pin_halves[i] && first.pool == node.pool_halves[0],
                        || format!("node {id}: branch {i} first child mismatch"),
                    )?;
                    ensure(*reduced == node.pool_halves[1].take(first.pins_out.len()), || {
                        format!("node {id}: branch {i} reduced pool mismatch")
                    })?;
                    ensure(second.tree == t2 && second.pins_in == first.pins_out && second.pool == *reduced, || {
                        format!("node {id}: branch {i} second child mismatch")
                    })?;
                    ensure(reduced.is_disjoint(&node.pool_halves[0]), || format!("node {id}: sub-pools overlap"))?;
                }
                let out = union(self.ctx, &[children[1].pins_out.clone(), children[3].pins_out.clone()]);
                ensure(out == node.pins_out, || format!("node {id}: admitted pins differ"))?;
            }
        }
        let recomputed = sub_bound(self.ctx, tree, &node.pins_out, &node.pool, self.params);
        match (node.sub_bound, recomputed) {
            (None, None) => Ok(()),
            (Some(a), Some(b)) => ensure(a <= b, || format!("node {id}: sub-bound {a} exceeds {b}")),
            _ => Err(CheckFailure(format!("node {id}: sub-bound presence"))),
        }
    }
}

/// Structural check of one lower-bound trace; returns the value it supports.
fn check_trace(ctx: &FieldCtx, node: &BoundNode) -> Result<u64, CheckFailure> {
    let x = node.pin_point;
    ensure(!node.pool.contains(x), || "trace pool contains its pin".into())?;
    ensure(pairwise_disjoint(&node.sub_pools), || "trace sub-pools overlap".into())?;
    ensure(node.sub_pools.iter().all(|s| s.is_subset(&node.pool) && !s.contains(x)), || {
        "trace sub-pool outside its pool".into()
    })?;
    let value = match node.case {
        BoundCase::Base => {
            ensure(node.tree.num_edges() == 1, || "trace base case on a larger tree".into())?;
            pinned_nonzero_distances(x, &node.pool).len() as u64
        }
        BoundCase::Deg1 => {
            ensure(node.sub_pools.len() == 2, || "trace deg1 needs two sub-pools".into())?;
            let rest = node.tree.remove_leaf_pin().ok_or_else(|| CheckFailure("trace deg1 case".into()))?;
            let mut seen = std::collections::BTreeSet::new();
            let mut min_child = u64::MAX;
            for c in &node.children {
                ensure(c.tree == rest && node.sub_pools[1].contains(c.pin_point) && c.pool == node.sub_pools[0], || {
                    "trace deg1 child mismatch".into()
                })?;
                let d = distance(ctx, x, c.pin_point);
                ensure(!d.is_zero() && seen.insert(d), || "trace deg1 children share a distance".into())?;
                min_child = min_child.min(check_trace(ctx, c)?);
            }
            let distinct = pinned_nonzero_distances(x, &node.sub_pools[1]).len();
            if node.sub_pools[0].is_empty() || distinct == 0 {
                0
            } else {
                ensure(seen.len() == distinct, || "trace deg1 misses a distance".into())?;
                distinct as u64 * min_child
            }
        }
        BoundCase::Split => {
            ensure(node.sub_pools.len() == 2 && node.children.len() == 2, || "trace split shape".into())?;
            let mut v = 1u64;
            for (c, pool) in node.children.iter().zip(&node.sub_pools) {
                ensure(c.pin_point == x && c.pool == *pool, || "trace split child mismatch".into())?;
                v *= check_trace(ctx, c)?;
            }
            v
        }
    };
    ensure(value == node.value, || format!("trace value {} but structure gives {value}", node.value))?;
    Ok(value)
}

/// Re-verifies every recorded invariant of `c` against the inputs.
pub fn verify_certificate(c: &Certificate, e: &PointSet, f: &PointSet, tree: &TreeSpec) -> Result<(), CheckFailure> {
    ensure(c.sound, || "certificate is not marked sound".into())?;
    ensure(c.tree == *tree, || "tree differs".into())?;
    ensure(c.params.regime == c.regime, || "regime differs from its parameters".into())?;
    check_inputs(e, f, &c.params).map_err(|err| CheckFailure(err.to_string()))?;
    let ctx = e.ctx();
    let k = tree.num_edges();
    let (e_used, f_used, effective) = dispatch(e, f, k, &c.params);
    ensure(effective == c.effective_regime, || "effective regime differs".into())?;
    let char_or_q = if c.regime == Regime::LargeQ { ctx.q() as u64 } else { ctx.p() as u64 };
    ensure(c.size_range == SizeRange::classify(e.len(), char_or_q, k), || "size range differs".into())?;
    ensure(c.hypothesis_in_range == hypothesis_in_range(c.regime, e, f, k, &c.params.k_const), || {
        "hypothesis flag differs".into()
    })?;

    ensure(!c.recursion.is_empty(), || "empty recursion".into())?;
    ensure(c.recursion.iter().enumerate().all(|(i, n)| n.id == i && n.parent.map_or(i == 0, |p| p < i)), || {
        "recursion ids out of order".into()
    })?;
    let root = c.root();
    ensure(root.tree == *tree && root.pins_in == e_used && root.pool == f_used, || "root inputs differ".into())?;
    ensure(root.pins_out == c.pins, || "pins differ from the root's output".into())?;
    let mut run_params = c.params.clone();
    run_params.regime = effective;
    let replay = Replay { ctx, params: &run_params, nodes: &c.recursion };
    c.recursion.iter().try_for_each(|n| replay.check_node(n))?;

    let listed = PointSet::new(ctx, c.pin_bounds.iter().map(|b| b.pin));
    ensure(listed == c.pins && c.pin_bounds.len() == c.pins.len(), || "per-pin bounds do not match the pins".into())?;
    ensure(c.pin_bounds.iter().all(|b| c.per_pin_bound <= b.bound), || "per_pin_bound exceeds a pin's bound".into())?;
    ensure(!c.pins.is_empty() || c.per_pin_bound == 0, || "per_pin_bound claimed without pins".into())?;
    c.pin_bounds.par_iter().try_for_each(|b| {
        let pin = b.pin.format(ctx);
        ensure(b.trace.pin_point == b.pin && b.trace.tree == *tree && b.trace.pool == f_used.without(b.pin), || {
            format!("pin {pin}: trace does not start at the pin")
        })?;
        let traced = check_trace(ctx, &b.trace)?;
        ensure(b.bound <= traced, || format!("pin {pin}: bound {} above its trace {traced}", b.bound))?;
        let (lb, _) = pinned_tree_lower_bound(ctx, tree, b.pin, &f_used, c.params.split)
            .map_err(|err| CheckFailure(format!("pin {pin}: {err}")))?;
        ensure(b.bound <= lb, || format!("pin {pin}: bound {} above recomputed {lb}", b.bound))?;
        if let Ok(exact) = count_distinct_pinned_trees(ctx, tree, b.pin, &f_used, CountMode::Nonzero, c.params.enumeration_budget) {
            ensure(b.bound <= exact, || format!("pin {pin}: bound {} above exact count {exact}", b.bound))?;
        }
        Ok(())
    })?;
    Ok(())
}

/// `true` iff [`verify_certificate`] accepts.
pub fn check_certificate(c: &Certificate, e: &PointSet, f: &PointSet, tree: &TreeSpec) -> bool {
    verify_certificate(c, e, f, tree).is_ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certify::{certify_tree, Regime};

    fn setup() -> (PointSet, TreeSpec, Certificate) {
        let pool = PointSet::full_plane(&FieldCtx::prime(5).unwrap()).take(10);
        let tree = TreeSpec::path(2, 1).unwrap();
        let c = certify_tree(&pool, &pool, &tree, &CertifyParams::new(Regime::Arbitrary)).unwrap();
        assert!(!c.pins.is_empty());
        (pool, tree, c)
    }

    #[test]
    fn rejects_inflated_bound() {
        let (pool, tree, c) = setup();
        assert_eq!(verify_certificate(&c, &pool, &pool, &tree), Ok(()));
        let ctx = pool.ctx();
        let mut bad = c.clone();
        let pin = bad.pin_bounds[0].pin;
        let exact = count_distinct_pinned_trees(ctx, &tree, pin, &pool, CountMode::Nonzero, u64::MAX).unwrap();
        bad.pin_bounds[0].bound = exact + 1;
        assert!(!check_certificate(&bad, &pool, &pool, &tree));
        let mut bad = c.clone();
        bad.per_pin_bound += 1;
        assert!(!check_certificate(&bad, &pool, &pool, &tree));
    }

    #[test]
    fn rejects_overlapping_pools() {
        let (pool, tree, c) = setup();
        let mut bad = c.clone();
        let extra = bad.recursion[0].pool_halves[0].points()[0];
        let second = &bad.recursion[0].pool_halves[1];
        bad.recursion[0].pool_halves[1] = second.union(&PointSet::new(pool.ctx(), [extra]));
        assert!(!check_certificate(&bad, &pool, &pool, &tree));
        let mut bad = c.clone();
        let trace = &mut bad.pin_bounds[0].trace;
        let extra = trace.sub_pools[0].points()[0];
        trace.sub_pools[1] = trace.sub_pools[1].union(&PointSet::new(pool.ctx(), [extra]));
        assert!(!check_certificate(&bad, &pool, &pool, &tree));
    }

    #[test]
    fn rejects_tampered_structure() {
        let (pool, tree, c) = setup();
        let mut bad = c.clone();
        bad.recursion[0].s += 1;
        assert!(!check_certificate(&bad, &pool, &pool, &tree));
        let mut bad = c.clone();
        bad.hypothesis_in_range = !bad.hypothesis_in_range;
        assert!(!check_certificate(&bad, &pool, &pool, &tree));
        let mut bad = c.clone();
        bad.sound = false;
        assert!(!check_certificate(&bad, &pool, &pool, &tree));
        let other = TreeSpec::star(2, 1).unwrap();
        assert!(!check_certificate(&c, &pool, &pool, &other));
    }
}
