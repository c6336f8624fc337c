mod common;

use std::collections::BTreeMap;

use common::{ctx, random_set, Mix, SMALL_FIELDS};
use ffgeom::field::{is_prime, FieldCtx, FieldElem};
use ffgeom::plane::{
    bisector, circle_points, distance, incidences, isotropic_directions, Domain, LineF, LineMultiset, PlanePoint,
    PointSet,
};
use ffgeom::stats::{bisector_energy, distance_set, isosceles_triples, BisectorVariant, TripleMode};
use ffgeom::trees::{count_distinct_pinned_trees, pinned_tree_lower_bound, CountMode, SplitStrategy, TreeSpec};
use proptest::prelude::*;

fn odd_prime_powers(limit: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    for p in (3..=limit).filter(|&p| is_prime(p)) {
        let mut q = p;
        let mut e = 1;
        while q <= limit {
            out.push((p, e));
            q *= p;
            e += 1;
        }
    }
    out
}

fn field_strategy() -> impl Strategy<Value = FieldCtx> {
    (0..SMALL_FIELDS.len()).prop_map(|i| ctx(SMALL_FIELDS[i].0, SMALL_FIELDS[i].1))
}

fn point(ctx: &FieldCtx, seed: u64) -> PlanePoint {
    let q = ctx.q() as u64;
    PlanePoint::from_index(ctx, seed % (q * q))
}

fn all_points(ctx: &FieldCtx) -> Vec<PlanePoint> {
    PointSet::full_plane(ctx).points().to_vec()
}

#[test]
fn quadratic_character_is_multiplicative_up_to_1000() {
    for (p, e) in odd_prime_powers(1000) {
        let ctx = ctx(p, e);
        let chi: Vec<i8> = ctx.elements().map(|a| ctx.quadratic_character(a)).collect();
        let squares = chi.iter().filter(|&&c| c == 1).count();
        assert_eq!(squares as u32, (ctx.q() - 1) / 2, "F_{}", ctx.q());
        for a in ctx.elements().skip(1) {
            for b in ctx.elements().skip(1) {
                let ab = ctx.mul(a, b);
                assert_eq!(chi[ab.rank() as usize], chi[a.rank() as usize] * chi[b.rank() as usize]);
            }
        }
    }
}

#[test]
fn sqrt_matches_scan_up_to_1000() {
    for (p, e) in odd_prime_powers(1000) {
        let ctx = ctx(p, e);
        let mut roots: BTreeMap<FieldElem, Vec<FieldElem>> = BTreeMap::new();
        for x in ctx.elements() {
            roots.entry(ctx.square(x)).or_default().push(x);
        }
        for a in ctx.elements() {
            let mut got = ctx.sqrt(a);
            got.sort();
            let expected = roots.get(&a).cloned().unwrap_or_default();
            assert_eq!(got, expected, "sqrt({}) over F_{}", ctx.format_elem(a), ctx.q());
        }
    }
}

#[test]
fn moduli_are_deterministic() {
    for (p, e) in odd_prime_powers(3000).into_iter().filter(|&(_, e)| e > 1) {
        assert_eq!(ctx(p, e).modulus_poly(), ctx(p, e).modulus_poly());
    }
    assert_eq!(ctx(3, 2).modulus_poly(), Some(vec![1, 0, 1]));
    assert_eq!(ctx(5, 2).modulus_poly(), Some(vec![1, 1, 1]));
    assert_eq!(ctx(3, 3).modulus_poly(), Some(vec![1, 0, 2, 1]));
}

#[test]
fn bisector_membership_is_equidistance() {
    for (p, e) in odd_prime_powers(13) {
        let ctx = ctx(p, e);
        let plane = all_points(&ctx);
        for (i, &a) in plane.iter().enumerate() {
            for &b in &plane[i + 1..] {
                let l = bisector(&ctx, a, b).unwrap();
                assert_eq!(l, bisector(&ctx, b, a).unwrap());
                for &z in &plane {
                    assert_eq!(l.contains(&ctx, z), distance(&ctx, z, a) == distance(&ctx, z, b));
                }
            }
        }
    }
}

#[test]
fn zero_distance_means_isotropic_direction() {
    for (p, e) in odd_prime_powers(49) {
        let ctx = ctx(p, e);
        let dirs = isotropic_directions(&ctx);
        let origin = PlanePoint::from_ints(&ctx, 0, 0);
        let zero_circle = circle_points(&ctx, origin, ctx.zero(), Domain::FullPlane).len() as u32;
        assert_eq!(zero_circle, if ctx.eta_minus_one() == 1 { 2 * ctx.q() - 1 } else { 1 });
        for v in all_points(&ctx).into_iter().filter(|&v| v != origin) {
            let isotropic = dirs.iter().any(|&(one, i)| ctx.mul(v.x, i) == ctx.mul(v.y, one));
            assert_eq!(distance(&ctx, origin, v).is_zero(), isotropic);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn distance_is_symmetric_and_translation_invariant(ctx in field_strategy(), u in any::<u64>(), v in any::<u64>(), t in any::<u64>()) {
        let (u, v, t) = (point(&ctx, u), point(&ctx, v), point(&ctx, t));
        let shift = |a: PlanePoint| PlanePoint::new(ctx.add(a.x, t.x), ctx.add(a.y, t.y));
        prop_assert_eq!(distance(&ctx, u, v), distance(&ctx, v, u));
        prop_assert_eq!(distance(&ctx, shift(u), shift(v)), distance(&ctx, u, v));
    }

    #[test]
    fn fast_incidences_match_double_loop(ctx in field_strategy(), seed in any::<u64>(), n in 1u64..200, lines in 1u64..200) {
        let f = random_set(&ctx, n, seed);
        let mut mix = Mix::new(seed);
        let q = ctx.q() as u64;
        let mut multiset = LineMultiset::new();
        while multiset.total() < lines {
            let [a, b, c] = [0; 3].map(|_| ctx.from_rank(mix.below(q) as u32).unwrap());
            if let Ok(l) = LineF::new(&ctx, a, b, c) {
                multiset.insert(l, mix.range(1, 3));
            }
        }
        prop_assert_eq!(incidences(&f, &multiset), common::incidences(&f, &multiset));
    }

    #[test]
    fn counts_grow_with_the_point_set(ctx in field_strategy(), seed in any::<u64>(), n in 1u64..25, extra in 1u64..10) {
        let small = random_set(&ctx, n, seed);
        let big = small.union(&random_set(&ctx, extra, seed ^ 1));
        let other = random_set(&ctx, n, seed ^ 2);
        for mode in [TripleMode::Paper, TripleMode::Strict] {
            prop_assert!(isosceles_triples(&other, &small, mode).value <= isosceles_triples(&other, &big, mode).value);
            prop_assert!(isosceles_triples(&small, &other, mode).value <= isosceles_triples(&big, &other, mode).value);
        }
        for variant in [BisectorVariant::Paper, BisectorVariant::Symmetric] {
            prop_assert!(bisector_energy(&small, variant) <= bisector_energy(&big, variant));
        }
        let lines = LineMultiset::nonzero_bisectors(&other);
        prop_assert!(incidences(&small, &lines) <= incidences(&big, &lines));
        prop_assert!(distance_set(&small).len() <= distance_set(&big).len());
    }
}

fn relabel(tree: &TreeSpec, perm: &[u32]) -> TreeSpec {
    let edges: Vec<(u32, u32)> = tree.edges().iter().map(|&(a, b)| (perm[a as usize - 1], perm[b as usize - 1])).collect();
    TreeSpec::new(tree.num_vertices(), &edges, perm[tree.pin() as usize - 1]).unwrap()
}

#[test]
fn lower_bound_is_sound() {
    let trees = common::small_trees();
    let mut mix = Mix::new(11);
    for i in 0..300u64 {
        let ctx = ctx(SMALL_FIELDS[(i % 7) as usize].0, SMALL_FIELDS[(i % 7) as usize].1);
        let pool = random_set(&ctx, mix.range(2, 25), 500 + i);
        let tree = &trees[mix.below(trees.len() as u64) as usize];
        let pin = pool.points()[mix.below(pool.len() as u64) as usize];
        let exact = count_distinct_pinned_trees(&ctx, tree, pin, &pool, CountMode::Nonzero, u64::MAX).unwrap();
        for split in [SplitStrategy::Alternating, SplitStrategy::Contiguous] {
            let (bound, _) = pinned_tree_lower_bound(&ctx, tree, pin, &pool, split).unwrap();
            assert!(bound <= exact, "instance {i}: {tree} bound {bound} > exact {exact}");
        }
    }
}

#[test]
fn tree_count_invariants() {
    let edge = TreeSpec::path(1, 1).unwrap();
    let mut mix = Mix::new(12);
    for i in 0..150u64 {
        let ctx = ctx(SMALL_FIELDS[(i % 7) as usize].0, SMALL_FIELDS[(i % 7) as usize].1);
        let pool = random_set(&ctx, mix.range(2, 20), 900 + i);
        let pin = pool.points()[0];
        let count = |tree: &TreeSpec, pool: &PointSet, mode| {
            count_distinct_pinned_trees(&ctx, tree, pin, pool, mode, u64::MAX).unwrap()
        };
        assert_eq!(count(&edge, &pool, CountMode::Nonzero), common::pinned_nonzero(&ctx, pin, &pool).len() as u64);

        let bigger = pool.union(&random_set(&ctx, 4, 1900 + i));
        for tree in common::small_trees() {
            let n = count(&tree, &pool, CountMode::Nonzero);
            assert!(n <= count(&tree, &pool, CountMode::All));
            assert!(n <= count(&tree, &bigger, CountMode::Nonzero));
            // reverse the labels
            let k = tree.num_vertices();
            let perm: Vec<u32> = (1..=k).rev().collect();
            assert_eq!(n, count(&relabel(&tree, &perm), &pool, CountMode::Nonzero));
        }

        for k in 1..=3u32 {
            let star = TreeSpec::star(k, 1).unwrap();
            let mut circles: BTreeMap<FieldElem, usize> = BTreeMap::new();
            for y in pool.without(pin).iter() {
                *circles.entry(distance(&ctx, pin, y)).or_default() += 1;
            }
            let all = count(&star, &pool, CountMode::All);
            let cap = (circles.len() as u64).pow(k);
            assert!(all <= cap);
            if circles.values().all(|&c| c >= k as usize) {
                assert_eq!(all, cap);
            }
        }
    }
}
