//! Brute-force oracles. Each one works straight from the definitions and shares no
//! counting code with the library.
#![allow(dead_code)]

use std::collections::HashSet;

use ffgeom::experiment::{generate, GenKind, GenSpec};
use ffgeom::field::{FieldCtx, FieldElem};
use ffgeom::plane::{LineMultiset, PlanePoint, PointSet};
use ffgeom::trees::TreeSpec;

/// `(p, e)` for q in {3, 5, 7, 9, 11, 13, 25}.
pub const SMALL_FIELDS: [(u64, u32); 7] = [(3, 1), (5, 1), (7, 1), (3, 2), (11, 1), (13, 1), (5, 2)];

pub fn ctx(p: u64, e: u32) -> FieldCtx {
    FieldCtx::new(p, e).unwrap()
}

pub fn random_set(ctx: &FieldCtx, size: u64, seed: u64) -> PointSet {
    let size = size.min(ctx.q() as u64 * ctx.q() as u64);
    generate(ctx, &GenSpec::new(GenKind::Random { size }, seed)).unwrap()
}

/// Deterministic small-number stream for choosing instance shapes.
pub struct Mix(u64);

impl Mix {
    pub fn new(seed: u64) -> Self {
        Mix(seed ^ 0x9e37_79b9_7f4a_7c15)
    }
    pub fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
    pub fn below(&mut self, n: u64) -> u64 {
        self.next() % n
    }
    pub fn range(&mut self, lo: u64, hi: u64) -> u64 {
        lo + self.below(hi - lo + 1)
    }
}

pub fn dist(ctx: &FieldCtx, u: PlanePoint, v: PlanePoint) -> FieldElem {
    let dx = ctx.sub(u.x, v.x);
    let dy = ctx.sub(u.y, v.y);
    ctx.add(ctx.mul(dx, dx), ctx.mul(dy, dy))
}

pub fn triples(f: &PointSet, e: &PointSet, strict: bool) -> u64 {
    let ctx = e.ctx();
    let mut n = 0;
    for a in f.iter() {
        for b in e.iter() {
            let d = dist(ctx, a, b);
            if strict && d.is_zero() {
                continue;
            }
            for c in e.iter() {
                if dist(ctx, a, c) == d && !dist(ctx, b, c).is_zero() {
                    n += 1;
                }
            }
        }
    }
    n
}

/// `#{(x, b, c) : ||x-b|| = ||x-c||}` and the part of it with `||b-c|| = 0`.
pub fn equal_distance_triples(f: &PointSet, e: &PointSet) -> (u64, u64) {
    let ctx = e.ctx();
    let (mut all, mut zero) = (0, 0);
    for a in f.iter() {
        for b in e.iter() {
            for c in e.iter() {
                if dist(ctx, a, b) == dist(ctx, a, c) {
                    all += 1;
                    if dist(ctx, b, c).is_zero() {
                        zero += 1;
                    }
                }
            }
        }
    }
    (all, zero)
}

/// Raw bisector coefficients `(2(b-a), |b|^2 - |a|^2)`, not normalised.
fn raw_bisector(ctx: &FieldCtx, a: PlanePoint, b: PlanePoint) -> [FieldElem; 3] {
    let two = ctx.from_int(2);
    let norm = |p: PlanePoint| ctx.add(ctx.mul(p.x, p.x), ctx.mul(p.y, p.y));
    [ctx.mul(two, ctx.sub(b.x, a.x)), ctx.mul(two, ctx.sub(b.y, a.y)), ctx.sub(norm(b), norm(a))]
}

fn proportional(ctx: &FieldCtx, u: [FieldElem; 3], v: [FieldElem; 3]) -> bool {
    (0..3).all(|i| (0..3).all(|j| ctx.mul(u[i], v[j]) == ctx.mul(u[j], v[i])))
}

pub fn bisector_energy(e: &PointSet, symmetric: bool) -> u64 {
    let ctx = e.ctx();
    let pairs: Vec<(PlanePoint, PlanePoint)> =
        e.iter().flat_map(|a| e.iter().map(move |b| (a, b))).filter(|(a, b)| a != b).collect();
    let lines: Vec<[FieldElem; 3]> = pairs.iter().map(|&(a, b)| raw_bisector(ctx, a, b)).collect();
    let mut n = 0;
    for (i, &(a, b)) in pairs.iter().enumerate() {
        if dist(ctx, a, b).is_zero() {
            continue;
        }
        for (j, &(c, d)) in pairs.iter().enumerate() {
            if symmetric && dist(ctx, c, d).is_zero() {
                continue;
            }
            if proportional(ctx, lines[i], lines[j]) {
                n += 1;
            }
        }
    }
    n
}

pub fn incidences(f: &PointSet, lines: &LineMultiset) -> u64 {
    let ctx = f.ctx();
    let mut n = 0;
    for (line, m) in lines.iter() {
        let (a, b, c) = line.coefficients();
        for p in f.iter() {
            if ctx.add(ctx.mul(a, p.x), ctx.mul(b, p.y)) == c {
                n += m;
            }
        }
    }
    n
}

/// Distinct edge-length vectors over all injective maps, by trying every tuple.
pub fn tree_count(ctx: &FieldCtx, tree: &TreeSpec, pin: PlanePoint, pool: &PointSet, nonzero: bool) -> u64 {
    let pts: Vec<PlanePoint> = pool.iter().filter(|&p| p != pin).collect();
    let others: Vec<u32> = (1..=tree.num_vertices()).filter(|&v| v != tree.pin()).collect();
    let k = others.len() as u32;
    let mut seen = HashSet::new();
    let total = (pts.len() as u64).pow(k);
    'outer: for mut code in 0..total {
        let mut at = vec![pin; tree.num_vertices() as usize + 1];
        let mut used = Vec::with_capacity(others.len());
        for &v in &others {
            let idx = (code % pts.len() as u64) as usize;
            code /= pts.len() as u64;
            if used.contains(&idx) {
                continue 'outer;
            }
            used.push(idx);
            at[v as usize] = pts[idx];
        }
        let vector: Vec<FieldElem> = tree.edges().iter().map(|&(a, b)| dist(ctx, at[a as usize], at[b as usize])).collect();
        if nonzero && vector.iter().any(|d| d.is_zero()) {
            continue;
        }
        seen.insert(vector);
    }
    seen.len() as u64
}

pub fn circle_size(ctx: &FieldCtx, center: PlanePoint, radius: FieldElem) -> usize {
    let q = ctx.q() as u64;
    (0..q * q).map(|i| PlanePoint::from_index(ctx, i)).filter(|&z| dist(ctx, center, z) == radius).count()
}

pub fn pinned_nonzero(ctx: &FieldCtx, x: PlanePoint, e: &PointSet) -> HashSet<FieldElem> {
    e.iter().map(|y| dist(ctx, x, y)).filter(|d| !d.is_zero()).collect()
}

/// Trees with at most three edges, every pin choice.
pub fn small_trees() -> Vec<TreeSpec> {
    let shapes = [
        "vertices=2 edges=1-2 pin=1",
        "vertices=3 edges=1-2,2-3 pin=1",
        "vertices=3 edges=1-2,2-3 pin=2",
        "vertices=4 edges=1-2,2-3,3-4 pin=1",
        "vertices=4 edges=1-2,2-3,3-4 pin=2",
        "vertices=4 edges=1-2,1-3,1-4 pin=1",
        "vertices=4 edges=1-2,1-3,1-4 pin=2",
    ];
    shapes.iter().map(|s| s.parse().unwrap()).collect()
}
