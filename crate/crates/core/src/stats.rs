//! Counting statistics over point sets: distance sets, pinned nonzero distances,
//! sphere histograms, isosceles triples and bisector energy.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::field::{FieldCtx, FieldElem};
use crate::plane::{bisector, distance, LineF, PlanePoint, PointSet};

/// Dense histograms are used up to this field order.
const DENSE_LIMIT: u32 = 1 << 12;

pub fn distance_set(set: &PointSet) -> BTreeSet<FieldElem> {
    let ctx = set.ctx();
    let pts = set.points();
    let mut out = BTreeSet::new();
    for (i, &a) in pts.iter().enumerate() {
        out.insert(ctx.zero());
        for &b in &pts[i + 1..] {
            out.insert(distance(ctx, a, b));
        }
    }
    out
}

/// `{ ||x - y|| : y in set, ||x - y|| != 0 }`. The pin need not lie in the set.
pub fn pinned_nonzero_distances(pin: PlanePoint, set: &PointSet) -> BTreeSet<FieldElem> {
    let ctx = set.ctx();
    set.iter()
        .map(|y| distance(ctx, pin, y))
        .filter(|d| !d.is_zero())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SphereHistogram {
    pub pin: PlanePoint,
    /// Radius to number of points on the circle of that radius around the pin.
    pub counts: BTreeMap<FieldElem, u64>,
}

impl SphereHistogram {
    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }
}

pub fn sphere_histogram(pin: PlanePoint, set: &PointSet) -> SphereHistogram {
    let ctx = set.ctx();
    let mut counts = BTreeMap::new();
    for y in set.iter() {
        *counts.entry(distance(ctx, pin, y)).or_default() += 1;
    }
    SphereHistogram { pin, counts }
}

/// Which apex distances an isosceles triple may have.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TripleMode {
    /// `||a-b|| = ||a-c||` and `||b-c|| != 0`; the common apex distance may be zero.
    #[default]
    Paper,
    /// As `Paper`, and additionally `||a-b|| != 0`.
    Strict,
}

impl fmt::Display for TripleMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TripleMode::Paper => "paper",
            TripleMode::Strict => "strict",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TripleCount {
    pub value: u64,
    pub mode: TripleMode,
}

/// Per-apex sums of squared circle counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SquareSums {
    /// `sum_x sum_delta h_x(delta)^2`: triples with `||x-b|| = ||x-c||`, any `b, c`.
    pub all: u64,
    /// The same restricted to `delta != 0`.
    pub nonzero: u64,
    /// `#{(x, y) : ||x - y|| != 0}`, which is also `sum_x sum_{delta in D*_x} |E cap (x + C_delta)|`.
    pub nonzero_pairs: u64,
}

impl std::ops::Add for SquareSums {
    type Output = SquareSums;
    fn add(self, o: SquareSums) -> SquareSums {
        SquareSums {
            all: self.all + o.all,
            nonzero: self.nonzero + o.nonzero,
            nonzero_pairs: self.nonzero_pairs + o.nonzero_pairs,
        }
    }
}

enum Scratch {
    Dense(Vec<u32>, Vec<u32>),
    Sparse(HashMap<FieldElem, u64>),
}

impl Scratch {
    fn new(ctx: &FieldCtx) -> Scratch {
        if ctx.q() <= DENSE_LIMIT {
            Scratch::Dense(vec![0; ctx.q() as usize], Vec::new())
        } else {
            Scratch::Sparse(HashMap::new())
        }
    }

    fn apex(&mut self, ctx: &FieldCtx, apex: PlanePoint, set: &PointSet) -> SquareSums {
        let mut sums = SquareSums::default();
        let mut tally = |delta: u32, h: u64| {
            sums.all += h * h;
            if delta != 0 {
                sums.nonzero += h * h;
                sums.nonzero_pairs += h;
            }
        };
        match self {
            Scratch::Dense(bins, touched) => {
                for y in set.iter() {
                    let r = distance(ctx, apex, y).rank();
                    if bins[r as usize] == 0 {
                        touched.push(r);
                    }
                    bins[r as usize] += 1;
                }
                for r in touched.drain(..) {
                    tally(r, bins[r as usize] as u64);
                    bins[r as usize] = 0;
                }
            }
            Scratch::Sparse(map) => {
                for y in set.iter() {
                    *map.entry(distance(ctx, apex, y)).or_default() += 1;
                }
                for (d, h) in map.drain() {
                    tally(d.rank(), h);
                }
            }
        }
        sums
    }
}

/// Histogram square sums over all apexes in `apexes`, parallel over apexes.
pub fn square_sums(apexes: &PointSet, set: &PointSet) -> SquareSums {
    let ctx = set.ctx();
    apexes
        .points()
        .par_iter()
        .map_init(|| Scratch::new(ctx), |scratch, &a| scratch.apex(ctx, a, set))
        .reduce(SquareSums::default, |x, y| x + y)
}

/// Ordered pairs `(b, c)`, `b != c`, of `set` at distance zero. Such pairs lie on a
/// common isotropic line, so only points sharing one need to be compared.
pub fn zero_distance_pairs(set: &PointSet) -> Vec<(PlanePoint, PlanePoint)> {
    let ctx = set.ctx();
    let mut out = Vec::new();
    for (_, i) in crate::plane::isotropic_directions(ctx) {
        let mut groups: BTreeMap<FieldElem, Vec<PlanePoint>> = BTreeMap::new();
        for p in set.iter() {
            groups.entry(ctx.sub(p.y, ctx.mul(i, p.x))).or_default().push(p);
        }
        for g in groups.values() {
            for &b in g {
                for &c in g {
                    if b != c {
                        debug_assert!(distance(ctx, b, c).is_zero());
                        out.push((b, c));
                    }
                }
            }
        }
    }
    out
}

/// Number of triples `(a, b, c)` in `apexes x set x set` with `||a-b|| = ||a-c||`,
/// `||b-c|| != 0`, and, in strict mode, `||a-b|| != 0`.
///
/// Sums squared sphere-histogram counts per apex, then removes the triples whose base
/// has distance zero: `b = c` directly, and `b != c` isotropic pairs by testing apexes
/// on their bisector.
pub fn isosceles_triples(apexes: &PointSet, set: &PointSet, mode: TripleMode) -> TripleCount {
    let ctx = set.ctx();
    let sums = square_sums(apexes, set);

    let mut apexes_on_line: HashMap<LineF, Vec<PlanePoint>> = HashMap::new();
    for (_, i) in crate::plane::isotropic_directions(ctx) {
        for a in apexes.iter() {
            let l = LineF::through(ctx, a, ctx.one(), i).expect("nonzero direction");
            apexes_on_line.entry(l).or_default().push(a);
        }
    }
    let mut degenerate_all = 0u64;
    let mut degenerate_nonzero = 0u64;
    for (b, c) in zero_distance_pairs(set) {
        let l = bisector(ctx, b, c).expect("distinct points");
        let scanned;
        let on_line: &[PlanePoint] = if l.is_isotropic() {
            apexes_on_line.get(&l).map(Vec::as_slice).unwrap_or(&[])
        } else {
            scanned = apexes.iter().filter(|&a| l.contains(ctx, a)).collect::<Vec<_>>();
            &scanned
        };
        degenerate_all += on_line.len() as u64;
        degenerate_nonzero += on_line.iter().filter(|&&a| !distance(ctx, a, b).is_zero()).count() as u64;
    }

    let value = match mode {
        TripleMode::Paper => sums.all - apexes.len() as u64 * set.len() as u64 - degenerate_all,
        TripleMode::Strict => sums.nonzero - sums.nonzero_pairs - degenerate_nonzero,
    };
    TripleCount { value, mode }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BisectorVariant {
    /// `B(a,b) = B(c,d)` with `||a-b|| != 0`; nothing asked of `(c, d)` beyond `c != d`.
    #[default]
    Paper,
    /// Both pairs at nonzero distance.
    Symmetric,
}

impl fmt::Display for BisectorVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BisectorVariant::Paper => "paper",
            BisectorVariant::Symmetric => "symmetric",
        })
    }
}

/// Bisector energy: quadruples `(a, b, c, d)` with `a != b`, `c != d`, `B(a,b) = B(c,d)`
/// and the variant's distance conditions.
pub fn bisector_energy(set: &PointSet, variant: BisectorVariant) -> u64 {
    let ctx = set.ctx();
    // line -> (ordered pairs, ordered pairs at nonzero distance)
    let mut buckets: HashMap<LineF, (u64, u64)> = HashMap::new();
    for a in set.iter() {
        for b in set.iter() {
            if a == b {
                continue;
            }
            let entry = buckets.entry(bisector(ctx, a, b).expect("distinct")).or_default();
            entry.0 += 1;
            if !distance(ctx, a, b).is_zero() {
                entry.1 += 1;
            }
        }
    }
    buckets
        .values()
        .map(|&(all, nz)| match variant {
            BisectorVariant::Paper => nz * all,
            BisectorVariant::Symmetric => nz * nz,
        })
        .sum()
}
