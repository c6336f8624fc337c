//! Geometry of the plane `F_q^2` under the quadratic distance form
//! `||u - v|| = (u_x - v_x)^2 + (u_y - v_y)^2`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use thiserror::Error;

use crate::field::{FieldCtx, FieldElem};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlaneError {
    #[error("bisector of a point with itself is undefined")]
    EqualPoints,
    #[error("line coefficients a and b are both zero")]
    DegenerateLine,
    #[error("point file: {0}")]
    Parse(String),
    #[error("point sets live over different fields")]
    FieldMismatch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PlanePoint {
    pub x: FieldElem,
    pub y: FieldElem,
}

impl PlanePoint {
    pub fn new(x: FieldElem, y: FieldElem) -> Self {
        PlanePoint { x, y }
    }

    /// Point with prime-field integer coordinates reduced mod `p`.
    pub fn from_ints(ctx: &FieldCtx, x: i64, y: i64) -> Self {
        PlanePoint { x: ctx.from_int(x), y: ctx.from_int(y) }
    }

    /// Dense index `x * q + y` in lexicographic plane order.
    pub fn index(self, ctx: &FieldCtx) -> u64 {
        self.x.rank() as u64 * ctx.q() as u64 + self.y.rank() as u64
    }

    pub fn from_index(ctx: &FieldCtx, idx: u64) -> Self {
        let q = ctx.q() as u64;
        PlanePoint {
            x: ctx.from_rank((idx / q) as u32).expect("index below q^2"),
            y: ctx.from_rank((idx % q) as u32).expect("index below q^2"),
        }
    }

    pub fn format(self, ctx: &FieldCtx) -> String {
        format!("{},{}", ctx.format_elem(self.x), ctx.format_elem(self.y))
    }

    pub fn parse(ctx: &FieldCtx, text: &str) -> Result<Self, PlaneError> {
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let (x, y) = compact
            .split_once(',')
            .ok_or_else(|| PlaneError::Parse(format!("expected `x,y`, got {text:?}")))?;
        Ok(PlanePoint {
            x: ctx.parse_elem(x).map_err(PlaneError::Parse)?,
            y: ctx.parse_elem(y).map_err(PlaneError::Parse)?,
        })
    }
}

#[inline]
pub fn distance(ctx: &FieldCtx, u: PlanePoint, v: PlanePoint) -> FieldElem {
    let dx = ctx.sub(u.x, v.x);
    let dy = ctx.sub(u.y, v.y);
    ctx.add(ctx.square(dx), ctx.square(dy))
}

/// A deduplicated, lexicographically ordered set of points over one field.
#[derive(Clone, PartialEq, Eq)]
pub struct PointSet {
    ctx: FieldCtx,
    points: Vec<PlanePoint>,
}

impl fmt::Debug for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PointSet")
            .field("q", &self.ctx.q())
            .field("points", &self.points)
            .finish()
    }
}

impl PointSet {
    pub fn new(ctx: &FieldCtx, points: impl IntoIterator<Item = PlanePoint>) -> Self {
        let mut points: Vec<PlanePoint> = points.into_iter().collect();
        points.sort_unstable();
        points.dedup();
        PointSet { ctx: ctx.clone(), points }
    }

    pub fn empty(ctx: &FieldCtx) -> Self {
        PointSet { ctx: ctx.clone(), points: Vec::new() }
    }

    /// Every point of `F_q^2`. Costs `q^2` memory; opt-in.
    pub fn full_plane(ctx: &FieldCtx) -> Self {
        let points = ctx
            .elements()
            .flat_map(|x| ctx.elements().map(move |y| PlanePoint { x, y }))
            .collect();
        PointSet { ctx: ctx.clone(), points }
    }

    pub fn from_ints(ctx: &FieldCtx, coords: &[(i64, i64)]) -> Self {
        Self::new(ctx, coords.iter().map(|&(x, y)| PlanePoint::from_ints(ctx, x, y)))
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[PlanePoint] {
        &self.points
    }

    pub fn iter(&self) -> impl Iterator<Item = PlanePoint> + '_ {
        self.points.iter().copied()
    }

    pub fn contains(&self, p: PlanePoint) -> bool {
        self.points.binary_search(&p).is_ok()
    }

    pub fn union(&self, other: &PointSet) -> PointSet {
        PointSet::new(&self.ctx, self.iter().chain(other.iter()))
    }

    pub fn without(&self, p: PlanePoint) -> PointSet {
        PointSet {
            ctx: self.ctx.clone(),
            points: self.points.iter().copied().filter(|&x| x != p).collect(),
        }
    }

    pub fn is_subset(&self, other: &PointSet) -> bool {
        self.iter().all(|p| other.contains(p))
    }

    pub fn is_disjoint(&self, other: &PointSet) -> bool {
        self.iter().all(|p| !other.contains(p))
    }

    /// The first `n` points in lexicographic order.
    pub fn take(&self, n: usize) -> PointSet {
        PointSet {
            ctx: self.ctx.clone(),
            points: self.points[..n.min(self.points.len())].to_vec(),
        }
    }

    pub fn filter(&self, mut keep: impl FnMut(PlanePoint) -> bool) -> PointSet {
        PointSet {
            ctx: self.ctx.clone(),
            points: self.points.iter().copied().filter(|&p| keep(p)).collect(),
        }
    }

    /// Splits by alternating lexicographic rank: even positions, then odd positions.
    pub fn split_alternating(&self) -> (PointSet, PointSet) {
        let (mut even, mut odd) = (Vec::new(), Vec::new());
        for (i, &p) in self.points.iter().enumerate() {
            if i % 2 == 0 { even.push(p) } else { odd.push(p) }
        }
        (
            PointSet { ctx: self.ctx.clone(), points: even },
            PointSet { ctx: self.ctx.clone(), points: odd },
        )
    }

    /// Serializes to the point-file format: `p=<p> e=<e>` then one `x,y` per line.
    pub fn to_file_string(&self) -> String {
        let mut out = format!("p={} e={}\n", self.ctx.p(), self.ctx.degree());
        for p in &self.points {
            out.push_str(&p.format(&self.ctx));
            out.push('\n');
        }
        out
    }

    /// Parses a point file, building the field from its header.
    pub fn parse_file(text: &str) -> Result<PointSet, PlaneError> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| PlaneError::Parse("missing header line".into()))?;
        let (p, e) = parse_header(header)?;
        let ctx = FieldCtx::new(p, e).map_err(|err| PlaneError::Parse(err.to_string()))?;
        let points = lines
            .map(|l| PlanePoint::parse(&ctx, l))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(PointSet::new(&ctx, points))
    }
}

fn parse_header(line: &str) -> Result<(u64, u32), PlaneError> {
    let compact: String = line.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || PlaneError::Parse(format!("bad header {line:?}, expected `p=<p> e=<e>`"));
    let rest = compact.strip_prefix("p=").ok_or_else(bad)?;
    let (p, e) = rest.split_once("e=").ok_or_else(bad)?;
    Ok((p.parse().map_err(|_| bad())?, e.parse().map_err(|_| bad())?))
}

/// Which points [`circle_points`] searches.
#[derive(Debug, Clone, Copy)]
pub enum Domain<'a> {
    Set(&'a PointSet),
    /// All of `F_q^2`, enumerated through square roots in `O(q)`.
    FullPlane,
}

/// Points `y` of the domain with `||center - y|| = radius`.
pub fn circle_points(
    ctx: &FieldCtx,
    center: PlanePoint,
    radius: FieldElem,
    domain: Domain<'_>,
) -> PointSet {
    match domain {
        Domain::Set(set) => set.filter(|y| distance(ctx, center, y) == radius),
        Domain::FullPlane => {
            let mut pts = Vec::new();
            for x in ctx.elements() {
                let dx = ctx.sub(x, center.x);
                let need = ctx.sub(radius, ctx.square(dx));
                for r in ctx.sqrt(need) {
                    pts.push(PlanePoint { x, y: ctx.add(center.y, r) });
                }
            }
            PointSet::new(ctx, pts)
        }
    }
}

/// Directions `(1, i)` with `1 + i^2 = 0`, sorted by `i`. Empty when `-1` is a non-square.
pub fn isotropic_directions(ctx: &FieldCtx) -> Vec<(FieldElem, FieldElem)> {
    let minus_one = ctx.neg(ctx.one());
    ctx.sqrt(minus_one).into_iter().map(|i| (ctx.one(), i)).collect()
}

/// Largest number of points of `set` on a single isotropic line.
pub fn max_isotropic_line_count(set: &PointSet) -> usize {
    let ctx = set.ctx();
    let mut best = 0;
    for (_, i) in isotropic_directions(ctx) {
        // points on the line through (x0, y0) with direction (1, i) share y - i x
        let mut counts: HashMap<FieldElem, usize> = HashMap::new();
        for p in set.iter() {
            let key = ctx.sub(p.y, ctx.mul(i, p.x));
            *counts.entry(key).or_default() += 1;
        }
        best = best.max(counts.values().copied().max().unwrap_or(0));
    }
    best
}

/// The line `{(x, y) : a x + b y = c}` scaled so the first nonzero of `(a, b)` is 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LineF {
    a: FieldElem,
    b: FieldElem,
    c: FieldElem,
    isotropic: bool,
}

impl LineF {
    pub fn new(ctx: &FieldCtx, a: FieldElem, b: FieldElem, c: FieldElem) -> Result<LineF, PlaneError> {
        let lead = if !a.is_zero() {
            a
        } else if !b.is_zero() {
            b
        } else {
            return Err(PlaneError::DegenerateLine);
        };
        let s = ctx.inv(lead).expect("nonzero lead");
        let (a, b, c) = (ctx.mul(a, s), ctx.mul(b, s), ctx.mul(c, s));
        let isotropic = ctx.add(ctx.square(a), ctx.square(b)).is_zero();
        Ok(LineF { a, b, c, isotropic })
    }

    /// Line through `p` with direction `(dx, dy)`.
    pub fn through(ctx: &FieldCtx, p: PlanePoint, dx: FieldElem, dy: FieldElem) -> Result<LineF, PlaneError> {
        // normal (dy, -dx)
        let a = dy;
        let b = ctx.neg(dx);
        let c = ctx.add(ctx.mul(a, p.x), ctx.mul(b, p.y));
        LineF::new(ctx, a, b, c)
    }

    pub fn coefficients(&self) -> (FieldElem, FieldElem, FieldElem) {
        (self.a, self.b, self.c)
    }

    pub fn is_isotropic(&self) -> bool {
        self.isotropic
    }

    #[inline]
    pub fn contains(&self, ctx: &FieldCtx, p: PlanePoint) -> bool {
        ctx.add(ctx.mul(self.a, p.x), ctx.mul(self.b, p.y)) == self.c
    }
}

/// Perpendicular bisector `{z : ||z - a|| = ||z - b||}`, i.e. `2(b - a) . z = |b|^2 - |a|^2`.
pub fn bisector(ctx: &FieldCtx, a: PlanePoint, b: PlanePoint) -> Result<LineF, PlaneError> {
    if a == b {
        return Err(PlaneError::EqualPoints);
    }
    let two = ctx.from_int(2);
    let la = ctx.mul(two, ctx.sub(b.x, a.x));
    let lb = ctx.mul(two, ctx.sub(b.y, a.y));
    let norm = |w: PlanePoint| ctx.add(ctx.square(w.x), ctx.square(w.y));
    let c = ctx.sub(norm(b), norm(a));
    LineF::new(ctx, la, lb, c)
}

/// Lines with multiplicities.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LineMultiset {
    entries: BTreeMap<LineF, u64>,
    total: u64,
}

impl LineMultiset {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, line: LineF, multiplicity: u64) {
        if multiplicity == 0 {
            return;
        }
        *self.entries.entry(line).or_default() += multiplicity;
        self.total += multiplicity;
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn distinct(&self) -> usize {
        self.entries.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (LineF, u64)> + '_ {
        self.entries.iter().map(|(&l, &m)| (l, m))
    }

    pub fn multiplicity(&self, line: &LineF) -> u64 {
        self.entries.get(line).copied().unwrap_or(0)
    }

    /// `sum m(l)^2` over distinct lines.
    pub fn square_sum(&self) -> u128 {
        self.entries.values().map(|&m| m as u128 * m as u128).sum()
    }

    /// Bisectors of all ordered pairs of `set` at nonzero distance.
    pub fn nonzero_bisectors(set: &PointSet) -> LineMultiset {
        let ctx = set.ctx();
        let mut out = LineMultiset::new();
        for a in set.iter() {
            for b in set.iter() {
                if a != b && !distance(ctx, a, b).is_zero() {
                    out.insert(bisector(ctx, a, b).expect("distinct points"), 1);
                }
            }
        }
        out
    }
}

impl FromIterator<LineF> for LineMultiset {
    fn from_iter<I: IntoIterator<Item = LineF>>(iter: I) -> Self {
        let mut out = LineMultiset::new();
        for l in iter {
            out.insert(l, 1);
        }
        out
    }
}

/// Number of incidences `sum_{x in F} sum_l m(l) [x in l]`.
///
/// Lines are grouped by normal direction; each point then needs one lookup per
/// distinct direction instead of one test per line.
pub fn incidences(points: &PointSet, lines: &LineMultiset) -> u64 {
    let ctx = points.ctx();
    let mut by_normal: HashMap<(FieldElem, FieldElem), HashMap<FieldElem, u64>> = HashMap::new();
    for (l, m) in lines.iter() {
        *by_normal.entry((l.a, l.b)).or_default().entry(l.c).or_default() += m;
    }
    let mut total = 0;
    for x in points.iter() {
        for (&(a, b), offsets) in &by_normal {
            let c = ctx.add(ctx.mul(a, x.x), ctx.mul(b, x.y));
            total += offsets.get(&c).copied().unwrap_or(0);
        }
    }
    total
}
