//! Pinned trees, their edge-length vectors, and counting of distinct vectors realised
//! by injective embeddings into a point pool.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{FieldCtx, FieldElem};
use crate::plane::{distance, PlanePoint, PointSet};
use crate::stats::pinned_nonzero_distances;

/// Default cap on `|pool|^k` for exact enumeration.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("tree spec: {0}")]
    Parse(String),
    #[error("edges do not form a tree on {0} vertices")]
    NotATree(u32),
    #[error("pin {pin} is not a vertex label in 1..={n}")]
    BadPin { pin: u32, n: u32 },
    #[error("embedding leaves vertex {0} unassigned")]
    IncompleteEmbedding(u32),
    #[error("embedding maps two vertices to the same point")]
    NonInjective,
    #[error("embedding sends the pin to the wrong point")]
    PinMismatch,
    #[error("enumeration needs {needed} steps, budget is {budget}")]
    TooLarge { needed: u128, budget: u64 },
    #[error("pool is empty once the pin is removed")]
    EmptyPool,
}

/// A tree on vertices `1..=k+1` with a distinguished pin vertex.
///
/// Edges are kept as `(i, j)` with `i < j`, sorted so first endpoints are non-decreasing
/// and, for equal first endpoints, second endpoints increase.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TreeSpec {
    num_vertices: u32,
    edges: Vec<(u32, u32)>,
    pin: u32,
}

impl TreeSpec {
    pub fn new(num_vertices: u32, edges: &[(u32, u32)], pin: u32) -> Result<TreeSpec, TreeError> {
        let n = num_vertices;
        if pin == 0 || pin > n {
            return Err(TreeError::BadPin { pin, n });
        }
        let mut canon: Vec<(u32, u32)> = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            if a == 0 || b == 0 || a > n || b > n {
                return Err(TreeError::Parse(format!("edge {a}-{b} uses a label outside 1..={n}")));
            }
            if a == b {
                return Err(TreeError::NotATree(n));
            }
            canon.push((a.min(b), a.max(b)));
        }
        canon.sort_unstable();
        if canon.is_empty() || canon.len() as u32 != n - 1 || canon.windows(2).any(|w| w[0] == w[1]) {
            return Err(TreeError::NotATree(n));
        }
        // n - 1 edges and connected => tree
        let mut parent: Vec<u32> = (0..=n).collect();
        fn find(parent: &mut [u32], mut v: u32) -> u32 {
            while parent[v as usize] != v {
                parent[v as usize] = parent[parent[v as usize] as usize];
                v = parent[v as usize];
            }
            v
        }
        for &(a, b) in &canon {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra == rb {
                return Err(TreeError::NotATree(n));
            }
            parent[ra as usize] = rb;
        }
        Ok(TreeSpec { num_vertices: n, edges: canon, pin })
    }

    /// Path `1 - 2 - ... - (k+1)`.
    pub fn path(k: u32, pin: u32) -> Result<TreeSpec, TreeError> {
        let edges: Vec<_> = (1..=k).map(|i| (i, i + 1)).collect();
        TreeSpec::new(k + 1, &edges, pin)
    }

    /// Star with center 1 and leaves `2..=k+1`.
    pub fn star(k: u32, pin: u32) -> Result<TreeSpec, TreeError> {
        let edges: Vec<_> = (2..=k + 1).map(|i| (1, i)).collect();
        TreeSpec::new(k + 1, &edges, pin)
    }

    pub fn num_vertices(&self) -> u32 {
        self.num_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn pin(&self) -> u32 {
        self.pin
    }

    pub fn with_pin(&self, pin: u32) -> Result<TreeSpec, TreeError> {
        TreeSpec::new(self.num_vertices, &self.edges, pin)
    }

    pub fn neighbors(&self, v: u32) -> Vec<u32> {
        let mut out: Vec<u32> = self
            .edges
            .iter()
            .filter_map(|&(a, b)| if a == v { Some(b) } else if b == v { Some(a) } else { None })
            .collect();
        out.sort_unstable();
        out
    }

    pub fn degree(&self, v: u32) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == v || b == v).count()
    }

    /// Index of edge `{a, b}` in canonical order.
    pub fn edge_index(&self, a: u32, b: u32) -> Option<usize> {
        let key = (a.min(b), a.max(b));
        self.edges.binary_search(&key).ok()
    }

    /// Vertices reachable from `start` without passing through `blocked`.
    fn component(&self, start: u32, blocked: u32) -> BTreeSet<u32> {
        let mut seen = BTreeSet::from([start]);
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for w in self.neighbors(v) {
                if w != blocked && seen.insert(w) {
                    stack.push(w);
                }
            }
        }
        seen
    }

    /// Induced subtree on `keep`, relabelled `1..` in increasing label order.
    fn induced(&self, keep: &BTreeSet<u32>, pin: u32) -> TreeSpec {
        let relabel: BTreeMap<u32, u32> = keep.iter().enumerate().map(|(i, &v)| (v, i as u32 + 1)).collect();
        let edges: Vec<_> = self
            .edges
            .iter()
            .filter(|(a, b)| keep.contains(a) && keep.contains(b))
            .map(|(a, b)| (relabel[a], relabel[b]))
            .collect();
        TreeSpec::new(keep.len() as u32, &edges, relabel[&pin]).expect("induced subtree of a tree")
    }

    /// For a pin of degree one: the tree with the pin removed, pinned at its former neighbour.
    pub fn remove_leaf_pin(&self) -> Option<TreeSpec> {
        if self.degree(self.pin) != 1 || self.num_edges() < 2 {
            return None;
        }
        let u = self.neighbors(self.pin)[0];
        let keep: BTreeSet<u32> = (1..=self.num_vertices).filter(|&v| v != self.pin).collect();
        Some(self.induced(&keep, u))
    }

    /// For a pin of degree at least two: two trees sharing only the pin. The first is the
    /// pin together with the branch through its smallest neighbour.
    pub fn split_at_pin(&self) -> Option<(TreeSpec, TreeSpec)> {
        let nbrs = self.neighbors(self.pin);
        if nbrs.len() < 2 {
            return None;
        }
        let mut first = self.component(nbrs[0], self.pin);
        first.insert(self.pin);
        let mut rest: BTreeSet<u32> = (1..=self.num_vertices).filter(|v| !first.contains(v)).collect();
        rest.insert(self.pin);
        Some((self.induced(&first, self.pin), self.induced(&rest, self.pin)))
    }

    /// Non-pin vertices in breadth-first order from the pin, each with its parent.
    fn bfs_from_pin(&self) -> Vec<(u32, u32)> {
        let mut order = Vec::new();
        let mut seen = BTreeSet::from([self.pin]);
        let mut frontier = vec![self.pin];
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for v in frontier {
                for w in self.neighbors(v) {
                    if seen.insert(w) {
                        order.push((w, v));
                        next.push(w);
                    }
                }
            }
            frontier = next;
        }
        order
    }
}

impl fmt::Display for TreeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let edges: Vec<String> = self.edges.iter().map(|(a, b)| format!("{a}-{b}")).collect();
        write!(f, "vertices={} edges={} pin={}", self.num_vertices, edges.join(","), self.pin)
    }
}

impl FromStr for TreeSpec {
    type Err = TreeError;

    /// Grammar: `vertices=<n> edges=<i>-<j>[,<i>-<j>]* pin=<v>`.
    fn from_str(text: &str) -> Result<TreeSpec, TreeError> {
        let err = |msg: &str| TreeError::Parse(format!("{msg} in {text:?}"));
        let mut vertices = None;
        let mut edges = None;
        let mut pin = None;
        for token in text.split_whitespace() {
            let (key, value) = token.split_once('=').ok_or_else(|| err("expected key=value"))?;
            match key {
                "vertices" => vertices = Some(value.parse::<u32>().map_err(|_| err("bad vertex count"))?),
                "pin" => pin = Some(value.parse::<u32>().map_err(|_| err("bad pin"))?),
                "edges" => {
                    let parsed = value
                        .split(',')
                        .map(|e| {
                            let (a, b) = e.split_once('-').ok_or_else(|| err("edge must be i-j"))?;
                            Ok((
                                a.parse::<u32>().map_err(|_| err("bad edge endpoint"))?,
                                b.parse::<u32>().map_err(|_| err("bad edge endpoint"))?,
                            ))
                        })
                        .collect::<Result<Vec<_>, TreeError>>()?;
                    edges = Some(parsed);
                }
                _ => return Err(err("unknown key")),
            }
        }
        let (Some(n), Some(edges), Some(pin)) = (vertices, edges, pin) else {
            return Err(err("missing vertices, edges or pin"));
        };
        TreeSpec::new(n, &edges, pin)
    }
}

pub fn parse_tree_spec(text: &str) -> Result<TreeSpec, TreeError> {
    text.parse()
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeLengthVector(pub Vec<FieldElem>);

impl EdgeLengthVector {
    pub fn has_zero(&self) -> bool {
        self.0.iter().any(|d| d.is_zero())
    }
}

/// Injective assignment of tree vertices to points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Embedding {
    assignment: BTreeMap<u32, PlanePoint>,
}

impl Embedding {
    pub fn new(pairs: impl IntoIterator<Item = (u32, PlanePoint)>) -> Result<Embedding, TreeError> {
        let assignment: BTreeMap<u32, PlanePoint> = pairs.into_iter().collect();
        let images: HashSet<PlanePoint> = assignment.values().copied().collect();
        if images.len() != assignment.len() {
            return Err(TreeError::NonInjective);
        }
        Ok(Embedding { assignment })
    }

    /// As [`Embedding::new`], also requiring the tree's pin to map to `pin_point`.
    pub fn pinned(
        tree: &TreeSpec,
        pin_point: PlanePoint,
        pairs: impl IntoIterator<Item = (u32, PlanePoint)>,
    ) -> Result<Embedding, TreeError> {
        let emb = Embedding::new(pairs)?;
        match emb.get(tree.pin()) {
            Some(p) if p == pin_point => Ok(emb),
            _ => Err(TreeError::PinMismatch),
        }
    }

    pub fn get(&self, v: u32) -> Option<PlanePoint> {
        self.assignment.get(&v).copied()
    }
}

pub fn edge_length_vector(
    ctx: &FieldCtx,
    tree: &TreeSpec,
    emb: &Embedding,
) -> Result<EdgeLengthVector, TreeError> {
    if let Some(v) = (1..=tree.num_vertices()).find(|&v| emb.get(v).is_none()) {
        return Err(TreeError::IncompleteEmbedding(v));
    }
    Ok(EdgeLengthVector(
        tree.edges()
            .iter()
            .map(|&(a, b)| distance(ctx, emb.get(a).unwrap(), emb.get(b).unwrap()))
            .collect(),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CountMode {
    All,
    /// Discard vectors with a zero entry.
    #[default]
    Nonzero,
}

impl fmt::Display for CountMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CountMode::All => "all",
            CountMode::Nonzero => "nonzero",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum VectorKey {
    Packed(u128),
    Wide(Box<[u32]>),
}

struct Enumerator<'a> {
    ctx: &'a FieldCtx,
    pool: &'a [PlanePoint],
    /// (edge index, parent slot) for each non-pin vertex in BFS order; slot 0 is the pin.
    steps: Vec<(usize, usize)>,
    nonzero: bool,
    bits: u32,
    packed: bool,
}

impl Enumerator<'_> {
    fn key(&self, lengths: &[FieldElem]) -> VectorKey {
        if self.packed {
            let mut acc = 0u128;
            for d in lengths {
                acc = (acc << self.bits) | d.rank() as u128;
            }
            VectorKey::Packed(acc)
        } else {
            VectorKey::Wide(lengths.iter().map(|d| d.rank()).collect())
        }
    }

    fn extend(
        &self,
        depth: usize,
        placed: &mut Vec<PlanePoint>,
        used: &mut [bool],
        lengths: &mut [FieldElem],
        out: &mut HashSet<VectorKey>,
    ) {
        if depth == self.steps.len() {
            out.insert(self.key(lengths));
            return;
        }
        let (edge, parent) = self.steps[depth];
        let anchor = placed[parent];
        for (j, &y) in self.pool.iter().enumerate() {
            if used[j] {
                continue;
            }
            let d = distance(self.ctx, anchor, y);
            if self.nonzero && d.is_zero() {
                continue;
            }
            used[j] = true;
            placed.push(y);
            lengths[edge] = d;
            self.extend(depth + 1, placed, used, lengths, out);
            placed.pop();
            used[j] = false;
        }
    }
}

/// Number of distinct edge-length vectors over injective embeddings sending the pin to
/// `pin_point` and every other vertex into `pool` (with `pin_point` removed).
pub fn count_distinct_pinned_trees(
    ctx: &FieldCtx,
    tree: &TreeSpec,
    pin_point: PlanePoint,
    pool: &PointSet,
    mode: CountMode,
    budget: u64,
) -> Result<u64, TreeError> {
    let pool = pool.without(pin_point);
    let k = tree.num_edges() as u32;
    let needed = (pool.len() as u128).checked_pow(k).unwrap_or(u128::MAX);
    if needed > budget as u128 {
        return Err(TreeError::TooLarge { needed, budget });
    }
    let order = tree.bfs_from_pin();
    let mut slot = BTreeMap::from([(tree.pin(), 0usize)]);
    let mut steps = Vec::with_capacity(order.len());
    for (i, &(v, parent)) in order.iter().enumerate() {
        slot.insert(v, i + 1);
        steps.push((tree.edge_index(v, parent).expect("tree edge"), slot[&parent]));
    }
    let bits = 32 - (ctx.q() - 1).max(1).leading_zeros();
    let enumerator = Enumerator {
        ctx,
        pool: pool.points(),
        steps,
        nonzero: mode == CountMode::Nonzero,
        bits,
        packed: bits * k <= 128,
    };
    let pts = pool.points();
    let (first_edge, _) = enumerator.steps[0];
    // split the search over the first non-pin vertex; union the per-branch sets
    let merged = (0..pts.len())
        .into_par_iter()
        .map(|j| {
            let mut out = HashSet::new();
            let d = distance(ctx, pin_point, pts[j]);
            if enumerator.nonzero && d.is_zero() {
                return out;
            }
            let mut used = vec![false; pts.len()];
            used[j] = true;
            let mut placed = vec![pin_point, pts[j]];
            let mut lengths = vec![FieldElem::ZERO; k as usize];
            lengths[first_edge] = d;
            enumerator.extend(1, &mut placed, &mut used, &mut lengths, &mut out);
            out
        })
        .reduce(HashSet::new, |mut a, b| {
            if a.len() < b.len() {
                return b.into_iter().chain(a).collect();
            }
            a.extend(b);
            a
        });
    Ok(merged.len() as u64)
}

/// How a pool is divided into two disjoint halves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitStrategy {
    /// Even lexicographic positions, then odd ones.
    #[default]
    Alternating,
    /// First `floor(n/2)` points, then the rest.
    Contiguous,
}

impl SplitStrategy {
    pub fn split(self, pool: &PointSet) -> (PointSet, PointSet) {
        match self {
            SplitStrategy::Alternating => pool.split_alternating(),
            SplitStrategy::Contiguous => {
                let half = pool.len() / 2;
                let first = pool.take(half);
                let second = pool.filter(|p| !first.contains(p));
                (first, second)
            }
        }
    }
}

impl fmt::Display for SplitStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SplitStrategy::Alternating => "alternating",
            SplitStrategy::Contiguous => "contiguous",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundCase {
    Base,
    Deg1,
    Split,
}

/// One step of the lower-bound recursion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundNode {
    pub case: BoundCase,
    pub tree: TreeSpec,
    pub pin_point: PlanePoint,
    pub pool: PointSet,
    /// Disjoint halves of `pool` (empty for the base case).
    pub sub_pools: Vec<PointSet>,
    /// `|D*_x|` over the pool (base) or the second half (deg1).
    pub distinct_distances: usize,
    pub value: u64,
    pub children: Vec<BoundNode>,
}

/// A lower bound on `count_distinct_pinned_trees(.., CountMode::Nonzero, ..)`.
///
/// * one edge: `|D*_x(pool)|`;
/// * pin of degree one with neighbour `u`: split the pool into `P1, P2`; for each
///   `delta in D*_x(P2)` pick the `y in P2` at distance `delta` with the best bound for
///   `T - pin` pinned at `y` over `P1`; return `|D*_x(P2)|` times the smallest of those;
/// * pin of degree two or more: split the tree at the pin and the pool in two, and
///   multiply the bounds of the halves.
///
/// Halves of the pool are disjoint and exclude the pin, so every combination of sub-trees
/// is an injective embedding with a distinct edge-length vector.
pub fn pinned_tree_lower_bound(
    ctx: &FieldCtx,
    tree: &TreeSpec,
    pin_point: PlanePoint,
    pool: &PointSet,
    split: SplitStrategy,
) -> Result<(u64, BoundNode), TreeError> {
    let pool = pool.without(pin_point);
    if pool.is_empty() {
        return Err(TreeError::EmptyPool);
    }
    let node = bound_node(ctx, tree, pin_point, pool, split);
    Ok((node.value, node))
}

fn bound_node(ctx: &FieldCtx, tree: &TreeSpec, x: PlanePoint, pool: PointSet, split: SplitStrategy) -> BoundNode {
    if tree.num_edges() == 1 {
        let d = pinned_nonzero_distances(x, &pool).len();
        return BoundNode {
            case: BoundCase::Base,
            tree: tree.clone(),
            pin_point: x,
            pool,
            sub_pools: Vec::new(),
            distinct_distances: d,
            value: d as u64,
            children: Vec::new(),
        };
    }
    let (p1, p2) = split.split(&pool);
    if let Some(rest) = tree.remove_leaf_pin() {
        let mut best: BTreeMap<FieldElem, BoundNode> = BTreeMap::new();
        if !p1.is_empty() {
            for y in p2.iter() {
                let d = distance(ctx, x, y);
                if d.is_zero() {
                    continue;
                }
                let child = bound_node(ctx, &rest, y, p1.clone(), split);
                match best.get(&d) {
                    Some(cur) if cur.value >= child.value => {}
                    _ => {
                        best.insert(d, child);
                    }
                }
            }
        }
        let distinct = pinned_nonzero_distances(x, &p2).len();
        let min_child = best.values().map(|c| c.value).min().unwrap_or(0);
        let value = if p1.is_empty() { 0 } else { distinct as u64 * min_child };
        BoundNode {
            case: BoundCase::Deg1,
            tree: tree.clone(),
            pin_point: x,
            pool,
            sub_pools: vec![p1, p2],
            distinct_distances: distinct,
            value,
            children: best.into_values().collect(),
        }
    } else {
        let (t1, t2) = tree.split_at_pin().expect("pin of degree >= 2");
        let c1 = bound_node(ctx, &t1, x, p1.clone(), split);
        let c2 = bound_node(ctx, &t2, x, p2.clone(), split);
        BoundNode {
            case: BoundCase::Split,
            tree: tree.clone(),
            pin_point: x,
            pool,
            sub_pools: vec![p1, p2],
            distinct_distances: 0,
            value: c1.value * c2.value,
            children: vec![c1, c2],
        }
    }
}
