//! Seeded point-set generators.
//!
//! Randomness comes from SplitMix64 (`rand_xoshiro::SplitMix64`, seeded with
//! `GenSpec::seed`). A uniform index below `n` is `(r * n) >> 64` for the next output `r`.
//! `random` sets are a partial Fisher-Yates shuffle of the plane indices `x * q + y`.

use std::collections::HashMap;

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::FieldCtx;
use crate::plane::{circle_points, isotropic_directions, Domain, PlanePoint, PointSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("-1 is not a square in F_{0}, so there are no isotropic lines")]
    NoIsotropicLines(u32),
    #[error("requested {requested} points but only {available} are available")]
    SizeExceedsPlane { requested: u64, available: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GenKind {
    /// `size` distinct points, uniformly without replacement.
    Random { size: u64 },
    /// `{0..side} x {0..side}` by element rank.
    Grid { side: u64 },
    /// `(t, slope * t + intercept)` for the first `size` ranks `t`.
    Line { size: u64, slope: i64, intercept: i64 },
    /// `(t, i t + offset)` on the isotropic direction `(1, i)` with the smallest `i`.
    IsotropicLine { size: u64, offset: i64 },
    /// Union of full circles about `center`.
    CircleUnion { center: (i64, i64), radii: Vec<i64> },
    /// `A x B` for random `A, B` of sizes `a` and `b`.
    Product { a: u64, b: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenSpec {
    #[serde(flatten)]
    pub kind: GenKind,
    #[serde(default)]
    pub seed: u64,
}

impl GenSpec {
    pub fn new(kind: GenKind, seed: u64) -> Self {
        GenSpec { kind, seed }
    }
}

fn below(rng: &mut SplitMix64, n: u64) -> u64 {
    ((rng.next_u64() as u128 * n as u128) >> 64) as u64
}

/// The first `k` entries of a seeded shuffle of `0..n`.
pub fn sample_indices(seed: u64, n: u64, k: u64) -> Result<Vec<u64>, GenError> {
    if k > n {
        return Err(GenError::SizeExceedsPlane { requested: k, available: n });
    }
    let mut rng = SplitMix64::seed_from_u64(seed);
    let mut moved: HashMap<u64, u64> = HashMap::new();
    let mut out = Vec::with_capacity(k as usize);
    for i in 0..k {
        let j = i + below(&mut rng, n - i);
        let vj = *moved.get(&j).unwrap_or(&j);
        let vi = *moved.get(&i).unwrap_or(&i);
        moved.insert(j, vi);
        out.push(vj);
    }
    Ok(out)
}

fn check(requested: u64, available: u64) -> Result<(), GenError> {
    if requested > available {
        Err(GenError::SizeExceedsPlane { requested, available })
    } else {
        Ok(())
    }
}

pub fn generate(ctx: &FieldCtx, spec: &GenSpec) -> Result<PointSet, GenError> {
    let q = ctx.q() as u64;
    let rank = |r: u64| ctx.from_rank(r as u32).expect("rank below q");
    let set = match &spec.kind {
        GenKind::Random { size } => {
            let idx = sample_indices(spec.seed, q * q, *size)?;
            PointSet::new(ctx, idx.into_iter().map(|i| PlanePoint::from_index(ctx, i)))
        }
        GenKind::Grid { side } => {
            check(*side, q)?;
            PointSet::new(ctx, (0..*side).flat_map(|x| (0..*side).map(move |y| (x, y))).map(|(x, y)| PlanePoint::new(rank(x), rank(y))))
        }
        GenKind::Line { size, slope, intercept } => {
            check(*size, q)?;
            let (m, c) = (ctx.from_int(*slope), ctx.from_int(*intercept));
            PointSet::new(ctx, (0..*size).map(|t| PlanePoint::new(rank(t), ctx.add(ctx.mul(m, rank(t)), c))))
        }
        GenKind::IsotropicLine { size, offset } => {
            let &(_, i) = isotropic_directions(ctx).first().ok_or(GenError::NoIsotropicLines(ctx.q()))?;
            check(*size, q)?;
            let c = ctx.from_int(*offset);
            PointSet::new(ctx, (0..*size).map(|t| PlanePoint::new(rank(t), ctx.add(ctx.mul(i, rank(t)), c))))
        }
        GenKind::CircleUnion { center, radii } => {
            let center = PlanePoint::from_ints(ctx, center.0, center.1);
            PointSet::new(
                ctx,
                radii.iter().flat_map(|&r| circle_points(ctx, center, ctx.from_int(r), Domain::FullPlane).points().to_vec()),
            )
        }
        GenKind::Product { a, b } => {
            let xs = sample_indices(spec.seed, q, *a)?;
            let ys = sample_indices(spec.seed.wrapping_add(1), q, *b)?;
            PointSet::new(ctx, xs.iter().flat_map(|&x| ys.iter().map(move |&y| PlanePoint::new(rank(x), rank(y)))))
        }
    };
    Ok(set)
}
