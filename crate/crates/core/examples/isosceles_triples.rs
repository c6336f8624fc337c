//! Isosceles triple counts in both modes, checked against brute force.

use ffgeom::field::FieldCtx;
use ffgeom::plane::{distance, PointSet};
use ffgeom::stats::{isosceles_triples, pinned_nonzero_distances, TripleMode};

fn brute(set: &PointSet, strict: bool) -> u64 {
    let ctx = set.ctx();
    let mut n = 0;
    for a in set.iter() {
        for b in set.iter() {
            for c in set.iter() {
                let d = distance(ctx, a, b);
                if d == distance(ctx, a, c) && !distance(ctx, b, c).is_zero() && !(strict && d.is_zero()) {
                    n += 1;
                }
            }
        }
    }
    n
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f3 = FieldCtx::prime(3)?;
    let plane = PointSet::full_plane(&f3);
    let origin = plane.points()[0];
    let pinned: Vec<String> = pinned_nonzero_distances(origin, &plane).into_iter().map(|d| f3.format_elem(d)).collect();
    println!("F_3^2: D*_(0,0) = {{{}}}", pinned.join(", "));
    println!("F_3^2: T* = {}", isosceles_triples(&plane, &plane, TripleMode::Paper).value);

    let f5 = FieldCtx::prime(5)?;
    let set = PointSet::from_ints(&f5, &[(0, 0), (1, 2), (2, 4), (3, 3), (4, 0), (1, 1)]);
    for mode in [TripleMode::Paper, TripleMode::Strict] {
        let fast = isosceles_triples(&set, &set, mode).value;
        println!("F_5, 6 points with an isotropic pair: {mode:>6} {fast} (brute force {})", brute(&set, mode == TripleMode::Strict));
    }
    Ok(())
}
