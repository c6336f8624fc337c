//! Distinct pinned trees: exact counts against the recursive lower bound.

use ffgeom::field::FieldCtx;
use ffgeom::plane::PointSet;
use ffgeom::trees::{count_distinct_pinned_trees, pinned_tree_lower_bound, CountMode, SplitStrategy, TreeSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f7 = FieldCtx::prime(7)?;
    let pool = PointSet::full_plane(&f7).take(20);
    let pin = pool.points()[0];
    let trees = [
        "vertices=2 edges=1-2 pin=1",
        "vertices=3 edges=1-2,2-3 pin=1",
        "vertices=3 edges=1-2,1-3 pin=1",
        "vertices=4 edges=1-2,2-3,3-4 pin=2",
    ];
    for text in trees {
        let tree: TreeSpec = text.parse()?;
        let all = count_distinct_pinned_trees(&f7, &tree, pin, &pool, CountMode::All, u64::MAX)?;
        let nonzero = count_distinct_pinned_trees(&f7, &tree, pin, &pool, CountMode::Nonzero, u64::MAX)?;
        let (bound, trace) = pinned_tree_lower_bound(&f7, &tree, pin, &pool, SplitStrategy::Alternating)?;
        println!("{text:<36} all {all:>5}  nonzero {nonzero:>5}  lower bound {bound:>4} ({:?} case)", trace.case);
    }
    Ok(())
}
