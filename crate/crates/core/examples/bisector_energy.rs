//! Bisector energy in both variants, and the nonzero bisector multiset.

use ffgeom::field::FieldCtx;
use ffgeom::plane::{LineMultiset, PointSet};
use ffgeom::stats::{bisector_energy, BisectorVariant};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f5 = FieldCtx::prime(5)?;
    let collinear = PointSet::from_ints(&f5, &[(0, 0), (0, 1), (0, 2)]);
    println!("three collinear points over F_5: Q = {}", bisector_energy(&collinear, BisectorVariant::Paper));

    let f11 = FieldCtx::prime(11)?;
    let grid = PointSet::from_ints(&f11, &[(0, 0), (0, 1), (1, 0), (1, 1), (2, 2), (3, 5), (7, 4)]);
    let lines = LineMultiset::nonzero_bisectors(&grid);
    println!(
        "7 points over F_11: {} ordered nonzero pairs on {} distinct bisectors, sum m^2 = {}",
        lines.total(),
        lines.distinct(),
        lines.square_sum()
    );
    for variant in [BisectorVariant::Paper, BisectorVariant::Symmetric] {
        println!("  Q ({variant}) = {}", bisector_energy(&grid, variant));
    }
    Ok(())
}
