//! Circles of the distance form, isotropic lines and perpendicular bisectors.

use ffgeom::field::FieldCtx;
use ffgeom::plane::{bisector, circle_points, distance, isotropic_directions, Domain, PlanePoint};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for q in [(3, 1), (5, 1), (7, 1), (13, 1), (3, 2), (5, 2)] {
        let ctx = FieldCtx::new(q.0, q.1)?;
        let origin = PlanePoint::from_ints(&ctx, 0, 0);
        let unit = circle_points(&ctx, origin, ctx.one(), Domain::FullPlane).len();
        let zero = circle_points(&ctx, origin, ctx.zero(), Domain::FullPlane).len();
        println!(
            "q = {:>2}: |C_1| = {:>2}, |C_0| = {:>2}, isotropic directions {}",
            ctx.q(),
            unit,
            zero,
            isotropic_directions(&ctx).len()
        );
    }

    let f5 = FieldCtx::prime(5)?;
    let a = PlanePoint::from_ints(&f5, 0, 0);
    let b = PlanePoint::from_ints(&f5, 1, 2);
    println!("F_5: ||(1,2) - (0,0)|| = {}", f5.format_elem(distance(&f5, a, b)));
    let line = bisector(&f5, a, b)?;
    let (x, y, c) = line.coefficients();
    println!(
        "F_5: B((0,0), (1,2)) is {}x + {}y = {} (isotropic: {})",
        f5.format_elem(x),
        f5.format_elem(y),
        f5.format_elem(c),
        line.is_isotropic()
    );
    Ok(())
}
