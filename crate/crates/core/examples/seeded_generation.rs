//! Every generator kind, with the point-file round trip.

use ffgeom::experiment::{generate, GenKind, GenSpec};
use ffgeom::field::FieldCtx;
use ffgeom::plane::PointSet;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f5 = FieldCtx::prime(5)?;
    let kinds = [
        GenKind::Random { size: 6 },
        GenKind::Grid { side: 2 },
        GenKind::Line { size: 4, slope: 3, intercept: 1 },
        GenKind::IsotropicLine { size: 5, offset: 0 },
        GenKind::CircleUnion { center: (1, 1), radii: vec![1, 2] },
        GenKind::Product { a: 2, b: 3 },
    ];
    for kind in kinds {
        let set = generate(&f5, &GenSpec::new(kind.clone(), 99))?;
        let pts: Vec<String> = set.iter().map(|p| p.format(&f5)).collect();
        println!("{kind:?}\n  {} points: {}", set.len(), pts.join(" "));
        assert_eq!(PointSet::parse_file(&set.to_file_string())?, set);
    }
    let f3 = FieldCtx::prime(3)?;
    println!("isotropic line over F_3: {:?}", generate(&f3, &GenSpec::new(GenKind::IsotropicLine { size: 3, offset: 0 }, 0)).unwrap_err());
    Ok(())
}
