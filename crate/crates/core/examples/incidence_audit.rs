//! The point-line incidence bound on random instances, decided exactly.

use ffgeom::certify::audit_incidence_bound;
use ffgeom::experiment::{generate, GenKind, GenSpec};
use ffgeom::field::FieldCtx;
use ffgeom::plane::LineMultiset;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut worst = (0.0f64, String::new());
    for p in [5, 7, 11, 13] {
        let ctx = FieldCtx::prime(p)?;
        for seed in 0..25u64 {
            let e = generate(&ctx, &GenSpec::new(GenKind::Random { size: 8 + seed % 10 }, seed))?;
            let f = generate(&ctx, &GenSpec::new(GenKind::Random { size: 20 }, seed + 1000))?;
            let lines = LineMultiset::nonzero_bisectors(&e);
            let report = audit_incidence_bound(&f, &lines)?;
            assert!(report.holds, "{:?}", report.witness);
            let ratio = report.lhs.to_string().parse::<f64>()? / report.rhs.to_f64();
            if ratio > worst.0 {
                worst = (ratio, format!("p = {p}, seed {seed}: I = {}, bound {}", report.lhs, report.rhs_decimal()));
            }
        }
    }
    println!("100 instances, no violations; tightest {:.3} at {}", worst.0, worst.1);
    Ok(())
}
