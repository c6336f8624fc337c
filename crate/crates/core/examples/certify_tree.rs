//! Certify good pins for a tree, re-check the certificate, and show that tampering is caught.

use ffgeom::certify::json::certificate_json;
use ffgeom::certify::{certify_tree, verify_certificate, CertifyParams, Regime};
use ffgeom::experiment::{generate, GenKind, GenSpec};
use ffgeom::field::FieldCtx;
use ffgeom::trees::TreeSpec;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f5 = FieldCtx::prime(5)?;
    let set = generate(&f5, &GenSpec::new(GenKind::Random { size: 12 }, 7))?;
    let tree: TreeSpec = "vertices=3 edges=1-2,2-3 pin=1".parse()?;
    let cert = certify_tree(&set, &set, &tree, &CertifyParams::new(Regime::Arbitrary))?;
    println!(
        "{} of {} pins kept, per-pin bound {}, {} recursion nodes, hypothesis in range: {}",
        cert.pins.len(),
        set.len(),
        cert.per_pin_bound,
        cert.recursion.len(),
        cert.hypothesis_in_range
    );
    for node in &cert.recursion {
        println!(
            "  node {} ({:?}) {} pins -> {} kept, s = {}, sub-bound {:?}",
            node.id,
            node.case,
            node.pins_in.len(),
            node.pins_out.len(),
            node.s,
            node.sub_bound
        );
    }
    println!("check: {:?}", verify_certificate(&cert, &set, &set, &tree));

    let mut forged = cert.clone();
    if let Some(b) = forged.pin_bounds.first_mut() {
        b.bound += 100;
    }
    println!("forged bound: {:?}", verify_certificate(&forged, &set, &set, &tree));

    let json = serde_json::to_string(&certificate_json(&cert))?;
    println!("certificate JSON: {} bytes", json.len());
    Ok(())
}
