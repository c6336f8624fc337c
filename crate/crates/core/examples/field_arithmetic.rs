//! Arithmetic in F_p and F_{p^e}: moduli, inverses, square roots, the character.

use ffgeom::field::FieldCtx;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f7 = FieldCtx::prime(7)?;
    let a = f7.from_int(3);
    let inv = f7.inv(a).expect("nonzero");
    println!("F_7: 3^-1 = {}, 3 * 3^-1 = {}", f7.format_elem(inv), f7.format_elem(f7.mul(a, inv)));
    let squares: Vec<String> = f7.elements().filter(|&x| f7.quadratic_character(x) == 1).map(|x| f7.format_elem(x)).collect();
    println!("F_7: nonzero squares {}", squares.join(" "));

    for (p, e) in [(3, 2), (5, 2), (3, 3)] {
        let ctx = FieldCtx::new(p, e)?;
        let modulus = ctx.modulus_poly().unwrap();
        println!("F_{}: modulus coefficients (constant first) {:?}, eta(-1) = {}", ctx.q(), modulus, ctx.eta_minus_one());
    }

    let f25 = FieldCtx::new(5, 2)?;
    let x = f25.parse_elem("2;3")?;
    let sq = f25.square(x);
    let roots: Vec<String> = f25.sqrt(sq).into_iter().map(|r| f25.format_elem(r)).collect();
    println!("F_25: ({})^2 = {}, square roots {}", f25.format_elem(x), f25.format_elem(sq), roots.join(" and "));
    println!("F_25: ({})^24 = {}", f25.format_elem(x), f25.format_elem(f25.pow(x, 24)));
    Ok(())
}
