//! A group with End = Z whose square has two elements of equal
//! characteristic that no endomorphism relates.

use tfag::{catalog, endoring, transit};

fn main() -> tfag::Result<()> {
    let e = catalog::theorem15_group()?;
    println!("End(G):\n{}", endoring::end_ring(&e.group));
    let (sq, x, y) = catalog::theorem15_square_witness(&e)?;
    println!("End(G+G):\n{}", endoring::end_ring(&sq));
    println!("chi(x) = {}", sq.characteristic_of(&x)?);
    println!("chi(y) = {}", sq.characteristic_of(&y)?);
    let v = transit::check_pair_krylov(&sq, &x, &y)?;
    println!("krylov {x} -> {y}: {}", v.label());
    if let transit::Verdict::Fails(c) = &v {
        println!("certificate: {c}");
        println!("certificate rechecks: {}", c.recheck(&sq, &x, &y)?);
    }
    Ok(())
}
