//! Z + H from the catalog: Krylov and weak transitivity fail on explicit
//! pairs, and the two mutual endomorphisms are verified.

use tfag::group::Element;
use tfag::{catalog, endoring, linalg, transit};

fn main() -> tfag::Result<()> {
    let e = catalog::example6()?;
    let g = &e.group;
    println!("{}", endoring::end_ring(g));
    let (x, y, z) = (
        Element::from_ints(&[5, 1]),
        Element::from_ints(&[1, 1]),
        Element::from_ints(&[5, 2]),
    );
    println!("chi{x} = {}", g.characteristic_of(&x)?);
    println!("chi{y} = {}", g.characteristic_of(&y)?);
    println!("krylov {x} -> {y}: {}", transit::check_pair_krylov(g, &x, &y)?.label());
    match transit::check_pair_weak(g, &x, &z, 3)? {
        transit::Verdict::Fails(c) => println!("weak {x} -> {z}: fails, {c}"),
        v => println!("weak {x} -> {z}: {}", v.label()),
    }
    let (a, b) = catalog::example6_mutual_endomorphisms();
    for m in [&a, &b] {
        println!("{} is an endomorphism: {}", linalg::fmt_mat(m), endoring::is_endomorphism(g, m)?);
    }
    Ok(())
}
