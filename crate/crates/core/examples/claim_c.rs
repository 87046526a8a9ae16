//! End(G) of the seven-line rank-3 group, cross-checked by enumeration on a
//! realization with two primes per family. The realization itself has a
//! larger ring, but inside the box only the scalars survive.

use tfag::{catalog, endoring, oracle};

fn main() -> tfag::Result<()> {
    let e = catalog::example3_default()?;
    let m = endoring::end_ring(&e.group);
    println!("{m}");
    println!("integer scalars only: {}", m.is_integer_scalars());

    let realized = oracle::realize_families(&e.group, 2)?;
    let r = oracle::RealizedGroup::from_group(&realized)?;
    let found = oracle::brute_force_end(&r, 3, 2, oracle::DEFAULT_BUDGET)?;
    let symbolic = oracle::symbolic_end_in_box(&e.group, 3, 2, oracle::DEFAULT_BUDGET)?;
    println!("realized over primes {:?}", r.primes());
    println!("box (3, 2): {} matrices found, symbolic agrees: {}", found.len(), found == symbolic);
    Ok(())
}
