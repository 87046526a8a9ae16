//! Random concrete groups: symbolic heights and endomorphisms against
//! brute force.

use tfag::oracle::{self, RealizedGroup};

fn main() -> tfag::Result<()> {
    let mut rng = oracle::seeded_rng(3);
    for i in 0..5 {
        let g = oracle::random_realized_group(&mut rng, 3)?;
        let r = RealizedGroup::from_group(&g)?;
        let (num, den) = if g.rank() < 3 { (2, 2) } else { (1, 1) };
        let brute = oracle::brute_force_end(&r, num, den, oracle::DEFAULT_BUDGET)?;
        let sym = oracle::symbolic_end_in_box(&g, num, den, oracle::DEFAULT_BUDGET)?;
        println!("group {i}: rank {}, primes {:?}", g.rank(), r.primes());
        println!("    box ({num}, {den}): {} endomorphisms, agree {}", brute.len(), brute == sym);
        let x: Vec<_> = (0..g.rank()).map(|k| tfag::qmath::q(k as i64 + 1)).collect();
        for p in r.primes() {
            let el = tfag::group::Element::from_rationals(x.clone());
            let b = oracle::brute_force_height(&r, &x, p, 6)?;
            println!("    height at {p}: brute {b:?}, symbolic {}", g.height_at_prime(&el, p)?);
        }
    }
    Ok(())
}
