//! Classifies every catalog entry and checks the implications between the
//! four transitivity notions on sampled pairs.

use tfag::{catalog, transit};

fn main() -> tfag::Result<()> {
    for e in catalog::all()? {
        let r = e.classify(7, 12, 3)?;
        println!(
            "{:<14} region {:?} (expected {}) over {}",
            e.name,
            r.region,
            e.expected_region,
            e.scope()
        );
        for (p, f) in &r.flags {
            println!("    {:<17} {}", p.name(), f.scope());
        }
        let s = transit::Sampler::new(11, 10);
        let mut bad = 0;
        for (x, y) in s.pairs(&e.group, transit::Property::Krylov) {
            bad += transit::venn_check_pair(&e.group, &x, &y, 3)?.len();
        }
        println!("    implication violations: {bad}");
    }
    Ok(())
}
