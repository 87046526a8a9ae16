//! A matrix fixing every line of an eigen-rigid set is scalar.

use tfag::oracle;

fn main() -> tfag::Result<()> {
    for dim in 2..=4 {
        let r = oracle::scalar_lemma_check(dim, 25, dim as u64)?;
        println!(
            "dim {dim}: {} trials, scalar {} / contrapositive {}, failures {:?}",
            r.trials, r.scalar_confirmed, r.contrapositive_confirmed, r.failures
        );
    }
    Ok(())
}
