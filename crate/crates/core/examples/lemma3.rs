//! Builds the block automorphism [[1 + ba, b], [a, 1]] on a direct sum and
//! checks it sends a + b to a1 + b1.

use tfag::linalg::{self, QMat};
use tfag::{catalog, endoring, transit};

fn main() -> tfag::Result<()> {
    let e = catalog::example6()?;
    let g = &e.group;
    let s = transit::Sampler::new(5, 1);
    let mut rng = s.rng(0);
    let m = s.random_endomorphism(g, &mut rng);
    let alpha = QMat::from_fn(1, 1, |_, _| m[(1, 0)].clone());
    let beta = QMat::zeros(1, 1);
    let phi = endoring::lemma3_automorphism(g, 1, &alpha, &beta)?;
    let inv = endoring::lemma3_inverse(1, &alpha, &beta);
    println!("alpha = {}", linalg::fmt_mat(&alpha));
    println!("phi = {}", linalg::fmt_mat(&phi));
    println!("automorphism: {}", endoring::is_automorphism(g, &phi)?);
    println!("phi * inverse = identity: {}", phi.mul(&inv) == QMat::identity(2));
    Ok(())
}
