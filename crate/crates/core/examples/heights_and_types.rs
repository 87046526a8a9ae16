//! Heights, characteristics and types in a rank-1 group and on the lines of
//! the rank-3 catalog group.

use std::sync::Arc;

use tfag::chartype::{self, Characteristic, HeightValue};
use tfag::group::{self, Element};
use tfag::primesym::{ClassKey, Registry};
use tfag::{catalog, qmath};

fn main() -> tfag::Result<()> {
    let reg = Arc::new(Registry::new(&[2, 3], &["P"])?);
    let mut chi = Characteristic::zero(&reg);
    chi.set_prime(2, HeightValue::Finite(1))?;
    chi.set_prime(3, HeightValue::Inf)?;
    chi.set_class(&ClassKey::family("P"), HeightValue::Finite(2))?;
    let g = group::rank1("R", &chi)?;
    let x = Element::from_ints(&[12]);
    println!("chi(1) = {}", g.characteristic_of(&Element::from_ints(&[1]))?);
    println!("chi(12) = {}", g.characteristic_of(&x)?);
    println!("scale(12, chi(1)) = {}", chartype::scale_i(12, &chi)?);
    println!("height of 12 at 2: {}", g.height_at_prime(&x, 2)?);
    println!("12/8 in G: {}", g.contains(&x.scale(&qmath::qf(1, 8)))?);

    let e = catalog::example3_default()?;
    for (name, a) in &e.elements {
        let t = e.group.type_of_element(a)?;
        println!("{name} = {a}: type [{}]", t.canonical());
    }
    Ok(())
}
