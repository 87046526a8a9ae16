//! Constructors for the concrete groups studied here, each bundled with
//! witness pairs, their expected verdicts and the expected region.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::chartype::{self, Characteristic, HeightValue, TypeRep};
use crate::error::{Error, Result};
use crate::group::{self, Element, FRGroup, LocalData};
use crate::linalg::{self, LMat, QMat};
use crate::primesym::{refine_family, ClassKey, Family, FamilyId, LaurentScalar, Registry};
use crate::qmath::{self, q, Q};
use crate::transit::{self, Flag, Property, RegionReport, Sampler};

/// The line list used by default: seven lines in `Z^3` such that only
/// scalar matrices fix all of them.
pub const DEFAULT_LINES: [[i64; 3]; 7] = [[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 0], [1, 0, 1], [0, 1, 1], [1, 1, 1]];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Expect {
    Holds,
    Fails,
}

#[derive(Debug, Clone)]
pub struct Witness {
    pub x: Element,
    pub y: Element,
    pub property: Property,
    pub expected: Expect,
    pub claim: String,
}

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: String,
    pub group: FRGroup,
    pub witnesses: Vec<Witness>,
    pub expected_region: u8,
    /// Sampled pairs restricted to `y = c·x`.
    pub same_line_scope: bool,
    /// Named elements (for example the line generators).
    pub elements: Vec<(String, Element)>,
}

impl CatalogEntry {
    fn new(name: &str, group: FRGroup, expected_region: u8) -> Self {
        CatalogEntry {
            name: name.into(),
            group,
            witnesses: vec![],
            expected_region,
            same_line_scope: false,
            elements: vec![],
        }
    }

    fn witness(&mut self, x: Element, y: Element, property: Property, expected: Expect, claim: &str) -> Result<()> {
        if !transit::admissible(&self.group, property, &x, &y) {
            return Err(Error::Precondition(format!(
                "witness ({x}, {y}) does not meet the {} hypothesis",
                property.name()
            )));
        }
        self.witnesses.push(Witness {
            x,
            y,
            property,
            expected,
            claim: claim.into(),
        });
        Ok(())
    }

    pub fn element(&self, name: &str) -> Option<&Element> {
        self.elements.iter().find(|(n, _)| n == name).map(|(_, e)| e)
    }

    pub fn sampler(&self, seed: u64, count: usize) -> Sampler {
        let mut s = Sampler::new(seed, count);
        s.same_line = self.same_line_scope;
        s
    }

    pub fn witness_triples(&self) -> Vec<(Element, Element, Property)> {
        self.witnesses.iter().map(|w| (w.x.clone(), w.y.clone(), w.property)).collect()
    }

    pub fn classify(&self, seed: u64, count: usize, bound: u64) -> Result<RegionReport> {
        transit::classify(&self.group, &self.sampler(seed, count), bound, &self.witness_triples())
    }

    /// Description of the pairs the classification was sampled over.
    pub fn scope(&self) -> &'static str {
        if self.same_line_scope {
            "same-line pairs"
        } else {
            "all sampled pairs"
        }
    }
}

fn zvec(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

fn qmat_of(z: &[Vec<BigInt>]) -> QMat {
    QMat::from_rows(z.iter().map(|r| r.iter().map(|x| Q::from_integer(x.clone())).collect()).collect())
}

/// True when the only rational matrices having every line as an
/// eigenline are the scalars.
pub fn is_eigen_rigid(lines: &[Vec<i64>]) -> bool {
    let Some(n) = lines.first().map(Vec::len) else {
        return false;
    };
    let k = lines.len();
    // unknowns: M row-major, then one eigenvalue per line
    let mut rows = Vec::new();
    for (l, a) in lines.iter().enumerate() {
        for i in 0..n {
            let mut r = vec![Q::zero(); n * n + k];
            for (j, &aj) in a.iter().enumerate() {
                r[i * n + j] = q(aj);
            }
            r[n * n + l] = -q(a[i]);
            rows.push(r);
        }
    }
    linalg::nullspace(&QMat::from_rows(rows)).len() == 1
}

fn check_lines(lines: &[Vec<i64>]) -> Result<usize> {
    let n = lines.first().map(Vec::len).ok_or(Error::Zero("line list"))?;
    for a in lines {
        if a.len() != n {
            return Err(Error::Dimension {
                expected: n,
                found: a.len(),
            });
        }
        let g = a.iter().fold(0i64, |acc, x| acc.gcd(x));
        if g != 1 {
            return Err(Error::NotPrimitive);
        }
    }
    for (i, a) in lines.iter().enumerate() {
        for b in &lines[i + 1..] {
            let m = QMat::from_rows(vec![a.iter().map(|&x| q(x)).collect(), b.iter().map(|&x| q(x)).collect()]);
            if linalg::rank(&m) < 2 {
                return Err(Error::Precondition(format!("lines {a:?} and {b:?} are proportional")));
            }
        }
    }
    Ok(n)
}

/// Primes dividing the complement component of `a_j` in `F = <a_k> ⊕ B_k`.
fn complement_primes(u: &[Vec<BigInt>], aj: &[i64]) -> BTreeSet<u64> {
    let inv = linalg::inverse(&qmat_of(u)).expect("unimodular");
    let c: Vec<Q> = inv.apply(&aj.iter().map(|&x| q(x)).collect::<Vec<_>>());
    let content = c[1..].iter().fold(BigInt::zero(), |acc, x| acc.gcd(&x.to_integer()));
    qmath::prime_factors(&content)
}

/// Local basis at a family: the first column of `U_k`, divided by `p`.
fn line_local(u: &[Vec<BigInt>], id: &FamilyId) -> Result<LocalData> {
    let n = u.len();
    let b = LMat::from_fn(n, n, |i, j| {
        let c = Q::from_integer(u[i][j].clone());
        if j == 0 {
            LaurentScalar::in_family(id, -1, c)
        } else {
            LaurentScalar::constant(c)
        }
    });
    LocalData::new(b, BTreeSet::new())
}

/// `F = Z^n ⊆ G ⊆ QF` generated by `a_k / p` for `p` in a family attached
/// to the line `a_k`. Lines with `with_family[k]` false get none. Families avoid the
/// primes dividing the complement components of `a_j` for `j < avoid`.
fn line_group(name: &str, lines: &[Vec<i64>], with_family: &[bool], avoid: usize) -> Result<(FRGroup, Vec<FamilyId>)> {
    let n = check_lines(lines)?;
    let mut fams = Vec::new();
    let mut locals = BTreeMap::new();
    let mut ids = Vec::new();
    for (k, a) in lines.iter().enumerate() {
        if !with_family[k] {
            continue;
        }
        let u = group::complete_to_basis(&zvec(a))?;
        let mut removed = BTreeSet::new();
        for (j, aj) in lines.iter().enumerate().take(avoid) {
            if j != k {
                removed.extend(complement_primes(&u, aj));
            }
        }
        let id: FamilyId = format!("L{}", k + 1).into();
        fams.push(refine_family(&Family::new(&id), &removed));
        locals.insert(ClassKey::Family(id.clone()), line_local(&u, &id)?);
        ids.push(id);
    }
    let reg = Arc::new(Registry::from_parts(&[], fams, &[])?);
    Ok((FRGroup::new(name, reg, n, locals)?, ids))
}

fn default_lines() -> Vec<Vec<i64>> {
    DEFAULT_LINES.iter().map(|l| l.to_vec()).collect()
}

/// A rank-1 group of the given characteristic.
pub fn example1() -> Result<CatalogEntry> {
    let reg = Arc::new(Registry::new(&[2], &[])?);
    let mut chi = Characteristic::zero(&reg);
    chi.set_class(&ClassKey::Explicit(2), HeightValue::Finite(1))?;
    let g = group::rank1("rank1", &chi)?;
    let mut e = CatalogEntry::new("example1", g, 1);
    let one = Element::from_ints(&[1]);
    e.witness(one.clone(), one.neg(), Property::Transitive, Expect::Holds, "x maps to -x")?;
    e.witness(one.clone(), one.scale(&q(2)), Property::Fully, Expect::Holds, "1 maps to 2")?;
    e.elements.push(("one".into(), one));
    Ok(e)
}

/// Lines `a_1, ..., a_K` in `Z^n`; every line but the first carries its own
/// family, and the families avoid the primes where `a_1` fails to be
/// primitive in a complement of `a_k`.
pub fn example3(lines: &[Vec<i64>]) -> Result<CatalogEntry> {
    let with: Vec<bool> = (0..lines.len()).map(|k| k > 0).collect();
    let (g, _) = line_group("lines", lines, &with, 1)?;
    let mut e = CatalogEntry::new("example3", g, 3);
    e.same_line_scope = true;
    let elems: Vec<Element> = lines.iter().map(|a| Element::from_ints(a)).collect();
    for (k, a) in elems.iter().enumerate() {
        e.elements.push((format!("a{}", k + 1), a.clone()));
    }
    if elems.len() > 1 {
        e.witness(
            elems[0].clone(),
            elems[1].clone(),
            Property::Fully,
            Expect::Fails,
            "a1 to a2 needs a non-scalar endomorphism",
        )?;
    }
    for a in &elems {
        e.witness(
            a.clone(),
            a.neg(),
            Property::Transitive,
            Expect::Holds,
            "a line generator maps to its negative",
        )?;
    }
    Ok(e)
}

pub fn example3_default() -> Result<CatalogEntry> {
    example3(&default_lines())
}

/// Every default line carries a family, and each family avoids the primes
/// where `a_1, a_2, a_3` fail to be primitive in complements of its line.
pub fn theorem15_group() -> Result<CatalogEntry> {
    let lines = default_lines();
    let (g, _) = line_group("rigid", &lines, &vec![true; lines.len()], 3)?;
    let mut e = CatalogEntry::new("theorem15", g, 3);
    e.same_line_scope = true;
    for (k, a) in lines.iter().enumerate() {
        e.elements.push((format!("a{}", k + 1), Element::from_ints(a)));
    }
    let a1 = Element::from_ints(&lines[0]);
    e.witness(a1.clone(), a1.neg(), Property::Transitive, Expect::Holds, "a1 maps to -a1")?;
    let off = Element::from_ints(&[1, 2, 0]);
    e.witness(
        off,
        a1,
        Property::Fully,
        Expect::Fails,
        "an element off every line has characteristic 0",
    )?;
    Ok(e)
}

/// `G ⊕ G` with `x = a_1 + b_2`, `y = a_1 + b_3`.
pub fn theorem15_square_witness(entry: &CatalogEntry) -> Result<(FRGroup, Element, Element)> {
    let g = &entry.group;
    let sq = g.direct_sum(g)?.with_name("square");
    let n = g.rank();
    if n < 3 {
        return Err(Error::Dimension { expected: 3, found: n });
    }
    let mut x = vec![0; 2 * n];
    let mut y = vec![0; 2 * n];
    x[0] = 1;
    y[0] = 1;
    x[n + 1] = 1;
    y[n + 2] = 1;
    Ok((sq, Element::from_ints(&x), Element::from_ints(&y)))
}

fn rank1_pair(name: &str, chi_a: &Characteristic, chi_b: &Characteristic) -> Result<FRGroup> {
    let a = group::rank1("A", chi_a)?;
    let b = group::rank1("B", chi_b)?;
    Ok(a.direct_sum(&b)?.with_name(name))
}

/// `A ⊕ B` for rank-1 groups of incomparable types, both reduced at `p`.
pub fn example5(chi_a: &Characteristic, chi_b: &Characteristic, p: u64) -> Result<CatalogEntry> {
    let (ta, tb): (TypeRep, TypeRep) = (chartype::type_of(chi_a), chartype::type_of(chi_b));
    if !chartype::incomparable(&ta, &tb)? {
        return Err(Error::Precondition("types must be incomparable".into()));
    }
    if chi_a.at_prime(p).is_inf() || chi_b.at_prime(p).is_inf() {
        return Err(Error::Precondition(format!("summands must not be {p}-divisible")));
    }
    let g = rank1_pair("incomparable", chi_a, chi_b)?;
    let mut e = CatalogEntry::new("example5", g, 5);
    let x = Element::from_rationals(vec![Q::from_integer(p.into()), Q::one()]);
    let y = Element::from_ints(&[1, 1]);
    e.witness(
        x.clone(),
        y.clone(),
        Property::Transitive,
        Expect::Fails,
        "(pa, b) and (a, b) have equal characteristic",
    )?;
    e.witness(
        x.clone(),
        y.clone(),
        Property::Krylov,
        Expect::Fails,
        "no endomorphism divides a by p",
    )?;
    e.witness(
        x.clone(),
        y.clone(),
        Property::Fully,
        Expect::Fails,
        "no endomorphism divides a by p",
    )?;
    e.witness(
        y.clone(),
        Element::from_ints(&[-1, 1]),
        Property::Weak,
        Expect::Holds,
        "diagonal signs",
    )?;
    e.elements.push(("x".into(), x));
    e.elements.push(("y".into(), y));
    Ok(e)
}

/// Explicit prime 2 and families `PA`, `PB`; `A` has height 1 on `PA`,
/// `B` height 1 on `PB`, zero elsewhere.
pub fn example5_default() -> Result<CatalogEntry> {
    let reg = Arc::new(Registry::new(&[2], &["PA", "PB"])?);
    let mut a = Characteristic::zero(&reg);
    a.set_class(&ClassKey::family("PA"), HeightValue::Finite(1))?;
    let mut b = Characteristic::zero(&reg);
    b.set_class(&ClassKey::family("PB"), HeightValue::Finite(1))?;
    example5(&a, &b, 2)
}

/// `A ⊕ B` where at every class exactly one summand is divisible.
pub fn example_complementary(chi_a: &Characteristic, chi_b: &Characteristic) -> Result<CatalogEntry> {
    let reg = chi_a.registry().clone();
    for k in reg.keys() {
        if chi_a.at_class(&k).is_inf() == chi_b.at_class(&k).is_inf() {
            return Err(Error::Precondition(format!("exactly one summand must be divisible at {k}")));
        }
    }
    for (&p, _) in chi_a.overrides().iter().chain(chi_b.overrides()) {
        if chi_a.at_prime(p).is_inf() == chi_b.at_prime(p).is_inf() {
            return Err(Error::Precondition(format!("exactly one summand must be divisible at {p}")));
        }
    }
    let g = rank1_pair("complementary", chi_a, chi_b)?;
    let mut e = CatalogEntry::new("complementary", g, 1);
    let a = Element::from_ints(&[1, 0]);
    e.witness(a.clone(), a.scale(&q(3)), Property::Fully, Expect::Holds, "(a, 0) maps to (3a, 0)")?;
    let x = Element::from_ints(&[1, 1]);
    e.witness(
        x.clone(),
        Element::from_ints(&[-1, 1]),
        Property::Transitive,
        Expect::Holds,
        "diagonal signs",
    )?;
    Ok(e)
}

/// Explicit prime 2 and family `P`. `A` is divisible at 2 and the rest and
/// has height 1 on `P`; `B` has height 1 at 2, is divisible on `P` and has
/// height 0 at the rest.
pub fn example_complementary_default() -> Result<CatalogEntry> {
    let reg = Arc::new(Registry::new(&[2], &["P"])?);
    let p = ClassKey::family("P");
    let mut a = Characteristic::zero(&reg);
    a.set_class(&ClassKey::Explicit(2), HeightValue::Inf)?;
    a.set_class(&ClassKey::Rest, HeightValue::Inf)?;
    a.set_class(&p, HeightValue::Finite(1))?;
    let mut b = Characteristic::zero(&reg);
    b.set_class(&ClassKey::Explicit(2), HeightValue::Finite(1))?;
    b.set_class(&p, HeightValue::Inf)?;
    example_complementary(&a, &b)
}

/// `Z ⊕ H` with `H` of height 1 at every prime but 5, where it has height 0.
pub fn example6() -> Result<CatalogEntry> {
    let reg = Arc::new(Registry::new(&[5], &[])?);
    let mut chi = Characteristic::zero(&reg);
    chi.set_class(&ClassKey::Rest, HeightValue::Finite(1))?;
    let z = FRGroup::free("Z", reg.clone(), 1)?;
    let h = group::rank1("H", &chi)?;
    let g = z.direct_sum(&h)?.with_name("z_plus_h");
    let mut e = CatalogEntry::new("example6", g, 6);
    let x = Element::from_ints(&[5, 1]);
    e.witness(
        x.clone(),
        Element::from_ints(&[1, 1]),
        Property::Krylov,
        Expect::Fails,
        "every image of (5,1) has first coordinate divisible by 5",
    )?;
    e.witness(
        x.clone(),
        Element::from_ints(&[5, 2]),
        Property::Weak,
        Expect::Fails,
        "2 is not a unit sign modulo 5",
    )?;
    e.elements.push(("x".into(), x));
    Ok(e)
}

/// The two endomorphisms of `example6` mapping `(5,1)` and `(5,2)` to each
/// other.
pub fn example6_mutual_endomorphisms() -> (QMat, QMat) {
    let m = |r: [[i64; 2]; 2]| QMat::from_rows(r.iter().map(|row| row.iter().map(|&v| q(v)).collect()).collect());
    (m([[1, 0], [0, 2]]), m([[1, 0], [-1, 3]]))
}

/// A summand with flags certified by the caller.
#[derive(Debug, Clone)]
pub struct Component {
    pub entry: CatalogEntry,
    pub flags: BTreeMap<Property, Flag>,
}

fn component_divisible_at(g: &FRGroup, k: &ClassKey) -> bool {
    let l = g.local(k);
    l.divisible().len() == g.rank() && (*k != ClassKey::Rest || g.exceptional_rest_primes().is_empty())
}

fn pad(x: &Element, before: usize, after: usize) -> Element {
    let mut c = vec![LaurentScalar::zero(); before];
    c.extend(x.coords().iter().cloned());
    c.extend(vec![LaurentScalar::zero(); after]);
    Element::new(c).expect("same symbol")
}

fn conjoin(a: &Flag, b: &Flag) -> Flag {
    match (a, b) {
        (Flag::Refuted { reason }, _) => Flag::Refuted {
            reason: format!("first summand: {reason}"),
        },
        (_, Flag::Refuted { reason }) => Flag::Refuted {
            reason: format!("second summand: {reason}"),
        },
        (Flag::HoldsOnSample { pairs: p }, Flag::HoldsOnSample { pairs: q }) => Flag::HoldsOnSample { pairs: (*p).min(*q) },
        _ => Flag::Unknown,
    }
}

/// Combined flags of `A ⊕ B` when no nonzero homomorphisms run between
/// the summands.
pub fn composed_flags(a: &BTreeMap<Property, Flag>, b: &BTreeMap<Property, Flag>) -> BTreeMap<Property, Flag> {
    let mut out = BTreeMap::new();
    for p in Property::ALL {
        let fa = a.get(&p).cloned().unwrap_or(Flag::Unknown);
        let fb = b.get(&p).cloned().unwrap_or(Flag::Unknown);
        out.insert(p, conjoin(&fa, &fb));
    }
    transit::propagate(&mut out);
    out
}

/// `A ⊕ B` for summands supported on disjoint prime classes. Every class
/// must see at least one divisible summand, so no nonzero homomorphism
/// connects them and pair checks split into independent components.
pub fn compose_disjoint_localizations(a: &Component, b: &Component) -> Result<(CatalogEntry, BTreeMap<Property, Flag>)> {
    let (ga, gb) = (&a.entry.group, &b.entry.group);
    for k in ga.registry().keys() {
        if !component_divisible_at(ga, &k) && !component_divisible_at(gb, &k) {
            return Err(Error::Precondition(format!("both summands are reduced at {k}")));
        }
    }
    let g = ga.direct_sum(gb)?.with_name(format!("{}+{}", ga.name(), gb.name()));
    let flags = composed_flags(&a.flags, &b.flags);
    let region = transit::region_of(&flags).unwrap_or(0);
    let mut e = CatalogEntry::new("composed", g, region);
    e.same_line_scope = a.entry.same_line_scope || b.entry.same_line_scope;
    let (na, nb) = (ga.rank(), gb.rank());
    for w in &a.entry.witnesses {
        e.witness(pad(&w.x, 0, nb), pad(&w.y, 0, nb), w.property, w.expected, &w.claim)?;
    }
    for w in &b.entry.witnesses {
        e.witness(pad(&w.x, na, 0), pad(&w.y, na, 0), w.property, w.expected, &w.claim)?;
    }
    // assemble (λ, γ) from component Krylov witnesses
    let ka = a
        .entry
        .witnesses
        .iter()
        .find(|w| w.property == Property::Krylov && w.expected == Expect::Holds);
    let kb = b
        .entry
        .witnesses
        .iter()
        .find(|w| w.property == Property::Krylov && w.expected == Expect::Holds);
    if let (Some(wa), Some(wb)) = (ka, kb) {
        let x = pad(&wa.x, 0, nb).try_add(&pad(&wb.x, na, 0))?;
        let y = pad(&wa.y, 0, nb).try_add(&pad(&wb.y, na, 0))?;
        e.witness(x, y, Property::Krylov, Expect::Holds, "componentwise endomorphisms assemble")?;
    }
    Ok((e, flags))
}

fn rank1_component(name: &str, chi: &Characteristic, pairs: usize) -> Result<Component> {
    let g = group::rank1(name, chi)?;
    let mut entry = CatalogEntry::new(name, g, 1);
    let one = Element::from_ints(&[1]);
    entry.witness(one.clone(), one.neg(), Property::Krylov, Expect::Holds, "x maps to -x")?;
    entry.witness(one.clone(), one.neg(), Property::Transitive, Expect::Holds, "x maps to -x")?;
    let flags = Property::ALL.iter().map(|&p| (p, Flag::HoldsOnSample { pairs })).collect();
    Ok(Component { entry, flags })
}

/// Rank-1 stand-ins with complementary divisibility; every rank-1 group has
/// all four properties, so the composition lands in region 1.
pub fn compose_default() -> Result<(CatalogEntry, BTreeMap<Property, Flag>)> {
    let reg = Arc::new(Registry::new(&[2], &["P"])?);
    let p = ClassKey::family("P");
    let mut a = Characteristic::zero(&reg);
    a.set_class(&ClassKey::Explicit(2), HeightValue::Inf)?;
    a.set_class(&ClassKey::Rest, HeightValue::Inf)?;
    a.set_class(&p, HeightValue::Finite(1))?;
    let mut b = Characteristic::zero(&reg);
    b.set_class(&ClassKey::Explicit(2), HeightValue::Finite(1))?;
    b.set_class(&p, HeightValue::Inf)?;
    compose_disjoint_localizations(&rank1_component("A", &a, 1)?, &rank1_component("B", &b, 1)?)
}

/// All named entries.
pub fn all() -> Result<Vec<CatalogEntry>> {
    Ok(vec![
        example1()?,
        example3_default()?,
        theorem15_group()?,
        example5_default()?,
        example_complementary_default()?,
        example6()?,
        compose_default()?.0,
    ])
}

pub fn by_name(name: &str) -> Result<CatalogEntry> {
    match name {
        "example1" => example1(),
        "example3" => example3_default(),
        "theorem15" => theorem15_group(),
        "example5" => example5_default(),
        "complementary" => example_complementary_default(),
        "example6" => example6(),
        "composed" => Ok(compose_default()?.0),
        _ => Err(Error::Parse(format!("unknown catalog entry `{name}`"))),
    }
}

pub const NAMES: [&str; 7] = [
    "example1",
    "example3",
    "theorem15",
    "example5",
    "complementary",
    "example6",
    "composed",
];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::endoring;
    use crate::transit::Verdict;

    #[test]
    fn default_lines_are_rigid() {
        assert!(is_eigen_rigid(&default_lines()));
        assert!(!is_eigen_rigid(&default_lines()[..3]));
    }

    #[test]
    fn bad_lines_rejected() {
        assert!(example3(&[vec![1, 0], vec![2, 0]]).is_err());
        assert!(example3(&[vec![1, 0], vec![0, 2]]).is_err());
    }

    #[test]
    fn example3_claims() {
        let e = example3_default().unwrap();
        let g = &e.group;
        let a1 = e.element("a1").unwrap();
        assert!(g.characteristic_of(a1).unwrap().is_zero());
        let t: Vec<TypeRep> = (2..=7)
            .map(|k| g.type_of_element(e.element(&format!("a{k}")).unwrap()).unwrap())
            .collect();
        for i in 0..t.len() {
            for j in 0..t.len() {
                if i != j {
                    assert!(chartype::incomparable(&t[i], &t[j]).unwrap());
                }
            }
        }
        assert!(endoring::end_ring(g).is_integer_scalars());
    }

    #[test]
    fn witnesses_reproduce() {
        for e in all().unwrap() {
            for w in &e.witnesses {
                let v = transit::check_pair(&e.group, w.property, &w.x, &w.y, 3).unwrap();
                let ok = match w.expected {
                    Expect::Holds => matches!(v, Verdict::Holds(_)),
                    Expect::Fails => matches!(v, Verdict::Fails(_)),
                };
                assert!(ok, "{} {:?} ({}, {}) gave {:?}", e.name, w.property, w.x, w.y, v);
            }
        }
    }

    #[test]
    fn regions() {
        for e in all().unwrap() {
            let r = e.classify(7, 10, 3).unwrap();
            assert!(r.violations.is_empty(), "{}: {:?}", e.name, r.violations);
            assert_eq!(r.region, Some(e.expected_region), "{}: {:?}", e.name, r.flags);
        }
    }

    #[test]
    fn square_is_not_krylov() {
        let e = theorem15_group().unwrap();
        assert!(endoring::end_ring(&e.group).is_integer_scalars());
        let (sq, x, y) = theorem15_square_witness(&e).unwrap();
        assert_eq!(endoring::end_ring(&sq).generators.len(), 4);
        assert!(sq.characteristic_of(&x).unwrap().is_zero());
        assert!(sq.characteristic_of(&y).unwrap().is_zero());
        assert!(transit::check_pair_krylov(&sq, &x, &y).unwrap().is_fails());
    }
}
