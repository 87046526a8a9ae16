//! Pair checks for the four transitivity properties, group-level region
//! classification over a sampled scope, and instance-level checks of the
//! implications between the properties.

use std::collections::BTreeMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chartype::{self, Characteristic};
use crate::endoring::{self, MapCertificate};
use crate::error::{Error, Result};
use crate::group::{Element, FRGroup};
use crate::linalg::{LMat, QMat};
use crate::primesym::{ClassKey, LaurentScalar};
use crate::qmath::{self, Q};

/// Machine-checkable reason for a negative answer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certificate {
    /// No endomorphism maps `x` to `y`.
    NoEndomorphism(MapCertificate),
    /// The only endomorphism mapping `x` to `y` is not invertible.
    UniqueEndomorphismNotInvertible { endomorphism: LMat },
    /// The solutions form a line `M(s)`; `polynomial` is `det M(s)` and none
    /// of the rational roots of `det M(s) = ±1` gives an automorphism.
    DeterminantObstruction { polynomial: Vec<Q>, candidates: Vec<Q> },
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Certificate::NoEndomorphism(c) => write!(f, "{c}"),
            Certificate::UniqueEndomorphismNotInvertible { .. } => write!(f, "the unique endomorphism is not an automorphism"),
            Certificate::DeterminantObstruction { polynomial, candidates } => {
                let p: Vec<String> = polynomial.iter().map(qmath::fmt_rational).collect();
                let c: Vec<String> = candidates.iter().map(qmath::fmt_rational).collect();
                write!(
                    f,
                    "det polynomial [{}] has unit values only at [{}], none invertible over G",
                    p.join(", "),
                    c.join(", ")
                )
            }
        }
    }
}

impl Certificate {
    /// Re-runs the exact solver and confirms the refutation.
    pub fn recheck(&self, g: &FRGroup, x: &Element, y: &Element) -> Result<bool> {
        Ok(match self {
            Certificate::NoEndomorphism(c) => {
                let sol = endoring::solve_mapping(g, x, y)?;
                sol.witness.is_none() && sol.certificate.as_ref() == Some(c)
            }
            _ => endoring::auto_mapping_exists(g, x, y, 0)?.is_fails(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Holds(LMat),
    Fails(Certificate),
    /// Undecided, with the reason.
    Unknown(String),
    /// The hypothesis of the property does not apply to the pair.
    Vacuous(String),
}

impl Verdict {
    pub fn is_holds(&self) -> bool {
        matches!(self, Verdict::Holds(_))
    }

    pub fn is_fails(&self) -> bool {
        matches!(self, Verdict::Fails(_))
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Holds(_) => "holds",
            Verdict::Fails(_) => "fails",
            Verdict::Unknown(_) => "unknown",
            Verdict::Vacuous(_) => "vacuous",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Property {
    Fully,
    Transitive,
    Krylov,
    Weak,
}

impl Property {
    pub const ALL: [Property; 4] = [Property::Fully, Property::Transitive, Property::Krylov, Property::Weak];

    pub fn name(self) -> &'static str {
        match self {
            Property::Fully => "fully_transitive",
            Property::Transitive => "transitive",
            Property::Krylov => "krylov",
            Property::Weak => "weak",
        }
    }

    pub fn parse(s: &str) -> Result<Property> {
        match s {
            "full" | "fully" | "fully_transitive" => Ok(Property::Fully),
            "trans" | "transitive" => Ok(Property::Transitive),
            "krylov" => Ok(Property::Krylov),
            "weak" => Ok(Property::Weak),
            _ => Err(Error::Parse(format!("unknown property `{s}`"))),
        }
    }
}

fn nonzero_member(g: &FRGroup, x: &Element) -> Result<Characteristic> {
    if x.is_zero() {
        return Err(Error::IllPosed("zero element".into()));
    }
    match g.characteristic_of(x) {
        Err(Error::NotMember) => Err(Error::IllPosed(format!("{x} is not in the group"))),
        other => other,
    }
}

fn equal_chars(g: &FRGroup, x: &Element, y: &Element) -> Result<()> {
    let (cx, cy) = (nonzero_member(g, x)?, nonzero_member(g, y)?);
    if cx != cy {
        return Err(Error::IllPosed("characteristics differ".into()));
    }
    Ok(())
}

fn endo_verdict(g: &FRGroup, x: &Element, y: &Element) -> Result<Verdict> {
    let sol = endoring::solve_mapping(g, x, y)?;
    Ok(match sol.witness {
        Some(m) => Verdict::Holds(m),
        None => match sol.certificate {
            Some(c) => Verdict::Fails(Certificate::NoEndomorphism(c)),
            None => Verdict::Unknown("no endomorphism found among the searched powers of p".into()),
        },
    })
}

/// Some endomorphism maps `x` to `y`; requires `χ(x) ≤ χ(y)`.
pub fn check_pair_fully(g: &FRGroup, x: &Element, y: &Element) -> Result<Verdict> {
    let (cx, cy) = (nonzero_member(g, x)?, nonzero_member(g, y)?);
    if !chartype::chi_le(&cx, &cy)? {
        return Err(Error::IllPosed("characteristic of x is not below that of y".into()));
    }
    endo_verdict(g, x, y)
}

/// Some endomorphism maps `x` to `y`; requires `χ(x) = χ(y)`.
pub fn check_pair_krylov(g: &FRGroup, x: &Element, y: &Element) -> Result<Verdict> {
    equal_chars(g, x, y)?;
    endo_verdict(g, x, y)
}

/// Some automorphism maps `x` to `y`; requires `χ(x) = χ(y)`.
pub fn check_pair_transitive(g: &FRGroup, x: &Element, y: &Element, bound: u64) -> Result<Verdict> {
    equal_chars(g, x, y)?;
    endoring::auto_mapping_exists(g, x, y, bound)
}

/// Some automorphism maps `x` to `y`, given endomorphisms both ways.
pub fn check_pair_weak(g: &FRGroup, x: &Element, y: &Element, bound: u64) -> Result<Verdict> {
    nonzero_member(g, x)?;
    nonzero_member(g, y)?;
    let (there, back) = (endoring::solve_mapping(g, x, y)?, endoring::solve_mapping(g, y, x)?);
    if there.certificate.is_some() || back.certificate.is_some() {
        return Ok(Verdict::Vacuous("no endomorphisms in both directions".into()));
    }
    if !there.decided() || !back.decided() {
        return Ok(Verdict::Unknown("endomorphisms in both directions could not be decided".into()));
    }
    endoring::auto_mapping_exists(g, x, y, bound)
}

pub fn check_pair(g: &FRGroup, p: Property, x: &Element, y: &Element, bound: u64) -> Result<Verdict> {
    match p {
        Property::Fully => check_pair_fully(g, x, y),
        Property::Krylov => check_pair_krylov(g, x, y),
        Property::Transitive => check_pair_transitive(g, x, y, bound),
        Property::Weak => check_pair_weak(g, x, y, bound),
    }
}

/// Seeded generator of group elements and element pairs.
#[derive(Debug, Clone)]
pub struct Sampler {
    pub seed: u64,
    pub count: usize,
    pub coord_bound: i64,
    /// Pairs always included, in order.
    pub extra: Vec<(Element, Element)>,
    /// Restrict sampled pairs to `y = c·x`.
    pub same_line: bool,
}

impl Sampler {
    pub fn new(seed: u64, count: usize) -> Self {
        Sampler {
            seed,
            count,
            coord_bound: 10,
            extra: vec![],
            same_line: false,
        }
    }

    pub fn rng(&self, salt: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15))
    }

    /// A random element: an integer vector, or an integer combination of the
    /// local basis of one class (divisible columns divided further).
    pub fn random_element(&self, g: &FRGroup, rng: &mut ChaCha8Rng) -> Option<Element> {
        let n = g.rank();
        let b = self.coord_bound;
        let classes: Vec<&ClassKey> = g.locals().iter().filter(|(_, l)| !l.is_identity()).map(|(k, _)| k).collect();
        let pick = rng.gen_range(0..=classes.len());
        let x = if pick == 0 {
            let v: Vec<i64> = (0..n).map(|_| rng.gen_range(-b..=b)).collect();
            Element::from_ints(&v)
        } else {
            let key = classes[pick - 1];
            let l = g.local(key);
            let explicit = g.registry().explicit_primes();
            let (basis, q) = match key {
                ClassKey::Rest => {
                    let options: Vec<u64> = [3u64, 7, 11, 13].into_iter().filter(|q| !explicit.contains(q)).collect();
                    let q = options[rng.gen_range(0..options.len())];
                    (crate::linalg::LMat::from_rational(&l.basis().eval(q)), Some(q))
                }
                ClassKey::Explicit(q) => (l.basis().clone(), Some(*q)),
                ClassKey::Family(_) => (l.basis().clone(), None),
            };
            let mut coeffs = Vec::with_capacity(n);
            for j in 0..n {
                let c = LaurentScalar::int(rng.gen_range(-b..=b));
                let c = if l.divisible().contains(&j) {
                    let k = rng.gen_range(0..=2i64);
                    match (q, key.family_id()) {
                        (Some(q), _) => c.scale(&qmath::qpow(q, -k)),
                        (None, Some(f)) => c.shift(f, -k),
                        _ => c,
                    }
                } else {
                    c
                };
                coeffs.push(c);
            }
            Element::new(basis.apply(&coeffs)).ok()?
        };
        if x.is_zero() || !g.contains(&x).ok()? {
            return None;
        }
        Some(x)
    }

    pub fn elements(&self, g: &FRGroup, count: usize, salt: u64) -> Vec<Element> {
        let mut rng = self.rng(salt);
        let mut out = Vec::new();
        let mut tries = 0;
        while out.len() < count && tries < 50 * count.max(1) {
            tries += 1;
            if let Some(x) = self.random_element(g, &mut rng) {
                out.push(x);
            }
        }
        out
    }

    /// A random member of the endomorphism module with small integer
    /// coefficients.
    pub fn random_endomorphism(&self, g: &FRGroup, rng: &mut ChaCha8Rng) -> QMat {
        let module = endoring::end_ring(g);
        let t: Vec<Q> = module.generators.iter().map(|_| qmath::q(rng.gen_range(-3..=3))).collect();
        module.combine(&t)
    }

    /// Pairs meeting the precondition of `prop`, extras first.
    pub fn pairs(&self, g: &FRGroup, prop: Property) -> Vec<(Element, Element)> {
        let mut out: Vec<(Element, Element)> = Vec::new();
        for (x, y) in &self.extra {
            if admissible(g, prop, x, y) {
                out.push((x.clone(), y.clone()));
            }
        }
        let salt = prop as u64 + 1;
        let mut rng = self.rng(salt);
        let pool = self.elements(g, self.count.max(8), salt);
        if pool.is_empty() {
            return out;
        }
        let mut tries = 0;
        while out.len() < self.count + self.extra.len() && tries < 40 * self.count.max(1) {
            tries += 1;
            let x = pool[rng.gen_range(0..pool.len())].clone();
            let y = if self.same_line {
                let c = [qmath::q(-1), qmath::q(2), qmath::q(-2), qmath::qf(1, 2), qmath::q(3)];
                x.scale(&c[rng.gen_range(0..c.len())])
            } else {
                match rng.gen_range(0..4) {
                    0 => pool[rng.gen_range(0..pool.len())].clone(),
                    1 => x.neg(),
                    _ => x.apply(&self.random_endomorphism(g, &mut rng)),
                }
            };
            if admissible(g, prop, &x, &y) {
                out.push((x, y));
            }
        }
        out
    }
}

/// Whether the pair meets the precondition of the property.
pub fn admissible(g: &FRGroup, prop: Property, x: &Element, y: &Element) -> bool {
    let chars = || -> Option<(Characteristic, Characteristic)> {
        if x.is_zero() || y.is_zero() {
            return None;
        }
        Some((g.characteristic_of(x).ok()?, g.characteristic_of(y).ok()?))
    };
    match prop {
        Property::Fully => chars().is_some_and(|(a, b)| chartype::chi_le(&a, &b).unwrap_or(false)),
        Property::Krylov | Property::Transitive => chars().is_some_and(|(a, b)| a == b),
        Property::Weak => {
            chars().is_some()
                && endoring::endo_mapping_exists(g, x, y).ok().flatten().is_some()
                && endoring::endo_mapping_exists(g, y, x).ok().flatten().is_some()
        }
    }
}

/// Three-valued group-level flag with the scope it was established on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Flag {
    /// Every checked pair held.
    HoldsOnSample {
        pairs: usize,
    },
    /// Refuted: by a failing pair (exact, global) or by an implication.
    Refuted {
        reason: String,
    },
    Unknown,
}

impl Flag {
    pub fn holds(&self) -> bool {
        matches!(self, Flag::HoldsOnSample { .. })
    }

    pub fn refuted(&self) -> bool {
        matches!(self, Flag::Refuted { .. })
    }

    pub fn scope(&self) -> String {
        match self {
            Flag::HoldsOnSample { pairs } => format!("holds on {pairs} sampled pairs"),
            Flag::Refuted { reason } => format!("refuted ({reason})"),
            Flag::Unknown => "unknown".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct PairRecord {
    pub property: Property,
    pub x: Element,
    pub y: Element,
    pub verdict: Verdict,
}

#[derive(Debug, Clone)]
pub struct RegionReport {
    pub flags: BTreeMap<Property, Flag>,
    pub region: Option<u8>,
    pub records: Vec<PairRecord>,
    /// Pair-level implication violations (expected empty).
    pub violations: Vec<String>,
}

/// Applies the implications between the properties. Exact refutations take
/// precedence over sampled evidence.
pub fn propagate(flags: &mut BTreeMap<Property, Flag>) {
    use Property::*;
    loop {
        let before = flags.clone();
        let refute = |flags: &mut BTreeMap<Property, Flag>, p: Property, why: &str| {
            if !flags[&p].refuted() {
                flags.insert(p, Flag::Refuted { reason: why.into() });
            }
        };
        if flags[&Krylov].refuted() {
            refute(flags, Transitive, "not Krylov transitive");
            refute(flags, Fully, "not Krylov transitive");
        }
        if flags[&Weak].refuted() {
            refute(flags, Transitive, "not weakly transitive");
        }
        for (from, to) in [(Transitive, Krylov), (Fully, Krylov), (Transitive, Weak)] {
            if let (Flag::HoldsOnSample { pairs }, Flag::Unknown) = (&flags[&from], &flags[&to]) {
                let pairs = *pairs;
                flags.insert(to, Flag::HoldsOnSample { pairs });
            }
        }
        if *flags == before {
            return;
        }
    }
}

/// Region of the four-property diagram, when determined.
pub fn region_of(flags: &BTreeMap<Property, Flag>) -> Option<u8> {
    use Property::*;
    let known = |p: Property| match &flags[&p] {
        Flag::HoldsOnSample { .. } => Some(true),
        Flag::Refuted { .. } => Some(false),
        Flag::Unknown => None,
    };
    match (known(Fully)?, known(Transitive)?) {
        (true, true) => Some(1),
        (true, false) => Some(2),
        (false, true) => Some(3),
        (false, false) => match known(Krylov)? {
            true => Some(4),
            false => Some(if known(Weak)? { 5 } else { 6 }),
        },
    }
}

fn pair_violations(g: &FRGroup, x: &Element, y: &Element, bound: u64) -> Result<Vec<String>> {
    let mut out = Vec::new();
    let krylov = check_pair_krylov(g, x, y)?;
    let fully = check_pair_fully(g, x, y)?;
    let trans = check_pair_transitive(g, x, y, bound)?;
    let weak = check_pair_weak(g, x, y, bound)?;
    if trans.is_holds() && !krylov.is_holds() {
        out.push(format!("transitive but not Krylov at ({x}, {y})"));
    }
    if fully.is_holds() != krylov.is_holds() {
        out.push(format!("full and Krylov checks disagree at ({x}, {y})"));
    }
    if trans.is_holds() && !weak.is_holds() {
        out.push(format!("transitive but not weakly transitive at ({x}, {y})"));
    }
    if krylov.is_holds() && weak.is_holds() && !trans.is_holds() {
        out.push(format!("Krylov and weak but not transitive at ({x}, {y})"));
    }
    Ok(out)
}

/// Pair-level implication check on one pair with equal characteristics.
pub fn venn_check_pair(g: &FRGroup, x: &Element, y: &Element, bound: u64) -> Result<Vec<String>> {
    pair_violations(g, x, y, bound)
}

/// Aggregates pair verdicts into flags and a region. `witnesses` are
/// known pairs that are checked in addition to the sampled ones.
pub fn classify(g: &FRGroup, sampler: &Sampler, bound: u64, witnesses: &[(Element, Element, Property)]) -> Result<RegionReport> {
    let mut records = Vec::new();
    for (x, y, p) in witnesses {
        records.push(PairRecord {
            property: *p,
            x: x.clone(),
            y: y.clone(),
            verdict: check_pair(g, *p, x, y, bound)?,
        });
    }
    for p in Property::ALL {
        for (x, y) in sampler.pairs(g, p) {
            let verdict = check_pair(g, p, &x, &y, bound)?;
            records.push(PairRecord {
                property: p,
                x,
                y,
                verdict,
            });
        }
    }
    let mut violations = Vec::new();
    for r in &records {
        if matches!(r.property, Property::Krylov | Property::Transitive) {
            violations.extend(pair_violations(g, &r.x, &r.y, bound)?);
        }
    }
    let mut flags = BTreeMap::new();
    for p in Property::ALL {
        let mine: Vec<&PairRecord> = records.iter().filter(|r| r.property == p).collect();
        let flag = if let Some(r) = mine.iter().find(|r| r.verdict.is_fails()) {
            Flag::Refuted {
                reason: format!("pair ({}, {}) fails", r.x, r.y),
            }
        } else if mine.iter().any(|r| matches!(r.verdict, Verdict::Unknown(_))) {
            Flag::Unknown
        } else {
            let held = mine.iter().filter(|r| r.verdict.is_holds()).count();
            if held > 0 {
                Flag::HoldsOnSample { pairs: held }
            } else {
                Flag::Unknown
            }
        };
        flags.insert(p, flag);
    }
    propagate(&mut flags);
    let region = region_of(&flags);
    Ok(RegionReport {
        flags,
        region,
        records,
        violations,
    })
}

/// Outcome of checking one implication on sampled pairs.
#[derive(Debug, Clone)]
pub struct ImplicationReport {
    pub name: String,
    pub hypothesis: Flag,
    pub conclusion: Flag,
    pub counterexample: Option<(Element, Element)>,
}

impl ImplicationReport {
    /// True unless the hypothesis held on every sampled pair while the
    /// conclusion failed on some pair.
    pub fn passed(&self) -> bool {
        !(self.hypothesis.holds() && self.conclusion.refuted())
    }

    pub fn vacuous(&self) -> bool {
        !self.hypothesis.holds()
    }
}

fn sampled_flag(g: &FRGroup, p: Property, sampler: &Sampler, bound: u64) -> Result<(Flag, Option<(Element, Element)>)> {
    let pairs = sampler.pairs(g, p);
    let mut held = 0;
    for (x, y) in pairs {
        match check_pair(g, p, &x, &y, bound)? {
            Verdict::Holds(_) => held += 1,
            Verdict::Fails(_) => {
                return Ok((
                    Flag::Refuted {
                        reason: format!("pair ({x}, {y}) fails"),
                    },
                    Some((x, y)),
                ))
            }
            Verdict::Unknown(_) => return Ok((Flag::Unknown, None)),
            Verdict::Vacuous(_) => {}
        }
    }
    Ok((
        if held > 0 {
            Flag::HoldsOnSample { pairs: held }
        } else {
            Flag::Unknown
        },
        None,
    ))
}

fn power(a: &FRGroup, m: usize) -> Result<FRGroup> {
    let mut g = a.clone();
    for _ in 1..m {
        g = g.direct_sum(a)?;
    }
    Ok(g)
}

/// Instance-level evidence for an implication between the properties.
///
/// * `lemma1`: `A^(m)` Krylov transitive ⇒ `A` fully transitive.
/// * `prop7`: `A ⊕ B` homogeneous and fully transitive ⇒ transitive.
/// * `prop11_2`: `A^(m)` Krylov transitive ⇒ `A^(n)` fully transitive, `n < m`.
/// * `prop14`: `A^(m)` Krylov transitive ⇒ `A^(m)` fully transitive.
/// * `cor9`: `A` homogeneous: fully transitive ⇔ `A ⊕ A` transitive.
pub fn demonstrate_implication(
    name: &str,
    a: &FRGroup,
    b: Option<&FRGroup>,
    m: usize,
    n: usize,
    sampler: &Sampler,
    bound: u64,
) -> Result<ImplicationReport> {
    let (hyp, concl) = match name {
        "lemma1" => {
            let (h, _) = sampled_flag(&power(a, m.max(2))?, Property::Krylov, sampler, bound)?;
            (h, sampled_flag(a, Property::Fully, sampler, bound)?)
        }
        "prop7" => {
            let g = a.direct_sum(b.unwrap_or(a))?;
            let types: Vec<_> = sampler
                .elements(&g, sampler.count, 99)
                .iter()
                .filter_map(|x| g.type_of_element(x).ok())
                .collect();
            let homogeneous = types.windows(2).all(|w| w[0] == w[1]);
            let (h, _) = sampled_flag(&g, Property::Fully, sampler, bound)?;
            let h = if homogeneous {
                h
            } else {
                Flag::Refuted {
                    reason: "not homogeneous on sample".into(),
                }
            };
            (h, sampled_flag(&g, Property::Transitive, sampler, bound)?)
        }
        "prop11_2" => {
            if n == 0 || n >= m {
                return Err(Error::Precondition("need 1 <= n < m".into()));
            }
            let (h, _) = sampled_flag(&power(a, m)?, Property::Krylov, sampler, bound)?;
            (h, sampled_flag(&power(a, n)?, Property::Fully, sampler, bound)?)
        }
        "prop14" => {
            let g = power(a, m.max(2))?;
            let (h, _) = sampled_flag(&g, Property::Krylov, sampler, bound)?;
            (h, sampled_flag(&g, Property::Fully, sampler, bound)?)
        }
        "cor9" => {
            let (h, _) = sampled_flag(a, Property::Fully, sampler, bound)?;
            (h, sampled_flag(&a.direct_sum(a)?, Property::Transitive, sampler, bound)?)
        }
        _ => return Err(Error::Parse(format!("unknown implication `{name}`"))),
    };
    let (conclusion, counterexample) = concl;
    Ok(ImplicationReport {
        name: name.into(),
        hypothesis: hyp,
        conclusion,
        counterexample,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sampled_evidence_never_refutes() {
        use Property::*;
        let held = Flag::HoldsOnSample { pairs: 3 };
        let mut flags: BTreeMap<Property, Flag> = [
            (Fully, held.clone()),
            (Transitive, Flag::Refuted { reason: "pair".into() }),
            (Krylov, held.clone()),
            (Weak, held.clone()),
        ]
        .into();
        propagate(&mut flags);
        assert!(flags[&Weak].holds() && flags[&Krylov].holds());
        flags.insert(Krylov, Flag::Refuted { reason: "pair".into() });
        propagate(&mut flags);
        assert!(flags[&Fully].refuted() && flags[&Weak].holds());
        assert_eq!(region_of(&flags), Some(5));
    }

    #[test]
    fn transitive_implies_krylov_and_weak_on_sample() {
        use Property::*;
        let mut flags: BTreeMap<Property, Flag> =
            [(Fully, Flag::Unknown), (Transitive, Flag::HoldsOnSample { pairs: 2 }), (Krylov, Flag::Unknown), (Weak, Flag::Unknown)].into();
        propagate(&mut flags);
        assert!(flags[&Krylov].holds() && flags[&Weak].holds() && !flags[&Fully].holds());
    }
}
