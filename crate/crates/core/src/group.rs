//! Finite-rank torsion-free groups `F ⊆ G ⊆ QF`, given by one local lattice
//! (plus divisible directions) per prime class.
//!
//! Membership and heights at a class are read off the coordinates
//! `y = B⁻¹ x` in the local basis `B`: non-divisible coordinates must be
//! integral, and the height is their minimal valuation.
//!
//! The `Rest` class stands for infinitely many concrete primes. Its data is
//! Laurent in a generic prime; the finitely many primes dividing a
//! coefficient are evaluated individually.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::chartype::{self, same_registry, Characteristic, HeightValue, TypeRep};
use crate::endoring::EndModule;
use crate::error::{Error, Result};
use crate::linalg::{self, LMat, QMat, ZMat};
use crate::primesym::{ClassKey, FamilyId, LaurentScalar, Registry};
use crate::qmath::{self, Q};

/// Symbol used for the generic prime of the `Rest` class.
pub fn rest_symbol() -> FamilyId {
    "rest".into()
}

/// The Laurent symbol local scalars of a class may carry.
pub fn class_symbol(key: &ClassKey) -> Option<FamilyId> {
    match key {
        ClassKey::Explicit(_) => None,
        ClassKey::Family(f) => Some(f.clone()),
        ClassKey::Rest => Some(rest_symbol()),
    }
}

/// Local lattice `L_c` with basis columns `B_c`; columns listed in
/// `divisible` span the divisible part at `c`.
#[derive(Clone, PartialEq, Eq)]
pub struct LocalData {
    basis: LMat,
    inverse: LMat,
    divisible: BTreeSet<usize>,
}

impl fmt::Debug for LocalData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LocalData")
            .field("basis", &self.basis)
            .field("divisible", &self.divisible)
            .finish()
    }
}

impl LocalData {
    pub fn identity(n: usize) -> Self {
        LocalData {
            basis: LMat::identity(n),
            inverse: LMat::identity(n),
            divisible: BTreeSet::new(),
        }
    }

    pub fn new(basis: LMat, divisible: BTreeSet<usize>) -> Result<Self> {
        if !basis.is_square() {
            return Err(Error::Dimension {
                expected: basis.rows(),
                found: basis.cols(),
            });
        }
        let inverse = basis.inverse_monomial_det().ok_or_else(|| Error::InvalidLocal {
            class: String::new(),
            reason: "determinant must be a nonzero monomial".into(),
        })?;
        Ok(LocalData { basis, inverse, divisible })
    }

    pub fn basis(&self) -> &LMat {
        &self.basis
    }

    pub fn inverse(&self) -> &LMat {
        &self.inverse
    }

    pub fn divisible(&self) -> &BTreeSet<usize> {
        &self.divisible
    }

    pub fn non_divisible(&self) -> Vec<usize> {
        (0..self.basis.rows()).filter(|i| !self.divisible.contains(i)).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.divisible.is_empty() && self.basis == LMat::identity(self.basis.rows())
    }

    /// Primes dividing any coefficient of the basis or its inverse.
    pub fn coefficient_primes(&self) -> BTreeSet<u64> {
        self.basis
            .entries()
            .chain(self.inverse.entries())
            .flat_map(LaurentScalar::support)
            .collect()
    }

    /// The data seen at a concrete prime `q` of a generic class.
    pub fn eval(&self, q: u64) -> LocalData {
        LocalData {
            basis: LMat::from_rational(&self.basis.eval(q)),
            inverse: LMat::from_rational(&self.inverse.eval(q)),
            divisible: self.divisible.clone(),
        }
    }

    fn validate(&self, key: &ClassKey, n: usize, reg: &Registry) -> Result<()> {
        let bad = |reason: String| Error::InvalidLocal {
            class: key.to_string(),
            reason,
        };
        if self.basis.rows() != n {
            return Err(Error::Dimension {
                expected: n,
                found: self.basis.rows(),
            });
        }
        if let Some(&d) = self.divisible.iter().find(|&&d| d >= n) {
            return Err(bad(format!("divisible column {d} out of range")));
        }
        let sym = class_symbol(key);
        for e in self.basis.entries() {
            if e.family().is_some() && e.family() != sym.as_ref() {
                return Err(bad(format!("entry {e} uses a foreign prime symbol")));
            }
        }
        // F ⊆ L_c: the inverse is integral at the class.
        let integral = |m: &LMat, q: Option<u64>| {
            m.entries().all(|e| match q {
                Some(q) => qmath::is_local_integral(&e.eval(q), q),
                None => e.is_integral_on_family(),
            })
        };
        let ok = match key {
            ClassKey::Explicit(q) => integral(&self.inverse, Some(*q)),
            ClassKey::Family(_) => integral(&self.inverse, None),
            ClassKey::Rest => {
                let explicit = reg.explicit_primes();
                integral(&self.inverse, None)
                    && self
                        .coefficient_primes()
                        .into_iter()
                        .filter(|q| !explicit.contains(q))
                        .all(|q| integral(&self.inverse, Some(q)))
            }
        };
        if !ok {
            return Err(bad("the base lattice is not contained in the local lattice".into()));
        }
        Ok(())
    }
}

/// Vector in `QF`, possibly involving the generic prime of one family.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Element {
    coords: Vec<LaurentScalar>,
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let fam = self.family().cloned();
        match fam {
            None => {
                let parts: Vec<String> = self.rational_coords().unwrap().iter().map(qmath::fmt_rational).collect();
                write!(f, "({})", parts.join(","))
            }
            Some(id) => {
                let parts: Vec<String> = self
                    .components()
                    .iter()
                    .map(|(e, v)| {
                        let v: Vec<String> = v.iter().map(qmath::fmt_rational).collect();
                        format!("({})*p^{e}", v.join(","))
                    })
                    .collect();
                write!(f, "{} @{id}", parts.join(" + "))
            }
        }
    }
}

impl Element {
    pub fn new(coords: Vec<LaurentScalar>) -> Result<Self> {
        let mut fam: Option<&FamilyId> = None;
        for c in &coords {
            if let Some(f) = c.family() {
                if f.as_ref() == "rest" {
                    return Err(Error::Parse("elements cannot use the rest symbol".into()));
                }
                match fam {
                    Some(g) if g != f => return Err(Error::FamilyMismatch(g.to_string(), f.to_string())),
                    _ => fam = Some(f),
                }
            }
        }
        Ok(Element { coords })
    }

    pub fn from_ints(v: &[i64]) -> Self {
        Element {
            coords: v.iter().map(|&x| LaurentScalar::int(x)).collect(),
        }
    }

    pub fn from_rationals(v: Vec<Q>) -> Self {
        Element {
            coords: v.into_iter().map(LaurentScalar::constant).collect(),
        }
    }

    pub fn zero(n: usize) -> Self {
        Element {
            coords: vec![LaurentScalar::zero(); n],
        }
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = vec![0; n];
        v[i] = 1;
        Self::from_ints(&v)
    }

    pub fn rank(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[LaurentScalar] {
        &self.coords
    }

    pub fn family(&self) -> Option<&FamilyId> {
        self.coords.iter().find_map(LaurentScalar::family)
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(LaurentScalar::is_zero)
    }

    pub fn rational_coords(&self) -> Option<Vec<Q>> {
        self.coords.iter().map(LaurentScalar::as_rational).collect()
    }

    /// `x = Σ p^i v_i` with rational vectors `v_i`.
    pub fn components(&self) -> BTreeMap<i64, Vec<Q>> {
        let n = self.coords.len();
        let mut out: BTreeMap<i64, Vec<Q>> = BTreeMap::new();
        for (j, c) in self.coords.iter().enumerate() {
            for (e, v) in c.terms() {
                out.entry(*e).or_insert_with(|| vec![Q::zero(); n])[j] = v.clone();
            }
        }
        if out.is_empty() {
            out.insert(0, vec![Q::zero(); n]);
        }
        out
    }

    pub fn try_add(&self, o: &Element) -> Result<Element> {
        if self.rank() != o.rank() {
            return Err(Error::Dimension {
                expected: self.rank(),
                found: o.rank(),
            });
        }
        let coords = self
            .coords
            .iter()
            .zip(&o.coords)
            .map(|(a, b)| a.try_add(b))
            .collect::<Result<_>>()?;
        Element::new(coords)
    }

    pub fn scale(&self, c: &Q) -> Element {
        Element {
            coords: self.coords.iter().map(|x| x.scale(c)).collect(),
        }
    }

    pub fn neg(&self) -> Element {
        self.scale(&-Q::one())
    }

    /// Multiplies by `p^k` for the generic prime of `family`.
    pub fn shift(&self, family: &FamilyId, k: i64) -> Element {
        Element {
            coords: self.coords.iter().map(|x| x.shift(family, k)).collect(),
        }
    }

    /// Substitutes a concrete prime for the family symbol.
    pub fn eval(&self, p: u64) -> Vec<Q> {
        self.coords.iter().map(|x| x.eval(p)).collect()
    }

    /// Image under a rational matrix (column convention).
    pub fn apply(&self, m: &QMat) -> Element {
        let lm = LMat::from_rational(m);
        Element {
            coords: lm.apply(&self.coords),
        }
    }

    /// Image under a Laurent matrix; fails if two family symbols meet.
    pub fn apply_laurent(&self, m: &LMat) -> Result<Element> {
        let mut coords = Vec::with_capacity(m.rows());
        for i in 0..m.rows() {
            let mut acc = LaurentScalar::zero();
            for (j, c) in self.coords.iter().enumerate() {
                acc = acc.try_add(&m[(i, j)].try_mul(c)?)?;
            }
            coords.push(acc);
        }
        Element::new(coords)
    }

    pub fn support(&self) -> BTreeSet<u64> {
        self.coords.iter().flat_map(LaurentScalar::support).collect()
    }
}

/// Heights of an element at every class plus the concrete `Rest` primes
/// where the value differs from the generic one.
#[derive(Debug, Clone)]
pub struct HeightProfile {
    pub classes: BTreeMap<ClassKey, HeightValue>,
    pub rest_exceptions: BTreeMap<u64, HeightValue>,
}

/// A finite-rank torsion-free group given by local data per class.
pub struct FRGroup {
    name: String,
    registry: Arc<Registry>,
    rank: usize,
    locals: BTreeMap<ClassKey, LocalData>,
    pub(crate) end_cache: OnceLock<Arc<EndModule>>,
}

impl Clone for FRGroup {
    fn clone(&self) -> Self {
        let end_cache = OnceLock::new();
        if let Some(e) = self.end_cache.get() {
            let _ = end_cache.set(e.clone());
        }
        FRGroup {
            name: self.name.clone(),
            registry: self.registry.clone(),
            rank: self.rank,
            locals: self.locals.clone(),
            end_cache,
        }
    }
}

impl PartialEq for FRGroup {
    fn eq(&self, o: &Self) -> bool {
        same_registry(&self.registry, &o.registry) && self.rank == o.rank && self.locals == o.locals
    }
}

impl fmt::Debug for FRGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FRGroup")
            .field("name", &self.name)
            .field("rank", &self.rank)
            .field("locals", &self.locals)
            .finish()
    }
}

impl FRGroup {
    /// Validates and builds a group; classes without data get the identity.
    pub fn new(name: impl Into<String>, registry: Arc<Registry>, rank: usize, locals: BTreeMap<ClassKey, LocalData>) -> Result<Self> {
        if rank == 0 {
            return Err(Error::Zero("rank"));
        }
        for (k, l) in &locals {
            if !registry.has_class(k) {
                return Err(Error::UnknownClass(k.to_string()));
            }
            l.validate(k, rank, &registry)?;
        }
        let locals = registry
            .keys()
            .map(|k| {
                let l = locals.get(&k).cloned().unwrap_or_else(|| LocalData::identity(rank));
                (k, l)
            })
            .collect();
        Ok(FRGroup {
            name: name.into(),
            registry,
            rank,
            locals,
            end_cache: OnceLock::new(),
        })
    }

    /// The base lattice `Z^n`.
    pub fn free(name: impl Into<String>, registry: Arc<Registry>, rank: usize) -> Result<Self> {
        Self::new(name, registry, rank, BTreeMap::new())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn registry(&self) -> &Arc<Registry> {
        &self.registry
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn local(&self, key: &ClassKey) -> &LocalData {
        &self.locals[key]
    }

    pub fn locals(&self) -> &BTreeMap<ClassKey, LocalData> {
        &self.locals
    }

    pub fn has_divisible_part(&self) -> bool {
        self.locals.values().any(|l| !l.divisible.is_empty())
    }

    /// Concrete `Rest` primes at which the generic rest data may specialise
    /// differently.
    pub fn exceptional_rest_primes(&self) -> BTreeSet<u64> {
        let explicit = self.registry.explicit_primes();
        self.locals[&ClassKey::Rest]
            .coefficient_primes()
            .into_iter()
            .filter(|q| !explicit.contains(q))
            .collect()
    }

    /// Every prime occurring in the group data.
    pub fn data_primes(&self) -> BTreeSet<u64> {
        let mut s: BTreeSet<u64> = self.locals.values().flat_map(LocalData::coefficient_primes).collect();
        s.extend(self.registry.explicit_primes());
        s
    }

    fn check_element(&self, x: &Element) -> Result<()> {
        if x.rank() != self.rank {
            return Err(Error::Dimension {
                expected: self.rank,
                found: x.rank(),
            });
        }
        if let Some(f) = x.family() {
            if self.registry.family(f).is_none() {
                return Err(Error::UnknownClass(f.to_string()));
            }
        }
        Ok(())
    }

    /// Vectors to test at class `key`: `x` itself when it lives in the
    /// class's symbol, otherwise its components.
    fn parts(&self, key: &ClassKey, x: &Element) -> Vec<Vec<LaurentScalar>> {
        match x.family() {
            None => vec![x.coords.clone()],
            Some(f) if class_symbol(key).as_ref() == Some(f) => vec![x.coords.clone()],
            Some(_) => x
                .components()
                .into_values()
                .map(|v| v.into_iter().map(LaurentScalar::constant).collect())
                .collect(),
        }
    }

    fn local_height(l: &LocalData, key: &ClassKey, parts: &[Vec<LaurentScalar>]) -> Option<i64> {
        let mut best: Option<i64> = None;
        for v in parts {
            let y = l.inverse.apply(v);
            for i in l.non_divisible() {
                let val = match key {
                    ClassKey::Explicit(q) => {
                        let r = y[i].eval(*q);
                        if r.is_zero() {
                            None
                        } else {
                            Some(qmath::val(&r, *q))
                        }
                    }
                    _ => y[i].generic_valuation(),
                };
                if let Some(v) = val {
                    best = Some(best.map_or(v, |b: i64| b.min(v)));
                }
            }
        }
        best
    }

    /// Concrete height at a `Rest` prime.
    fn rest_prime_height(&self, q: u64, x: &Element) -> Option<i64> {
        let l = self.locals[&ClassKey::Rest].eval(q);
        let parts = self.parts(&ClassKey::Explicit(q), x);
        Self::local_height(&l, &ClassKey::Explicit(q), &parts)
    }

    fn to_height(h: Option<i64>) -> Result<HeightValue, ()> {
        match h {
            None => Ok(HeightValue::Inf),
            Some(v) if v >= 0 => Ok(HeightValue::Finite(v as u64)),
            Some(_) => Err(()),
        }
    }

    /// Heights everywhere, or `None` when `x ∉ G`.
    pub fn height_profile(&self, x: &Element) -> Result<Option<HeightProfile>> {
        self.check_element(x)?;
        let mut classes = BTreeMap::new();
        for (k, l) in &self.locals {
            let parts = self.parts(k, x);
            match Self::to_height(Self::local_height(l, k, &parts)) {
                Ok(h) => {
                    classes.insert(k.clone(), h);
                }
                Err(()) => return Ok(None),
            }
        }
        let generic = classes[&ClassKey::Rest];
        let mut rest_exceptions = BTreeMap::new();
        for q in self.rest_candidates(x) {
            match Self::to_height(self.rest_prime_height(q, x)) {
                Ok(h) if h != generic => {
                    rest_exceptions.insert(q, h);
                }
                Ok(_) => {}
                Err(()) => return Ok(None),
            }
        }
        Ok(Some(HeightProfile { classes, rest_exceptions }))
    }

    /// Rest primes dividing a coefficient of the local coordinates of `x`.
    fn rest_candidates(&self, x: &Element) -> BTreeSet<u64> {
        let explicit = self.registry.explicit_primes();
        let l = &self.locals[&ClassKey::Rest];
        let mut s = BTreeSet::new();
        for v in self.parts(&ClassKey::Rest, x) {
            for y in l.inverse.apply(&v) {
                s.extend(y.support());
            }
        }
        s.retain(|q| !explicit.contains(q));
        s
    }

    pub fn contains(&self, x: &Element) -> Result<bool> {
        Ok(self.height_profile(x)?.is_some())
    }

    fn member_profile(&self, x: &Element) -> Result<HeightProfile> {
        if x.is_zero() {
            return Err(Error::Zero("element"));
        }
        self.height_profile(x)?.ok_or(Error::NotMember)
    }

    /// Height at a class; for `Rest` this is the generic value.
    pub fn height(&self, x: &Element, key: &ClassKey) -> Result<HeightValue> {
        if !self.registry.has_class(key) {
            return Err(Error::UnknownClass(key.to_string()));
        }
        Ok(self.member_profile(x)?.classes[key])
    }

    /// Height at a concrete prime.
    pub fn height_at_prime(&self, x: &Element, p: u64) -> Result<HeightValue> {
        if !qmath::is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let prof = self.member_profile(x)?;
        Ok(match self.registry.class_of_prime(p) {
            ClassKey::Rest => prof.rest_exceptions.get(&p).copied().unwrap_or(prof.classes[&ClassKey::Rest]),
            k => prof.classes[&k],
        })
    }

    pub fn characteristic_of(&self, x: &Element) -> Result<Characteristic> {
        let prof = self.member_profile(x)?;
        let mut c = Characteristic::from_parts(&self.registry, HeightValue::ZERO, &prof.classes, &BTreeMap::new())?;
        for (q, h) in prof.rest_exceptions {
            c.set_prime(q, h)?;
        }
        Ok(c)
    }

    pub fn type_of_element(&self, x: &Element) -> Result<TypeRep> {
        Ok(chartype::type_of(&self.characteristic_of(x)?))
    }

    /// Membership in `p^χ G`.
    pub fn in_chi_subgroup(&self, x: &Element, chi: &Characteristic) -> Result<bool> {
        chartype::chi_le(chi, &self.characteristic_of(x)?)
    }

    /// Membership in `G(τ)`.
    pub fn in_tau_subgroup(&self, x: &Element, tau: &TypeRep) -> Result<bool> {
        chartype::type_le(tau, &self.type_of_element(x)?)
    }

    pub fn direct_sum(&self, other: &FRGroup) -> Result<FRGroup> {
        if !same_registry(&self.registry, &other.registry) {
            return Err(Error::RegistryMismatch);
        }
        let n = self.rank;
        let locals = self
            .locals
            .iter()
            .map(|(k, a)| {
                let b = &other.locals[k];
                let l = LocalData {
                    basis: LMat::block_diag(&a.basis, &b.basis),
                    inverse: LMat::block_diag(&a.inverse, &b.inverse),
                    divisible: a.divisible.iter().copied().chain(b.divisible.iter().map(|d| d + n)).collect(),
                };
                (k.clone(), l)
            })
            .collect();
        FRGroup::new(
            format!("{}+{}", self.name, other.name),
            self.registry.clone(),
            n + other.rank,
            locals,
        )
    }

    /// Copy in which the sampled primes of each family become explicit
    /// primes carrying that family's data evaluated at the sample.
    pub fn realize(&self, samples: &BTreeMap<FamilyId, Vec<u64>>) -> Result<FRGroup> {
        let mut real = crate::primesym::Realization::new(&self.registry);
        let data = self.data_primes();
        for (id, ps) in samples {
            if let Some(p) = ps.iter().find(|p| data.contains(p)) {
                return Err(Error::Realization(format!("{p} divides the group data")));
            }
            real.realize(id, ps)?;
        }
        let reg = Arc::new(real.realized_registry(&[])?);
        let mut locals = BTreeMap::new();
        for (k, l) in &self.locals {
            match k {
                ClassKey::Family(id) if samples.contains_key(id) => {
                    for &q in &samples[id] {
                        locals.insert(ClassKey::Explicit(q), l.eval(q));
                    }
                }
                _ => {
                    locals.insert(k.clone(), l.clone());
                }
            }
        }
        FRGroup::new(format!("{}@realized", self.name), reg, self.rank, locals)
    }

    /// The same group over a registry that has additional explicit primes.
    pub fn with_registry(&self, reg: Arc<Registry>) -> Result<FRGroup> {
        let mut locals = BTreeMap::new();
        for k in reg.keys() {
            let l = match (&k, self.locals.get(&k)) {
                (_, Some(l)) => l.clone(),
                (ClassKey::Explicit(q), None) => self.locals[&ClassKey::Rest].eval(*q),
                (ClassKey::Family(f), None) => return Err(Error::UnknownClass(f.to_string())),
                (ClassKey::Rest, None) => unreachable!(),
            };
            locals.insert(k, l);
        }
        FRGroup::new(self.name.clone(), reg, self.rank, locals)
    }
}

/// Rank-1 group `Q_χ ⊆ Q` containing 1 with `χ(1) = χ`.
pub fn rank1(name: impl Into<String>, chi: &Characteristic) -> Result<FRGroup> {
    let reg = chi.registry().clone();
    let mut locals = BTreeMap::new();
    for k in reg.keys() {
        let l = match (chi.at_class(&k), &k) {
            (HeightValue::Inf, _) => {
                if k == ClassKey::Rest && chi.overrides().values().any(|v| !v.is_inf()) {
                    return Err(Error::Precondition(
                        "finite height at a single prime of a divisible rest class".into(),
                    ));
                }
                LocalData {
                    basis: LMat::identity(1),
                    inverse: LMat::identity(1),
                    divisible: [0].into(),
                }
            }
            (HeightValue::Finite(e), ClassKey::Rest) => {
                // per-prime corrections folded into a rational factor
                let mut c = Q::one();
                for (&q, v) in chi.overrides() {
                    let f = v
                        .finite()
                        .ok_or_else(|| Error::Precondition("infinite height at a single prime of a reduced rest class".into()))?;
                    c *= qmath::qpow(q, e as i64 - f as i64);
                }
                let b = LaurentScalar::monomial(Some(rest_symbol()), -(e as i64), c);
                LocalData::new(LMat::from_rows(vec![vec![b]]), BTreeSet::new())?
            }
            (HeightValue::Finite(e), key) => {
                let b = match key {
                    ClassKey::Explicit(q) => LaurentScalar::constant(qmath::qpow(*q, -(e as i64))),
                    _ => LaurentScalar::monomial(class_symbol(key), -(e as i64), Q::one()),
                };
                LocalData::new(LMat::from_rows(vec![vec![b]]), BTreeSet::new())?
            }
        };
        locals.insert(k, l);
    }
    FRGroup::new(name, reg, 1, locals)
}

/// Unimodular integer matrix whose first column is the primitive vector `v`.
pub fn complete_to_basis(v: &[BigInt]) -> Result<ZMat> {
    let n = v.len();
    if n == 0 {
        return Err(Error::Zero("vector"));
    }
    let g = v.iter().fold(BigInt::zero(), |acc, x| num_integer::Integer::gcd(&acc, x));
    if !g.is_one() {
        return Err(Error::NotPrimitive);
    }
    let col: ZMat = v.iter().map(|x| vec![x.clone()]).collect();
    let (_, u) = linalg::hermite_normal_form(&col);
    let uq = QMat::from_rows(u.iter().map(|r| r.iter().map(|x| Q::from_integer(x.clone())).collect()).collect());
    let inv = linalg::inverse(&uq).expect("unimodular");
    let out: ZMat = inv
        .to_rows()
        .into_iter()
        .map(|r| r.into_iter().map(|x| x.to_integer()).collect())
        .collect();
    debug_assert!(out.iter().zip(v).all(|(r, x)| &r[0] == x));
    debug_assert!(linalg::det_q(&uq).abs().is_one());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::{q, qf};

    fn reg() -> Arc<Registry> {
        Arc::new(Registry::new(&[2, 5], &["P"]).unwrap())
    }

    fn zv(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn completion() {
        assert_eq!(complete_to_basis(&zv(&[1, 0])).unwrap(), vec![zv(&[1, 0]), zv(&[0, 1])]);
        for v in [vec![2, 3], vec![1, 1, 1], vec![3, 5, 7]] {
            let m = complete_to_basis(&zv(&v)).unwrap();
            let mq = QMat::from_rows(m.iter().map(|r| r.iter().map(|x| Q::from_integer(x.clone())).collect()).collect());
            assert_eq!(linalg::det_q(&mq).abs(), q(1));
            assert_eq!(m.iter().map(|r| r[0].clone()).collect::<Vec<_>>(), zv(&v));
        }
        assert_eq!(complete_to_basis(&zv(&[2, 4])), Err(Error::NotPrimitive));
    }

    #[test]
    fn rank1_heights() {
        let r = reg();
        let mut chi = Characteristic::zero(&r);
        chi.set_prime(2, HeightValue::Inf).unwrap();
        chi.set_class(&ClassKey::family("P"), HeightValue::Finite(1)).unwrap();
        chi.set_class(&ClassKey::Rest, HeightValue::Finite(1)).unwrap();
        chi.set_prime(7, HeightValue::Finite(3)).unwrap();
        let g = rank1("A", &chi).unwrap();
        let one = Element::from_ints(&[1]);
        assert_eq!(g.characteristic_of(&one).unwrap(), chi);
        assert_eq!(g.height_at_prime(&one, 7).unwrap(), HeightValue::Finite(3));
        assert_eq!(g.height_at_prime(&one, 11).unwrap(), HeightValue::Finite(1));
        let x = Element::from_rationals(vec![qf(15, 8)]);
        assert_eq!(g.height_at_prime(&x, 5).unwrap(), HeightValue::Finite(1));
        assert_eq!(g.height_at_prime(&x, 3).unwrap(), HeightValue::Finite(2));
        assert!(!g.contains(&Element::from_rationals(vec![qf(1, 5)])).unwrap());
        assert!(g.contains(&Element::from_rationals(vec![qf(1, 7 * 7 * 7 * 11)])).unwrap());
        assert!(!g.contains(&Element::from_rationals(vec![qf(1, 121)])).unwrap());
        let fam: FamilyId = "P".into();
        assert!(g.contains(&one.shift(&fam, -1)).unwrap());
        assert!(!g.contains(&one.shift(&fam, -2)).unwrap());
    }

    #[test]
    fn sums_and_divisible() {
        let r = reg();
        let z = FRGroup::free("Z", r.clone(), 1).unwrap();
        let mut chi = Characteristic::zero(&r);
        chi.set_prime(5, HeightValue::Inf).unwrap();
        let d = rank1("D", &chi).unwrap();
        let g = z.direct_sum(&d).unwrap();
        let x = Element::from_rationals(vec![q(1), qf(1, 125)]);
        assert!(g.contains(&x).unwrap());
        assert_eq!(g.height_at_prime(&x, 5).unwrap(), HeightValue::Finite(0));
        let y = Element::from_rationals(vec![q(0), qf(1, 125)]);
        assert_eq!(g.height_at_prime(&y, 5).unwrap(), HeightValue::Inf);
        assert!(!g.contains(&Element::from_rationals(vec![qf(1, 5), q(0)])).unwrap());
        assert!(g.characteristic_of(&Element::zero(2)).is_err());
    }

    #[test]
    fn invalid_local_rejected() {
        let r = reg();
        // L = 5 Z does not contain Z
        let b = LMat::from_rows(vec![vec![LaurentScalar::int(5)]]);
        let mut locals = BTreeMap::new();
        locals.insert(ClassKey::Explicit(5), LocalData::new(b, BTreeSet::new()).unwrap());
        assert!(FRGroup::new("bad", r.clone(), 1, locals).is_err());
        let b = LMat::from_rows(vec![vec![&LaurentScalar::one() + &LaurentScalar::in_family(&"P".into(), 1, q(1))]]);
        assert!(LocalData::new(b, BTreeSet::new()).is_err());
    }
}
