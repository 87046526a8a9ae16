//! The prime universe: explicit primes, anonymous infinite prime families
//! and the remaining primes, plus Laurent scalars in the generic prime of a
//! family.
//!
//! A family is never populated by a concrete prime. Computations over its
//! generic member `p` treat `p` as an indeterminate carrying the `p`-adic
//! valuation, which agrees with the valuation at every member of the
//! family once the finitely many primes dividing the data are thrown out.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::qmath::{self, is_prime, Q};

pub type FamilyId = Arc<str>;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Family {
    pub id: FamilyId,
    pub excluded: BTreeSet<u64>,
}

impl Family {
    pub fn new(id: &str) -> Self {
        Family {
            id: id.into(),
            excluded: BTreeSet::new(),
        }
    }
}

/// Returns `f` with the given primes removed.
pub fn refine_family(f: &Family, removed: &BTreeSet<u64>) -> Family {
    let mut out = f.clone();
    out.excluded.extend(removed.iter().copied());
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PrimeClass {
    Explicit(u64),
    Family(Family),
    Rest,
}

impl PrimeClass {
    pub fn key(&self) -> ClassKey {
        match self {
            PrimeClass::Explicit(p) => ClassKey::Explicit(*p),
            PrimeClass::Family(f) => ClassKey::Family(f.id.clone()),
            PrimeClass::Rest => ClassKey::Rest,
        }
    }
}

/// Name of a prime class, used as a map key throughout the crate.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ClassKey {
    Explicit(u64),
    Family(FamilyId),
    Rest,
}

impl ClassKey {
    pub fn family(id: &str) -> Self {
        ClassKey::Family(id.into())
    }

    /// The family symbol carried by scalars local to this class.
    pub fn family_id(&self) -> Option<&FamilyId> {
        match self {
            ClassKey::Family(f) => Some(f),
            _ => None,
        }
    }

    pub fn is_generic(&self) -> bool {
        !matches!(self, ClassKey::Explicit(_))
    }
}

impl fmt::Display for ClassKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassKey::Explicit(p) => write!(f, "{p}"),
            ClassKey::Family(id) => write!(f, "{id}"),
            ClassKey::Rest => write!(f, "rest"),
        }
    }
}

/// Ordered collection of disjoint prime classes. A `Rest` class is always
/// present and stands for every prime not named elsewhere.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Registry {
    classes: Vec<PrimeClass>,
    used_primes: BTreeSet<u64>,
}

impl Registry {
    pub fn new(explicit: &[u64], families: &[&str]) -> Result<Self> {
        let fams = families.iter().map(|id| Family::new(id)).collect();
        Self::from_parts(explicit, fams, &[])
    }

    pub fn from_parts(explicit: &[u64], families: Vec<Family>, used: &[u64]) -> Result<Self> {
        let mut classes = Vec::new();
        let mut seen = BTreeSet::new();
        for &p in explicit {
            if !is_prime(p) {
                return Err(Error::NotPrime(p));
            }
            if !seen.insert(p) {
                return Err(Error::InvalidRegistry(format!("explicit prime {p} listed twice")));
            }
            classes.push(PrimeClass::Explicit(p));
        }
        let mut ids = BTreeSet::new();
        for f in families {
            if f.id.is_empty() || f.id.as_ref() == "rest" || f.id.parse::<u64>().is_ok() {
                return Err(Error::InvalidRegistry(format!("bad family id `{}`", f.id)));
            }
            if !ids.insert(f.id.clone()) {
                return Err(Error::InvalidRegistry(format!("family `{}` listed twice", f.id)));
            }
            classes.push(PrimeClass::Family(f));
        }
        classes.push(PrimeClass::Rest);
        let mut used_primes: BTreeSet<u64> = explicit.iter().copied().collect();
        for &p in used {
            if !is_prime(p) {
                return Err(Error::NotPrime(p));
            }
            used_primes.insert(p);
        }
        Ok(Registry { classes, used_primes })
    }

    pub fn classes(&self) -> &[PrimeClass] {
        &self.classes
    }

    pub fn keys(&self) -> impl Iterator<Item = ClassKey> + '_ {
        self.classes.iter().map(PrimeClass::key)
    }

    pub fn explicit_primes(&self) -> BTreeSet<u64> {
        self.classes
            .iter()
            .filter_map(|c| match c {
                PrimeClass::Explicit(p) => Some(*p),
                _ => None,
            })
            .collect()
    }

    pub fn families(&self) -> impl Iterator<Item = &Family> {
        self.classes.iter().filter_map(|c| match c {
            PrimeClass::Family(f) => Some(f),
            _ => None,
        })
    }

    pub fn family(&self, id: &str) -> Option<&Family> {
        self.families().find(|f| f.id.as_ref() == id)
    }

    pub fn has_class(&self, key: &ClassKey) -> bool {
        match key {
            ClassKey::Explicit(p) => self.explicit_primes().contains(p),
            ClassKey::Family(id) => self.family(id).is_some(),
            ClassKey::Rest => true,
        }
    }

    pub fn used_primes(&self) -> &BTreeSet<u64> {
        &self.used_primes
    }

    /// Adds primes to the used set; they must not be sampled by a realization.
    pub fn with_used(mut self, primes: impl IntoIterator<Item = u64>) -> Self {
        self.used_primes.extend(primes);
        self
    }

    /// The class a concrete prime belongs to. Concrete primes are never
    /// family members, so this is either an explicit class or `Rest`.
    pub fn class_of_prime(&self, p: u64) -> ClassKey {
        if self.explicit_primes().contains(&p) {
            ClassKey::Explicit(p)
        } else {
            ClassKey::Rest
        }
    }

    /// Removes primes from a family (the registry keeps the refined family).
    pub fn refine(&mut self, id: &str, removed: &BTreeSet<u64>) -> Result<()> {
        for c in &mut self.classes {
            if let PrimeClass::Family(f) = c {
                if f.id.as_ref() == id {
                    *f = refine_family(f, removed);
                    return Ok(());
                }
            }
        }
        Err(Error::UnknownClass(id.to_string()))
    }

    pub fn parse_key(&self, s: &str) -> Result<ClassKey> {
        let s = s.trim();
        let key = if s == "rest" {
            ClassKey::Rest
        } else if let Ok(p) = s.parse::<u64>() {
            ClassKey::Explicit(p)
        } else {
            ClassKey::family(s)
        };
        if self.has_class(&key) {
            Ok(key)
        } else {
            Err(Error::UnknownClass(s.to_string()))
        }
    }
}

/// Concrete sample primes standing in for symbolic families.
#[derive(Debug, Clone)]
pub struct Realization<'r> {
    registry: &'r Registry,
    samples: BTreeMap<FamilyId, BTreeSet<u64>>,
}

impl<'r> Realization<'r> {
    pub fn new(registry: &'r Registry) -> Self {
        Realization {
            registry,
            samples: BTreeMap::new(),
        }
    }

    /// Registers `samples` as concrete members of the family `id`.
    pub fn realize(&mut self, id: &str, samples: &[u64]) -> Result<BTreeSet<u64>> {
        let fam = self.registry.family(id).ok_or_else(|| Error::UnknownClass(id.to_string()))?;
        let mut set = BTreeSet::new();
        for &p in samples {
            if !is_prime(p) {
                return Err(Error::NotPrime(p));
            }
            if self.registry.used_primes().contains(&p) {
                return Err(Error::Realization(format!("{p} is already used by the registry")));
            }
            if fam.excluded.contains(&p) {
                return Err(Error::Realization(format!("{p} was excluded from {id}")));
            }
            if self.samples.values().any(|s| s.contains(&p)) {
                return Err(Error::Realization(format!("{p} already realizes another family")));
            }
            if !set.insert(p) {
                return Err(Error::Realization(format!("{p} sampled twice")));
            }
        }
        self.samples.entry(fam.id.clone()).or_default().extend(set.iter().copied());
        Ok(set)
    }

    pub fn samples(&self) -> &BTreeMap<FamilyId, BTreeSet<u64>> {
        &self.samples
    }

    /// Registry in which every sampled prime is explicit and realized
    /// families are dropped.
    pub fn realized_registry(&self, extra_explicit: &[u64]) -> Result<Registry> {
        let mut explicit: BTreeSet<u64> = self.registry.explicit_primes();
        for s in self.samples.values() {
            explicit.extend(s.iter().copied());
        }
        explicit.extend(extra_explicit.iter().copied());
        let families: Vec<Family> = self
            .registry
            .families()
            .filter(|f| !self.samples.contains_key(&f.id))
            .cloned()
            .collect();
        let explicit: Vec<u64> = explicit.into_iter().collect();
        let used: Vec<u64> = self.registry.used_primes().iter().copied().collect();
        Registry::from_parts(&explicit, families, &used)
    }
}

/// Finite Laurent expression `Σ c_i p^i` in the generic prime `p` of one
/// family. A family-free scalar is a plain rational (single exponent 0).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct LaurentScalar {
    family: Option<FamilyId>,
    coeffs: BTreeMap<i64, Q>,
}

impl LaurentScalar {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Q::one())
    }

    pub fn constant(c: Q) -> Self {
        Self::monomial(None, 0, c)
    }

    pub fn int(n: i64) -> Self {
        Self::constant(qmath::q(n))
    }

    pub fn monomial(family: Option<FamilyId>, exp: i64, c: Q) -> Self {
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(exp, c);
        }
        LaurentScalar { family, coeffs }.normalized()
    }

    /// `c · p^exp` in family `id`.
    pub fn in_family(id: &FamilyId, exp: i64, c: Q) -> Self {
        Self::monomial(Some(id.clone()), exp, c)
    }

    pub fn from_terms(family: Option<FamilyId>, terms: BTreeMap<i64, Q>) -> Self {
        LaurentScalar { family, coeffs: terms }.normalized()
    }

    fn normalized(mut self) -> Self {
        self.coeffs.retain(|_, c| !c.is_zero());
        if self.coeffs.keys().all(|&e| e == 0) {
            self.family = None;
        }
        self
    }

    pub fn family(&self) -> Option<&FamilyId> {
        self.family.as_ref()
    }

    pub fn terms(&self) -> &BTreeMap<i64, Q> {
        &self.coeffs
    }

    pub fn coeff(&self, exp: i64) -> Q {
        self.coeffs.get(&exp).cloned().unwrap_or_else(Q::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// The rational value when the scalar does not involve the family symbol.
    pub fn as_rational(&self) -> Option<Q> {
        if self.coeffs.keys().all(|&e| e == 0) {
            Some(self.coeff(0))
        } else {
            None
        }
    }

    /// `min{ i : c_i ≠ 0 }`, `None` for the zero scalar (infinite valuation).
    pub fn generic_valuation(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    pub fn is_integral_on_family(&self) -> bool {
        self.generic_valuation().is_none_or(|v| v >= 0)
    }

    /// Lowest-order term `(i, c_i)`.
    pub fn leading(&self) -> Option<(i64, &Q)> {
        self.coeffs.iter().next().map(|(e, c)| (*e, c))
    }

    /// Substitutes a concrete prime for the family symbol.
    pub fn eval(&self, p: u64) -> Q {
        self.coeffs.iter().fold(Q::zero(), |acc, (e, c)| acc + c * qmath::qpow(p, *e))
    }

    pub fn scale(&self, c: &Q) -> Self {
        LaurentScalar {
            family: self.family.clone(),
            coeffs: self.coeffs.iter().map(|(e, x)| (*e, x * c)).collect(),
        }
        .normalized()
    }

    /// Multiplies by `p^k` in the given family.
    pub fn shift(&self, family: &FamilyId, k: i64) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        if let Some(f) = &self.family {
            assert_eq!(f, family, "cross-family shift");
        }
        LaurentScalar {
            family: Some(family.clone()),
            coeffs: self.coeffs.iter().map(|(e, x)| (*e + k, x.clone())).collect(),
        }
        .normalized()
    }

    /// Primes dividing a numerator or denominator of some coefficient.
    pub fn support(&self) -> BTreeSet<u64> {
        self.coeffs.values().flat_map(qmath::support).collect()
    }

    fn merge_family(&self, other: &Self) -> Result<Option<FamilyId>> {
        match (&self.family, &other.family) {
            (Some(a), Some(b)) if a != b => Err(Error::FamilyMismatch(a.to_string(), b.to_string())),
            (Some(a), _) => Ok(Some(a.clone())),
            (None, b) => Ok(b.clone()),
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        let family = self.merge_family(other)?;
        let mut coeffs = self.coeffs.clone();
        for (e, c) in &other.coeffs {
            let slot = coeffs.entry(*e).or_insert_with(Q::zero);
            *slot += c;
        }
        Ok(LaurentScalar { family, coeffs }.normalized())
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        let family = self.merge_family(other)?;
        let mut coeffs: BTreeMap<i64, Q> = BTreeMap::new();
        for (e1, c1) in &self.coeffs {
            for (e2, c2) in &other.coeffs {
                let slot = coeffs.entry(e1 + e2).or_insert_with(Q::zero);
                *slot += c1 * c2;
            }
        }
        Ok(LaurentScalar { family, coeffs }.normalized())
    }

    /// Exact quotient in `Q[p, 1/p]`, `None` if `other` does not divide.
    pub fn div_exact(&self, other: &Self) -> Option<Self> {
        if other.is_zero() {
            return None;
        }
        if other.coeffs.len() == 1 {
            return self.div_monomial(other);
        }
        let family = self.merge_family(other).ok()?;
        if self.is_zero() {
            return Some(Self::zero());
        }
        let (nlo, dlo) = (*self.coeffs.keys().next()?, *other.coeffs.keys().next()?);
        let mut rem: Vec<Q> = dense(&self.coeffs, nlo);
        let den = dense(&other.coeffs, dlo);
        let dd = den.len() - 1;
        if rem.len() <= dd {
            return None;
        }
        let mut quot = vec![Q::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dd] / &den[dd];
            for (j, dj) in den.iter().enumerate() {
                rem[k + j] -= &c * dj;
            }
            quot[k] = c;
        }
        if rem.iter().any(|c| !c.is_zero()) {
            return None;
        }
        let coeffs = quot.into_iter().enumerate().map(|(k, c)| (k as i64 + nlo - dlo, c)).collect();
        Some(LaurentScalar { family, coeffs }.normalized())
    }

    /// Division by a nonzero monomial `c p^k`.
    pub fn div_monomial(&self, other: &Self) -> Option<Self> {
        if other.coeffs.len() != 1 {
            return None;
        }
        let family = self.merge_family(other).ok()?;
        let (k, c) = other.coeffs.iter().next()?;
        let inv = c.recip();
        Some(
            LaurentScalar {
                family,
                coeffs: self.coeffs.iter().map(|(e, x)| (e - k, x * &inv)).collect(),
            }
            .normalized(),
        )
    }
}

fn dense(terms: &BTreeMap<i64, Q>, lo: i64) -> Vec<Q> {
    let hi = *terms.keys().next_back().unwrap_or(&lo);
    (lo..=hi).map(|e| terms.get(&e).cloned().unwrap_or_else(Q::zero)).collect()
}

impl fmt::Display for LaurentScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.coeffs {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match e {
                0 => write!(f, "{}", qmath::fmt_rational(c))?,
                _ => write!(f, "{}*p^{}", qmath::fmt_rational(c), e)?,
            }
        }
        if let Some(id) = &self.family {
            write!(f, " @{id}")?;
        }
        Ok(())
    }
}

impl Add for &LaurentScalar {
    type Output = LaurentScalar;
    fn add(self, rhs: &LaurentScalar) -> LaurentScalar {
        self.try_add(rhs).expect("cross-family sum")
    }
}

impl Sub for &LaurentScalar {
    type Output = LaurentScalar;
    fn sub(self, rhs: &LaurentScalar) -> LaurentScalar {
        self.try_add(&-rhs).expect("cross-family difference")
    }
}

impl Mul for &LaurentScalar {
    type Output = LaurentScalar;
    fn mul(self, rhs: &LaurentScalar) -> LaurentScalar {
        self.try_mul(rhs).expect("cross-family product")
    }
}

impl Neg for &LaurentScalar {
    type Output = LaurentScalar;
    fn neg(self) -> LaurentScalar {
        LaurentScalar {
            family: self.family.clone(),
            coeffs: self.coeffs.iter().map(|(e, c)| (*e, -c.clone())).collect(),
        }
    }
}

impl From<Q> for LaurentScalar {
    fn from(c: Q) -> Self {
        LaurentScalar::constant(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::{q, qf};

    fn fam() -> FamilyId {
        "P2".into()
    }

    #[test]
    fn generic_valuation_examples() {
        let s = &LaurentScalar::int(3) + &LaurentScalar::in_family(&fam(), 1, q(2));
        assert_eq!(s.generic_valuation(), Some(0));
        assert!(s.is_integral_on_family());
        let t = LaurentScalar::in_family(&fam(), -1, q(7));
        assert_eq!(t.generic_valuation(), Some(-1));
        assert!(!t.is_integral_on_family());
        assert_eq!(LaurentScalar::zero().generic_valuation(), None);
        assert!(LaurentScalar::zero().is_integral_on_family());
        assert_eq!(LaurentScalar::int(5).generic_valuation(), Some(0));
    }

    #[test]
    fn arithmetic_and_eval() {
        let a = LaurentScalar::in_family(&fam(), -1, qf(1, 2));
        let b = LaurentScalar::in_family(&fam(), 2, q(3));
        let prod = &a * &b;
        assert_eq!(prod.generic_valuation(), Some(1));
        assert_eq!(prod.eval(11), qf(33, 2));
        assert_eq!((&a - &a), LaurentScalar::zero());
        let other = LaurentScalar::in_family(&"P3".into(), 1, q(1));
        assert!(a.try_mul(&other).is_err());
        let back = prod.div_monomial(&b).unwrap();
        assert_eq!(back, a);
    }

    #[test]
    fn exact_division() {
        let p = |e: i64, c: i64| LaurentScalar::in_family(&fam(), e, q(c));
        let a = &(&p(-1, 2) + &p(0, -3)) + &p(2, 1);
        let b = &p(1, 5) + &LaurentScalar::int(-1);
        let prod = &a * &b;
        assert_eq!(prod.div_exact(&b), Some(a.clone()));
        assert_eq!(prod.div_exact(&a), Some(b.clone()));
        assert_eq!(a.div_exact(&b), None);
        assert_eq!(
            LaurentScalar::int(6).div_exact(&LaurentScalar::int(4)),
            Some(LaurentScalar::constant(qf(3, 2)))
        );
    }

    #[test]
    fn family_dropped_for_constants() {
        let a = LaurentScalar::in_family(&fam(), 0, q(4));
        assert_eq!(a.family(), None);
        assert_eq!(a.as_rational(), Some(q(4)));
    }

    #[test]
    fn refine_and_realize() {
        let f = Family::new("P2");
        let r = refine_family(&f, &[3].into_iter().collect());
        assert!(r.excluded.contains(&3));
        assert_eq!(refine_family(&f, &BTreeSet::new()), f);

        let reg = Registry::new(&[5], &["P2", "P3"]).unwrap();
        let mut real = Realization::new(&reg);
        assert_eq!(real.realize("P2", &[11, 13]).unwrap(), [11, 13].into_iter().collect());
        assert_eq!(real.realize("P3", &[17]).unwrap(), [17].into_iter().collect());
        assert!(real.realize("P2", &[5]).is_err());
        assert!(real.realize("P3", &[11]).is_err());
        let rr = real.realized_registry(&[]).unwrap();
        assert_eq!(rr.explicit_primes(), [5, 11, 13, 17].into_iter().collect());
        assert_eq!(rr.families().count(), 0);
    }

    #[test]
    fn registry_validation() {
        assert!(Registry::new(&[4], &[]).is_err());
        assert!(Registry::new(&[2, 2], &[]).is_err());
        assert!(Registry::new(&[], &["A", "A"]).is_err());
        let reg = Registry::new(&[2], &["A"]).unwrap();
        assert_eq!(reg.parse_key("2").unwrap(), ClassKey::Explicit(2));
        assert_eq!(reg.parse_key("rest").unwrap(), ClassKey::Rest);
        assert!(reg.parse_key("3").is_err());
        assert_eq!(reg.class_of_prime(7), ClassKey::Rest);
    }
}
