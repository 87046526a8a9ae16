//! Height sequences over a registry, their arithmetic, and types.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::primesym::{ClassKey, Registry};
use crate::qmath;

/// A height: a non-negative integer or `∞`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum HeightValue {
    Finite(u64),
    Inf,
}

impl HeightValue {
    pub const ZERO: HeightValue = HeightValue::Finite(0);

    pub fn is_inf(self) -> bool {
        self == HeightValue::Inf
    }

    pub fn finite(self) -> Option<u64> {
        match self {
            HeightValue::Finite(n) => Some(n),
            HeightValue::Inf => None,
        }
    }

    pub fn plus(self, n: u64) -> HeightValue {
        match self {
            HeightValue::Finite(m) => HeightValue::Finite(m + n),
            HeightValue::Inf => HeightValue::Inf,
        }
    }

    pub fn parse(s: &str) -> Result<HeightValue> {
        match s.trim() {
            "inf" | "∞" => Ok(HeightValue::Inf),
            t => t
                .parse()
                .map(HeightValue::Finite)
                .map_err(|_| Error::Parse(format!("bad height `{t}`"))),
        }
    }
}

impl fmt::Display for HeightValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HeightValue::Finite(n) => write!(f, "{n}"),
            HeightValue::Inf => write!(f, "inf"),
        }
    }
}

/// A height sequence. Every registry class has a default; a concrete prime
/// outside the registry's explicit primes may override the `Rest` default.
#[derive(Clone)]
pub struct Characteristic {
    registry: Arc<Registry>,
    defaults: BTreeMap<ClassKey, HeightValue>,
    overrides: BTreeMap<u64, HeightValue>,
}

impl PartialEq for Characteristic {
    fn eq(&self, o: &Self) -> bool {
        same_registry(&self.registry, &o.registry) && self.defaults == o.defaults && self.overrides == o.overrides
    }
}

impl Eq for Characteristic {}

impl fmt::Debug for Characteristic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Characteristic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .defaults
            .iter()
            .map(|(k, v)| format!("{k}: {v}"))
            .chain(self.overrides.iter().map(|(p, v)| format!("{p}: {v}")))
            .collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

pub(crate) fn same_registry(a: &Arc<Registry>, b: &Arc<Registry>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl Characteristic {
    /// The characteristic that is `value` everywhere.
    pub fn constant(registry: &Arc<Registry>, value: HeightValue) -> Self {
        Characteristic {
            registry: registry.clone(),
            defaults: registry.keys().map(|k| (k, value)).collect(),
            overrides: BTreeMap::new(),
        }
    }

    pub fn zero(registry: &Arc<Registry>) -> Self {
        Self::constant(registry, HeightValue::ZERO)
    }

    /// Builds from per-class values (missing classes take `fill`) and
    /// per-prime values.
    pub fn from_parts(
        registry: &Arc<Registry>,
        fill: HeightValue,
        classes: &BTreeMap<ClassKey, HeightValue>,
        primes: &BTreeMap<u64, HeightValue>,
    ) -> Result<Self> {
        let mut c = Self::constant(registry, fill);
        for (k, v) in classes {
            if !registry.has_class(k) {
                return Err(Error::UnknownClass(k.to_string()));
            }
            c.defaults.insert(k.clone(), *v);
        }
        for (&p, &v) in primes {
            c.set_prime(p, v)?;
        }
        Ok(c)
    }

    pub fn registry(&self) -> &Arc<Registry> {
        &self.registry
    }

    pub fn at_class(&self, key: &ClassKey) -> HeightValue {
        self.defaults.get(key).copied().unwrap_or(HeightValue::ZERO)
    }

    /// Height at a concrete prime.
    pub fn at_prime(&self, p: u64) -> HeightValue {
        match self.overrides.get(&p) {
            Some(v) => *v,
            None => self.at_class(&self.registry.class_of_prime(p)),
        }
    }

    pub fn set_class(&mut self, key: &ClassKey, v: HeightValue) -> Result<()> {
        if !self.registry.has_class(key) {
            return Err(Error::UnknownClass(key.to_string()));
        }
        self.defaults.insert(key.clone(), v);
        if *key == ClassKey::Rest {
            self.overrides.retain(|_, w| *w != v);
        }
        Ok(())
    }

    pub fn set_prime(&mut self, p: u64, v: HeightValue) -> Result<()> {
        if !qmath::is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        match self.registry.class_of_prime(p) {
            ClassKey::Rest => {
                if v == self.at_class(&ClassKey::Rest) {
                    self.overrides.remove(&p);
                } else {
                    self.overrides.insert(p, v);
                }
            }
            k => {
                self.defaults.insert(k, v);
            }
        }
        Ok(())
    }

    pub fn defaults(&self) -> &BTreeMap<ClassKey, HeightValue> {
        &self.defaults
    }

    pub fn overrides(&self) -> &BTreeMap<u64, HeightValue> {
        &self.overrides
    }

    /// Concrete primes at which the value may differ from the `Rest` default.
    fn special_primes<'a>(&'a self, other: &'a Self) -> BTreeSet<u64> {
        let mut s = self.registry.explicit_primes();
        s.extend(self.overrides.keys());
        s.extend(other.overrides.keys());
        s
    }

    fn check(&self, o: &Self) -> Result<()> {
        if same_registry(&self.registry, &o.registry) {
            Ok(())
        } else {
            Err(Error::RegistryMismatch)
        }
    }

    pub fn is_zero(&self) -> bool {
        self.defaults.values().all(|v| *v == HeightValue::ZERO) && self.overrides.is_empty()
    }

    pub fn is_all_inf(&self) -> bool {
        self.defaults.values().all(|v| v.is_inf()) && self.overrides.is_empty()
    }
}

/// Pointwise order.
pub fn chi_le(a: &Characteristic, b: &Characteristic) -> Result<bool> {
    a.check(b)?;
    let classes_ok = a.defaults.iter().all(|(k, v)| *v <= b.at_class(k));
    Ok(classes_ok && a.special_primes(b).into_iter().all(|p| a.at_prime(p) <= b.at_prime(p)))
}

/// Pointwise minimum.
pub fn meet(a: &Characteristic, b: &Characteristic) -> Result<Characteristic> {
    a.check(b)?;
    let mut out = a.clone();
    for (k, v) in out.defaults.iter_mut() {
        *v = (*v).min(b.at_class(k));
    }
    out.overrides.clear();
    for p in a.special_primes(b) {
        out.set_prime(p, a.at_prime(p).min(b.at_prime(p)))?;
    }
    Ok(out)
}

/// `nχ`: adds the valuation of `n` at each prime dividing it.
pub fn scale(n: &BigInt, chi: &Characteristic) -> Result<Characteristic> {
    if n.is_zero() {
        return Err(Error::Zero("scale factor"));
    }
    let mut out = chi.clone();
    for p in qmath::prime_factors(n) {
        let v = qmath::int_valuation(n, p) as u64;
        out.set_prime(p, chi.at_prime(p).plus(v))?;
    }
    Ok(out)
}

pub fn scale_i(n: i64, chi: &Characteristic) -> Result<Characteristic> {
    scale(&BigInt::from(n), chi)
}

/// Equivalence class of characteristics, stored in canonical form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeRep {
    canonical: Characteristic,
}

impl fmt::Display for TypeRep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.canonical)
    }
}

impl TypeRep {
    pub fn canonical(&self) -> &Characteristic {
        &self.canonical
    }
}

/// Zeroes every finite value at a concrete prime; infinite-class defaults
/// and `∞` entries are kept.
pub fn canonicalize(chi: &Characteristic) -> Characteristic {
    let mut out = chi.clone();
    for (k, v) in out.defaults.iter_mut() {
        if matches!(k, ClassKey::Explicit(_)) && !v.is_inf() {
            *v = HeightValue::ZERO;
        }
    }
    let rest = out.at_class(&ClassKey::Rest);
    out.overrides = chi
        .overrides
        .iter()
        .filter_map(|(&p, &v)| match (v.is_inf(), rest.is_inf()) {
            (false, false) | (true, true) => None,
            (false, true) => Some((p, HeightValue::ZERO)),
            (true, false) => Some((p, HeightValue::Inf)),
        })
        .collect();
    out
}

pub fn type_of(chi: &Characteristic) -> TypeRep {
    TypeRep {
        canonical: canonicalize(chi),
    }
}

pub fn equivalent(a: &Characteristic, b: &Characteristic) -> Result<bool> {
    a.check(b)?;
    Ok(canonicalize(a) == canonicalize(b))
}

/// `τ ≤ σ`: generic defaults compare pointwise, and no concrete prime has
/// `∞` in `τ` but a finite value in `σ`.
pub fn type_le(t: &TypeRep, s: &TypeRep) -> Result<bool> {
    let (a, b) = (&t.canonical, &s.canonical);
    a.check(b)?;
    let generic_ok = a.defaults.iter().filter(|(k, _)| k.is_generic()).all(|(k, v)| *v <= b.at_class(k));
    let concrete_ok = a
        .special_primes(b)
        .into_iter()
        .all(|p| !(a.at_prime(p).is_inf() && !b.at_prime(p).is_inf()));
    Ok(generic_ok && concrete_ok)
}

pub fn incomparable(t: &TypeRep, s: &TypeRep) -> Result<bool> {
    Ok(!type_le(t, s)? && !type_le(s, t)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reg() -> Arc<Registry> {
        Arc::new(Registry::new(&[2, 3, 5], &["P1", "P2"]).unwrap())
    }

    fn chi(r: &Arc<Registry>, classes: &[(&str, HeightValue)], primes: &[(u64, HeightValue)]) -> Characteristic {
        let c = classes.iter().map(|(k, v)| (r.parse_key(k).unwrap(), *v)).collect();
        let p = primes.iter().copied().collect();
        Characteristic::from_parts(r, HeightValue::ZERO, &c, &p).unwrap()
    }

    use HeightValue::{Finite as F, Inf};

    #[test]
    fn order_and_meet() {
        let r = reg();
        let a = chi(&r, &[("P1", F(1))], &[]);
        let b = chi(&r, &[("P2", F(1))], &[]);
        assert!(!chi_le(&a, &b).unwrap() && !chi_le(&b, &a).unwrap());
        assert!(meet(&a, &b).unwrap().is_zero());
        assert!(chi_le(&Characteristic::zero(&r), &a).unwrap());
        assert_eq!(meet(&a, &a).unwrap(), a);
    }

    #[test]
    fn scaling() {
        let r = reg();
        let c = chi(&r, &[("2", F(1))], &[]);
        let s = scale_i(12, &c).unwrap();
        assert_eq!(s.at_prime(2), F(3));
        assert_eq!(s.at_prime(3), F(1));
        assert_eq!(scale_i(1, &c).unwrap(), c);
        let c = chi(&r, &[("5", Inf)], &[]);
        assert_eq!(scale_i(5, &c).unwrap().at_prime(5), Inf);
        // a rest prime picks up an override
        let s = scale_i(49, &Characteristic::zero(&r)).unwrap();
        assert_eq!(s.at_prime(7), F(2));
        assert!(equivalent(&s, &Characteristic::zero(&r)).unwrap());
        assert!(scale_i(0, &c).is_err());
    }

    #[test]
    fn types() {
        let r = reg();
        let a = chi(&r, &[("P1", F(1))], &[]);
        let b = chi(&r, &[], &[]);
        assert!(!equivalent(&a, &b).unwrap());
        assert!(equivalent(&chi(&r, &[("5", F(3))], &[]), &b).unwrap());
        let (ta, tb) = (type_of(&a), type_of(&b));
        assert!(type_le(&tb, &ta).unwrap() && !type_le(&ta, &tb).unwrap());
        let d = chi(&r, &[("2", Inf)], &[]);
        assert!(!type_le(&type_of(&d), &tb).unwrap());
        assert!(type_le(&tb, &type_of(&d)).unwrap());
        let x = chi(&r, &[("P2", F(1))], &[]);
        assert!(incomparable(&ta, &type_of(&x)).unwrap());
    }

    #[test]
    fn rest_overrides() {
        let r = reg();
        let mut c = chi(&r, &[("rest", F(1))], &[]);
        c.set_prime(7, F(0)).unwrap();
        assert_eq!(c.at_prime(7), F(0));
        assert_eq!(c.at_prime(11), F(1));
        assert!(equivalent(&c, &chi(&r, &[("rest", F(1))], &[])).unwrap());
        let z = Characteristic::zero(&r);
        assert!(chi_le(&z, &c).unwrap());
        assert!(!chi_le(&c, &z).unwrap());
    }
}
