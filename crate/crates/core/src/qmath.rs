//! Exact rational helpers: valuations, factorisation of small integers,
//! parsing and printing.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qpow(p: u64, e: i64) -> Q {
    let base = Q::from_integer(BigInt::from(p));
    if e >= 0 {
        num_traits::pow(base, e as usize)
    } else {
        num_traits::pow(base, (-e) as usize).recip()
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Exponent of `p` in a nonzero integer.
pub fn int_valuation(n: &BigInt, p: u64) -> i64 {
    debug_assert!(!n.is_zero());
    let p = BigInt::from(p);
    let mut n = n.abs();
    let mut v = 0;
    loop {
        let (quo, rem) = n.div_rem(&p);
        if !rem.is_zero() {
            return v;
        }
        n = quo;
        v += 1;
    }
}

/// Exponent of `p` in the factorisation of a nonzero rational.
pub fn valuation(x: &Q, p: u64) -> Result<i64> {
    if x.is_zero() {
        return Err(Error::InfiniteValuation);
    }
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    Ok(int_valuation(x.numer(), p) - int_valuation(x.denom(), p))
}

/// `valuation` for callers that have already excluded zero and checked `p`.
pub fn val(x: &Q, p: u64) -> i64 {
    int_valuation(x.numer(), p) - int_valuation(x.denom(), p)
}

/// Membership in the local ring `Z_(p)`.
pub fn is_local_integral(x: &Q, p: u64) -> bool {
    x.is_zero() || val(x, p) >= 0
}

/// Prime divisors of a nonzero integer by trial division.
pub fn prime_factors(n: &BigInt) -> BTreeSet<u64> {
    let mut out = BTreeSet::new();
    let mut n = n.abs();
    if n.is_zero() {
        return out;
    }
    let mut d = 2u64;
    loop {
        let bd = BigInt::from(d);
        if &bd * &bd > n {
            break;
        }
        if (&n % &bd).is_zero() {
            out.insert(d);
            while (&n % &bd).is_zero() {
                n /= &bd;
            }
        }
        d += 1;
    }
    if n > BigInt::one() {
        if let Some(v) = n.to_u64() {
            out.insert(v);
        }
    }
    out
}

/// Primes dividing the numerator or the denominator.
pub fn support(x: &Q) -> BTreeSet<u64> {
    if x.is_zero() {
        return BTreeSet::new();
    }
    let mut s = prime_factors(x.numer());
    s.extend(prime_factors(x.denom()));
    s
}

/// Integer residue `r` with `x ≡ r (mod m)`, for `x` whose denominator is prime to `m`.
pub fn residue(x: &Q, m: &BigInt) -> BigInt {
    let d = x.denom().mod_floor(m);
    let inv = mod_inverse(&d, m).expect("denominator must be invertible modulo m");
    (x.numer() * inv).mod_floor(m)
}

pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(m))
    } else {
        None
    }
}

pub fn parse_rational(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Parse(format!("bad rational `{s}`"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Q::new(n, d))
        }
        None => Ok(Q::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

pub fn fmt_rational(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn lcm_denoms<'a>(xs: impl IntoIterator<Item = &'a Q>) -> BigInt {
    xs.into_iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn valuations() {
        assert_eq!(valuation(&q(50), 5).unwrap(), 2);
        assert_eq!(valuation(&qf(3, 8), 2).unwrap(), -3);
        assert_eq!(valuation(&q(1), 7).unwrap(), 0);
        assert_eq!(valuation(&q(0), 7), Err(Error::InfiniteValuation));
        assert_eq!(valuation(&q(3), 4), Err(Error::NotPrime(4)));
    }

    #[test]
    fn factors_and_residues() {
        let f: Vec<u64> = prime_factors(&BigInt::from(360)).into_iter().collect();
        assert_eq!(f, vec![2, 3, 5]);
        assert_eq!(residue(&qf(1, 2), &BigInt::from(5)), BigInt::from(3));
        assert_eq!(parse_rational(" -6/4 ").unwrap(), qf(-3, 2));
        assert_eq!(fmt_rational(&qf(-3, 2)), "-3/2");
    }
}
