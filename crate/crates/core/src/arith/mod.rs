//! Exact integers, rationals, S-integers and p-adic valuations.

mod factor;
pub mod primes;

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

pub use factor::{certify_prime, factorize, FactorBudget, Factorization};
pub use primes::{is_prime, is_prime_u64, primes_in, primes_up_to};

use crate::error::{Error, Result};

pub type Int = BigInt;
pub type Rat = BigRational;

/// Parse an exact rational literal such as `"-3/4"` or `"12"`.
pub fn parse_rat(text: &str) -> Result<Rat> {
    let t = text.trim();
    let bad = || Error::invalid(format!("not a rational literal: {text:?}"));
    match t.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::invalid(format!("zero denominator in {text:?}")));
            }
            Ok(Rat::new(n, d))
        }
        None => Ok(Rat::from_integer(t.parse().map_err(|_| bad())?)),
    }
}

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(n.into(), d.into())
}

pub fn rint(n: i64) -> Rat {
    Rat::from_integer(n.into())
}

/// A strictly increasing set of primes.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrimeSet(Vec<u64>);

impl PrimeSet {
    pub fn empty() -> Self {
        PrimeSet(Vec::new())
    }

    /// Build from arbitrary input; rejects non-primes, sorts and dedups.
    pub fn new(primes: impl IntoIterator<Item = u64>) -> Result<Self> {
        let mut v: Vec<u64> = primes.into_iter().collect();
        if let Some(&bad) = v.iter().find(|&&p| !is_prime_u64(p)) {
            return Err(Error::invalid(format!("{bad} is not prime")));
        }
        v.sort_unstable();
        v.dedup();
        Ok(PrimeSet(v))
    }

    pub(crate) fn from_sorted_unchecked(v: Vec<u64>) -> Self {
        debug_assert!(v.windows(2).all(|w| w[0] < w[1]));
        PrimeSet(v)
    }

    pub fn contains(&self, p: u64) -> bool {
        self.0.binary_search(&p).is_ok()
    }

    pub fn contains_big(&self, p: &BigUint) -> bool {
        p.to_u64().is_some_and(|q| self.contains(q))
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max(&self) -> Option<u64> {
        self.0.last().copied()
    }

    pub fn union(&self, other: &PrimeSet) -> PrimeSet {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        v.sort_unstable();
        v.dedup();
        PrimeSet(v)
    }

    pub fn insert(&mut self, p: u64) {
        if let Err(i) = self.0.binary_search(&p) {
            self.0.insert(i, p);
        }
    }

    pub fn is_subset(&self, other: &PrimeSet) -> bool {
        self.0.iter().all(|&p| other.contains(p))
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.0.iter().copied()
    }
}

impl fmt::Display for PrimeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "}}")
    }
}

impl Serialize for PrimeSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

/// Exponent of `p` in a nonzero integer.
pub fn valuation_int(n: &BigInt, p: u64) -> u32 {
    debug_assert!(!n.is_zero());
    let mut m = n.magnitude().clone();
    let mut v = 0;
    loop {
        let (q, r) = m.div_rem(&BigUint::from(p));
        if !r.is_zero() {
            return v;
        }
        m = q;
        v += 1;
    }
}

/// `v` with `q = p^v * (unit at p)`.
pub fn padic_valuation(q: &Rat, p: u64) -> Result<i64> {
    if q.is_zero() {
        return Err(Error::invalid("valuation of zero"));
    }
    Ok(valuation_int(q.numer(), p) as i64 - valuation_int(q.denom(), p) as i64)
}

/// `|q|_p = p^{-v_p(q)}` as an exact rational (0 for q = 0).
pub fn padic_abs(q: &Rat, p: u64) -> Rat {
    if q.is_zero() {
        return Rat::zero();
    }
    let v = padic_valuation(q, p).expect("nonzero");
    let base = Rat::from_integer(BigInt::from(p));
    if v >= 0 {
        base.pow(-(v as i32))
    } else {
        base.pow((-v) as i32)
    }
}

/// Remove every prime of `s` from `n`.
pub fn strip_primes(n: &BigUint, s: &PrimeSet) -> BigUint {
    let mut m = n.clone();
    for p in s.iter() {
        let pb = BigUint::from(p);
        loop {
            let (q, r) = m.div_rem(&pb);
            if !r.is_zero() || m.is_zero() {
                break;
            }
            m = q;
        }
    }
    m
}

/// The positive integer `prod_{p not in S} |q|_p^{-1}`.
///
/// Fails when the denominator carries a prime outside `S`.
pub fn s_integer_part(q: &Rat, s: &PrimeSet) -> Result<BigInt> {
    if q.is_zero() {
        return Err(Error::invalid("S-integer part of zero"));
    }
    let den_rest = strip_primes(q.denom().magnitude(), s);
    if !den_rest.is_one() {
        return Err(Error::NotSInteger {
            prime: den_rest.to_string(),
        });
    }
    Ok(BigInt::from(strip_primes(q.numer().magnitude(), s)))
}

/// True iff every prime of numerator and denominator lies in `S`.
pub fn is_unit_in_zs(q: &Rat, s: &PrimeSet) -> Result<bool> {
    if q.is_zero() {
        return Err(Error::invalid("zero is not a unit"));
    }
    Ok(strip_primes(q.numer().magnitude(), s).is_one()
        && strip_primes(q.denom().magnitude(), s).is_one())
}

/// Outcome of counting prime factors when factoring may run out of budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Omega {
    Exact(u32),
    Unknown,
}

impl Omega {
    pub fn exact(self) -> Option<u32> {
        match self {
            Omega::Exact(v) => Some(v),
            Omega::Unknown => None,
        }
    }
}

/// Number of prime divisors of `n` outside `s`.
pub fn omega_outside(
    n: &BigInt,
    s: &PrimeSet,
    with_multiplicity: bool,
    budget: &FactorBudget,
) -> Result<Omega> {
    let f = factorize(n, budget)?;
    Ok(match f.omega_outside(s, with_multiplicity) {
        Some(v) => Omega::Exact(v),
        None => Omega::Unknown,
    })
}

/// Primes of `n` (must factor completely) as a [`PrimeSet`]; primes that do
/// not fit in a machine word are returned separately.
pub fn prime_support(n: &BigInt, budget: &FactorBudget) -> Result<(PrimeSet, Vec<BigUint>)> {
    let f = factorize(n, budget)?;
    if !f.complete {
        return Err(Error::resource(
            "factorization",
            format!("could not factor {n} within budget"),
        ));
    }
    let mut small = Vec::new();
    let mut large = Vec::new();
    for p in f.factors.keys() {
        match p.to_u64() {
            Some(v) => small.push(v),
            None => large.push(p.clone()),
        }
    }
    Ok((PrimeSet::from_sorted_unchecked(small), large))
}

/// Least common multiple of the denominators of a list of rationals.
pub fn denominator_lcm<'a>(qs: impl IntoIterator<Item = &'a Rat>) -> BigInt {
    qs.into_iter()
        .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
}

/// `|q|` for the archimedean place.
pub fn abs_rat(q: &Rat) -> Rat {
    q.abs()
}

/// Serialize a rational as the string `"n/d"` (or `"n"`).
pub fn serialize_rat<S: serde::Serializer>(q: &Rat, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&q.to_string())
}

pub fn serialize_opt_rat<S: serde::Serializer>(q: &Option<Rat>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match q {
        Some(q) => s.serialize_some(&q.to_string()),
        None => s.serialize_none(),
    }
}
