//! Gcd certificates, bad-prime bounds and residue progressions that avoid
//! the zeros of a family of univariate polynomials.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::univariate::UPoly;
use super::MultiPoly;
use crate::arith::{denominator_lcm, primes::primes_up_to, prime_support, FactorBudget, PrimeSet, Rat};
use crate::error::{Error, Result};

/// The single variable a univariate family lives in (0 when all constant).
pub fn common_variable(ps: &[MultiPoly]) -> Result<usize> {
    let mut used: Vec<usize> = ps.iter().flat_map(|p| p.vars_used()).collect();
    used.sort_unstable();
    used.dedup();
    match used.len() {
        0 => Ok(0),
        1 => Ok(used[0]),
        _ => Err(Error::invalid("expected univariate polynomials in a common variable")),
    }
}

/// `sum_j Q_j P_j = m` with `m > 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GcdCertificate {
    pub var: usize,
    pub cofactors: Vec<MultiPoly>,
    pub m: BigInt,
}

impl GcdCertificate {
    /// Re-expand the identity.
    pub fn verify(&self, ps: &[MultiPoly]) -> bool {
        if ps.len() != self.cofactors.len() || !self.m.is_positive() {
            return false;
        }
        let Some(first) = ps.first() else { return false };
        let mut acc = MultiPoly::zero(first.nvars());
        for (q, p) in self.cofactors.iter().zip(ps) {
            acc = acc.add(&q.mul(p));
        }
        acc == MultiPoly::constant(first.nvars(), Rat::from_integer(self.m.clone()))
    }
}

pub fn gcd_certificate(ps: &[MultiPoly]) -> Result<GcdCertificate> {
    let Some(first) = ps.first() else {
        return Err(Error::invalid("empty polynomial family"));
    };
    let nvars = first.nvars();
    let var = common_variable(ps)?;
    let us: Vec<UPoly> = ps.iter().map(|p| UPoly::from_multi(p, var)).collect::<Result<_>>()?;

    let mut g = us[0].clone();
    let mut cof = vec![UPoly::constant(Rat::one())];
    for u in &us[1..] {
        let (h, s, t) = UPoly::xgcd(&g, u);
        cof = cof.iter().map(|c| c.mul(&s)).collect();
        cof.push(t);
        g = h;
    }
    if g.is_zero() || g.degree() != Some(0) {
        let common = if g.is_zero() { "0".to_string() } else { g.to_multi(nvars, var).to_string() };
        return Err(Error::NotCoprime { common });
    }
    // g is a nonzero constant; make it 1
    let inv = g.lead().recip();
    let cof: Vec<UPoly> = cof.iter().map(|c| c.scale(&inv)).collect();

    let mut l = denominator_lcm(cof.iter().flat_map(|c| c.0.iter()));
    let mut ints: Vec<Vec<BigInt>> = cof
        .iter()
        .map(|c| c.0.iter().map(|x| (x * Rat::from_integer(l.clone())).to_integer()).collect())
        .collect();
    let content = ints.iter().flatten().fold(l.clone(), |acc, x| acc.gcd(x));
    if !content.is_one() {
        l /= &content;
        for row in ints.iter_mut() {
            for x in row.iter_mut() {
                *x /= &content;
            }
        }
    }
    let cofactors = ints
        .into_iter()
        .map(|row| UPoly::new(row.into_iter().map(Rat::from_integer).collect()).to_multi(nvars, var))
        .collect();
    let cert = GcdCertificate { var, cofactors, m: l };
    debug_assert!(cert.verify(ps));
    Ok(cert)
}

/// Primes dividing every integer value of a polynomial, with where they come
/// from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BadPrimeBound {
    /// Exactly the primes of `gcd_{n in Z} P(n)`.
    pub primes: PrimeSet,
    /// Primes at most `deg P`.
    pub degree_window: PrimeSet,
    /// Primes of the gcd of the coefficients.
    pub content: PrimeSet,
    /// `gcd(P(0), ..., P(deg P))`.
    pub value_gcd: String,
}

fn eval_at(p: &MultiPoly, n: &BigInt) -> Result<Rat> {
    p.eval(&vec![Rat::from_integer(n.clone()); p.nvars()])
}

pub fn bad_prime_bound(p: &MultiPoly) -> Result<BadPrimeBound> {
    if p.is_zero() {
        return Err(Error::invalid("bad-prime bound of the zero polynomial"));
    }
    if !p.is_integral() {
        return Err(Error::invalid("bad-prime bound needs integer coefficients"));
    }
    common_variable(std::slice::from_ref(p))?;
    let deg = p.total_degree();
    let budget = FactorBudget::default();
    let mut g = BigInt::zero();
    for n in 0..=deg {
        g = g.gcd(&eval_at(p, &BigInt::from(n))?.to_integer());
    }
    let support = |n: &BigInt| -> Result<PrimeSet> {
        let (s, large) = prime_support(n, &budget)?;
        if !large.is_empty() {
            return Err(Error::invalid("prime beyond 64 bits in a bad-prime set"));
        }
        Ok(s)
    };
    Ok(BadPrimeBound {
        primes: support(&g)?,
        degree_window: PrimeSet::new(primes_up_to(deg as u64))?,
        content: support(&p.integer_content())?,
        value_gcd: g.to_string(),
    })
}

/// `n = a j + b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Progression {
    pub a: BigInt,
    pub b: BigInt,
    /// Primes of `M` that the progression avoids (those dividing `a`).
    pub avoided: Vec<BigInt>,
    /// Union of the bad-prime sets; primes of `M` here are left alone.
    pub exempt: PrimeSet,
}

/// Progression `a j + b` along which every `P_i` is coprime to `M` away from
/// the bad primes of the family.
pub fn progression_avoiding(m: &BigInt, ps: &[MultiPoly]) -> Result<Progression> {
    let mut exempt = PrimeSet::empty();
    for p in ps {
        exempt = exempt.union(&bad_prime_bound(p)?.primes);
    }
    let mut a = BigInt::one();
    let mut b = BigInt::zero();
    let mut avoided = Vec::new();
    if m.is_zero() {
        return Err(Error::invalid("modulus must be nonzero"));
    }
    if m.abs().is_one() {
        return Ok(Progression { a, b, avoided, exempt });
    }
    let (small, large) = prime_support(m, &FactorBudget::default())?;
    let primes: Vec<BigInt> = small
        .iter()
        .filter(|&q| !exempt.contains(q))
        .map(BigInt::from)
        .chain(large.into_iter().map(BigInt::from))
        .collect();
    for q in primes {
        let r = avoiding_residue(&q, ps)?;
        // CRT: b' = b mod a, b' = r mod q
        let ext = a.extended_gcd(&q);
        let t = ((&r - &b) * ext.x).mod_floor(&q);
        b += &a * t;
        a *= &q;
        b = b.mod_floor(&a);
        avoided.push(q);
    }
    Ok(Progression { a, b, avoided, exempt })
}

fn avoiding_residue(q: &BigInt, ps: &[MultiPoly]) -> Result<BigInt> {
    let mut r = BigInt::zero();
    while &r < q {
        let mut ok = true;
        for p in ps {
            let v = eval_at(p, &r)?;
            if (v.denom() % q).is_zero() {
                return Err(Error::MisScopedModulus { modulus: q.to_string() });
            }
            if (v.numer() % q).is_zero() {
                ok = false;
                break;
            }
        }
        if ok {
            return Ok(r);
        }
        r += 1;
    }
    Err(Error::ResidueSearch { prime: q.to_u64().unwrap_or(u64::MAX) })
}
