//! Budgeted integer factorization: trial division, then Brent's variant of
//! Pollard rho, with every reported prime certified by [`is_prime_biguint`].

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::primes::{is_prime_biguint, is_prime_u64, mul_mod, small_primes};
use super::PrimeSet;
use crate::error::{Error, Result};

/// Effort bound for [`factorize`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FactorBudget {
    /// Trial division by all primes up to this bound.
    pub trial_bound: u64,
    /// Total Pollard rho iterations allowed across all splits.
    pub rho_iterations: u64,
}

impl Default for FactorBudget {
    fn default() -> Self {
        FactorBudget {
            trial_bound: 1 << 16,
            rho_iterations: 20_000_000,
        }
    }
}

/// `value = sign * prod p^e * cofactor`; complete iff `cofactor == 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub sign: Sign,
    pub factors: BTreeMap<BigUint, u32>,
    pub cofactor: BigUint,
    pub complete: bool,
}

impl Factorization {
    pub fn value(&self) -> BigInt {
        let mut acc = self.cofactor.clone();
        for (p, &e) in &self.factors {
            acc *= p.pow(e);
        }
        BigInt::from_biguint(self.sign, acc)
    }

    /// Prime factors not in `s`; `None` when the factorization is incomplete.
    pub fn omega_outside(&self, s: &PrimeSet, with_multiplicity: bool) -> Option<u32> {
        if !self.complete {
            return None;
        }
        Some(
            self.factors
                .iter()
                .filter(|(p, _)| !p.to_u64().is_some_and(|q| s.contains(q)))
                .map(|(_, &e)| if with_multiplicity { e } else { 1 })
                .sum(),
        )
    }

    /// Total number of prime factors with multiplicity (complete only).
    pub fn big_omega(&self) -> Option<u32> {
        self.complete.then(|| self.factors.values().sum())
    }

    pub fn primes(&self) -> impl Iterator<Item = &BigUint> {
        self.factors.keys()
    }
}

/// Factor a nonzero integer within `budget`.
pub fn factorize(n: &BigInt, budget: &FactorBudget) -> Result<Factorization> {
    if n.is_zero() {
        return Err(Error::invalid("cannot factor zero"));
    }
    let sign = if n.is_negative() { Sign::Minus } else { Sign::Plus };
    let mut rest = n.magnitude().clone();
    let mut factors: BTreeMap<BigUint, u32> = BTreeMap::new();

    for &p in small_primes() {
        if p > budget.trial_bound {
            break;
        }
        if rest.is_one() {
            break;
        }
        let pb = BigUint::from(p);
        if &pb * &pb > rest {
            break;
        }
        let mut e = 0;
        loop {
            let (q, r) = rest.div_rem(&pb);
            if !r.is_zero() {
                break;
            }
            rest = q;
            e += 1;
        }
        if e > 0 {
            *factors.entry(pb).or_insert(0) += e;
        }
    }

    let mut iterations_left = budget.rho_iterations;
    let mut cofactor = BigUint::one();
    let mut stack = vec![rest];
    while let Some(m) = stack.pop() {
        if m.is_one() {
            continue;
        }
        if is_prime_biguint(&m) {
            *factors.entry(m).or_insert(0) += 1;
            continue;
        }
        if let Some((root, k)) = perfect_power(&m) {
            for _ in 0..k {
                stack.push(root.clone());
            }
            continue;
        }
        match split(&m, &mut iterations_left) {
            Some(d) => {
                let other = &m / &d;
                stack.push(d);
                stack.push(other);
            }
            None => cofactor *= m,
        }
    }
    let complete = cofactor.is_one();
    Ok(Factorization {
        sign,
        factors,
        cofactor,
        complete,
    })
}

/// Smallest-root perfect power decomposition for exponents 2..=5.
fn perfect_power(m: &BigUint) -> Option<(BigUint, u32)> {
    for k in [2u32, 3, 5] {
        let r = m.nth_root(k);
        if r.pow(k) == *m {
            return Some((r, k));
        }
    }
    None
}

fn split(m: &BigUint, iterations_left: &mut u64) -> Option<BigUint> {
    if m.is_even() {
        return Some(BigUint::from(2u32));
    }
    for c in 1u64..=8 {
        if *iterations_left == 0 {
            return None;
        }
        let found = if let Some(small) = m.to_u64() {
            rho_u64(small, c, iterations_left).map(BigUint::from)
        } else {
            rho_big(m, c, iterations_left)
        };
        if let Some(d) = found {
            return Some(d);
        }
    }
    None
}

const BATCH: u64 = 128;

fn rho_u64(n: u64, c: u64, iterations_left: &mut u64) -> Option<u64> {
    let f = |x: u64| (mul_mod(x, x, n) + c) % n;
    let mut y = 2u64;
    let mut r = 1u64;
    let mut q = 1u64;
    let mut x;
    let mut ys;
    loop {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        let mut k = 0;
        while k < r {
            ys = y;
            let steps = BATCH.min(r - k);
            for _ in 0..steps {
                y = f(y);
                q = mul_mod(q, x.abs_diff(y), n);
            }
            *iterations_left = iterations_left.saturating_sub(steps);
            let g = q.gcd(&n);
            if g != 1 {
                if g != n {
                    return Some(g);
                }
                // backtrack one step at a time
                let mut z = ys;
                loop {
                    z = f(z);
                    let g = x.abs_diff(z).gcd(&n);
                    if g != 1 {
                        return (g != n).then_some(g);
                    }
                }
            }
            if *iterations_left == 0 {
                return None;
            }
            k += steps;
        }
        r *= 2;
    }
}

fn rho_big(n: &BigUint, c: u64, iterations_left: &mut u64) -> Option<BigUint> {
    let c = BigUint::from(c);
    let f = |x: &BigUint| (x * x + &c) % n;
    let diff = |a: &BigUint, b: &BigUint| if a > b { a - b } else { b - a };
    let mut y = BigUint::from(2u32);
    let mut r = 1u64;
    let mut q = BigUint::one();
    loop {
        let x = y.clone();
        for _ in 0..r {
            y = f(&y);
        }
        let mut k = 0;
        while k < r {
            let ys = y.clone();
            let steps = BATCH.min(r - k);
            for _ in 0..steps {
                y = f(&y);
                q = (q * diff(&x, &y)) % n;
            }
            *iterations_left = iterations_left.saturating_sub(steps);
            let g = q.gcd(n);
            if !g.is_one() {
                if &g != n {
                    return Some(g);
                }
                let mut z = ys;
                loop {
                    z = f(&z);
                    let g = diff(&x, &z).gcd(n);
                    if !g.is_one() {
                        return (&g != n).then_some(g);
                    }
                }
            }
            if *iterations_left == 0 {
                return None;
            }
            k += steps;
        }
        r *= 2;
    }
}

/// Primality check applied to every factor before it is reported.
pub fn certify_prime(p: &BigUint) -> bool {
    match p.to_u64() {
        Some(v) => is_prime_u64(v),
        None => is_prime_biguint(p),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fz(n: i64) -> Factorization {
        factorize(&BigInt::from(n), &FactorBudget::default()).unwrap()
    }

    fn as_pairs(f: &Factorization) -> Vec<(u64, u32)> {
        f.factors.iter().map(|(p, &e)| (p.to_u64().unwrap(), e)).collect()
    }

    #[test]
    fn carmichael_561() {
        let f = fz(561);
        assert!(f.complete);
        assert_eq!(as_pairs(&f), vec![(3, 1), (11, 1), (17, 1)]);
    }

    #[test]
    fn unit_and_sign() {
        let one = fz(1);
        assert!(one.complete && one.factors.is_empty() && one.cofactor.is_one());
        let neg = fz(-1024);
        assert_eq!(neg.sign, Sign::Minus);
        assert_eq!(as_pairs(&neg), vec![(2, 10)]);
        assert_eq!(neg.value(), BigInt::from(-1024));
    }

    #[test]
    fn zero_rejected() {
        assert!(factorize(&BigInt::zero(), &FactorBudget::default()).is_err());
    }

    #[test]
    fn rho_splits_semiprime_beyond_trial_bound() {
        let n = BigInt::from(1_000_003u64) * BigInt::from(998_244_353u64);
        let f = factorize(&n, &FactorBudget::default()).unwrap();
        assert!(f.complete);
        assert_eq!(f.value(), n);
        assert_eq!(f.factors.len(), 2);
    }

    #[test]
    fn mersenne_101() {
        let n = (BigInt::one() << 101u32) - 1;
        let f = factorize(&n, &FactorBudget::default()).unwrap();
        assert!(f.complete);
        let ps: Vec<String> = f.primes().map(|p| p.to_string()).collect();
        assert_eq!(ps, vec!["7432339208719", "341117531003194129"]);
    }

    #[test]
    fn exhausted_budget_is_reported() {
        let n = BigInt::from(1_000_003u64) * BigInt::from(998_244_353u64);
        let tight = FactorBudget {
            trial_bound: 100,
            rho_iterations: 1,
        };
        let f = factorize(&n, &tight).unwrap();
        assert!(!f.complete);
        assert_eq!(f.value(), n);
        assert_eq!(f.omega_outside(&PrimeSet::empty(), true), None);
    }

    #[test]
    fn prime_square_cofactor() {
        let p = BigInt::from(1_000_000_007u64);
        let f = factorize(&(&p * &p), &FactorBudget::default()).unwrap();
        assert!(f.complete);
        assert_eq!(f.factors.values().copied().collect::<Vec<_>>(), vec![2]);
    }
}
