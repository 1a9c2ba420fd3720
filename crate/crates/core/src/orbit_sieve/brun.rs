use std::collections::BTreeMap;

use num_traits::Zero;
use serde::Serialize;

use super::SieveSequence;
use crate::arith::{primes_up_to, PrimeSet};
use crate::error::{Error, Result};

/// Upper limit on the number of squarefree moduli summed by [`brun_bound`].
pub const DEFAULT_MODULI_BUDGET: usize = 1 << 22;

/// Two-sided Bonferroni bracket on the number of z-rough entries.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BrunBound {
    pub z: u64,
    pub b: u32,
    pub sieving_primes: Vec<u64>,
    /// Inclusion-exclusion truncated at depth `2b - 1`.
    pub lower: i128,
    /// Inclusion-exclusion truncated at depth `2b`.
    pub upper: i128,
    /// Entries with no prime factor among the sieving primes.
    pub sifted: u64,
    pub moduli: usize,
}

impl BrunBound {
    pub fn gap(&self) -> i128 {
        self.upper - self.lower
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Truncated inclusion-exclusion over `d | prod_{p <= z, p not in S} p`.
///
/// Each entry is classified by the exact set of sieving primes dividing it;
/// `A_d` is then a sum over the classes containing `d`, so every partial
/// sum is computed exactly.
pub fn brun_bound(seq: &SieveSequence, z: u64, b: u32, s: &PrimeSet, budget: usize) -> Result<BrunBound> {
    if z < 2 {
        return Err(Error::invalid("z must be at least 2"));
    }
    if b == 0 {
        return Err(Error::invalid("truncation b must be at least 1"));
    }
    let primes: Vec<u64> = primes_up_to(z).into_iter().filter(|&p| !s.contains(p)).collect();
    let m = primes.len();
    let depth = (2 * b as usize).min(m);
    let moduli: u128 = (0..=depth).map(|k| binomial(m, k)).sum();
    if m > 63 || moduli > budget as u128 {
        return Err(Error::resource(
            "brun_bound",
            format!("{moduli} moduli over {m} sieving primes exceed the budget {budget}; reduce z or b"),
        ));
    }

    let mut classes: BTreeMap<u64, u64> = BTreeMap::new();
    for (n, &c) in &seq.entries {
        let mut mask = 0u64;
        for (i, &p) in primes.iter().enumerate() {
            if (n % p).is_zero() {
                mask |= 1 << i;
            }
        }
        *classes.entry(mask).or_insert(0) += c;
    }
    let sifted = classes.get(&0).copied().unwrap_or(0);

    let mut by_depth = vec![0i128; depth + 1];
    let mut stack: Vec<(u64, usize, usize)> = vec![(0, 0, 0)];
    while let Some((mask, next, k)) = stack.pop() {
        let a_d: u64 = classes.iter().filter(|(&c, _)| c & mask == mask).map(|(_, &v)| v).sum();
        by_depth[k] += if k % 2 == 0 { a_d as i128 } else { -(a_d as i128) };
        if k < depth {
            for i in next..m {
                stack.push((mask | 1 << i, i + 1, k + 1));
            }
        }
    }
    let partial = |t: usize| -> i128 { by_depth[..=t.min(depth)].iter().sum() };
    Ok(BrunBound {
        z,
        b,
        sieving_primes: primes,
        lower: partial(2 * b as usize - 1),
        upper: partial(2 * b as usize),
        sifted,
        moduli: moduli as usize,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use proptest::prelude::*;

    fn seq(v: impl IntoIterator<Item = u64>) -> SieveSequence {
        SieveSequence::from_values(v.into_iter().map(BigInt::from), &PrimeSet::empty()).unwrap()
    }

    #[test]
    fn single_prime_is_exact() {
        let s = seq(1..=101);
        let r = brun_bound(&s, 2, 1, &PrimeSet::empty(), DEFAULT_MODULI_BUDGET).unwrap();
        assert_eq!((r.lower, r.upper, r.sifted), (51, 51, 51));
        let e = brun_bound(&seq([]), 10, 2, &PrimeSet::empty(), DEFAULT_MODULI_BUDGET).unwrap();
        assert_eq!((e.lower, e.upper), (0, 0));
    }

    #[test]
    fn exempt_primes_are_not_sieved() {
        let s = seq([2, 4, 3, 9, 5]);
        let r = brun_bound(&s, 3, 1, &PrimeSet::new([2]).unwrap(), DEFAULT_MODULI_BUDGET).unwrap();
        assert_eq!(r.sieving_primes, vec![3]);
        assert_eq!(r.sifted, 3);
    }

    #[test]
    fn budget_error() {
        let e = brun_bound(&seq(1..10), 1000, 3, &PrimeSet::empty(), 1000).unwrap_err();
        assert!(e.is_resource());
    }

    proptest! {
        #[test]
        fn brackets_hold(v in proptest::collection::vec(1u64..5000, 0..60), z in 2u64..30, b in 1u32..4) {
            let s = seq(v.iter().copied());
            let r = brun_bound(&s, z, b, &PrimeSet::empty(), DEFAULT_MODULI_BUDGET).unwrap();
            let direct = v.iter().filter(|&&n| primes_up_to(z).iter().all(|p| n % p != 0)).count() as i128;
            prop_assert!(r.lower <= direct && direct <= r.upper);
        }
    }
}
