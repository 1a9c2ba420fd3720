//! Prime sieving and primality certification.
//!
//! Below 2^64 the Miller-Rabin test with the first twelve prime bases is
//! deterministic. Above that we run [`BIG_MR_ROUNDS`] rounds with bases drawn
//! from a fixed-seed ChaCha stream, so the error bound is below 2^-128 and
//! every run sees the same bases.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use once_cell::sync::Lazy;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Miller-Rabin rounds used for candidates above 2^64 (error < 4^-65).
pub const BIG_MR_ROUNDS: usize = 65;

/// Description of the primality test, carried into report metadata.
pub const PRIMALITY_METHOD: &str =
    "deterministic Miller-Rabin below 2^64; 65 fixed-seed Miller-Rabin rounds above (error < 2^-128)";

const SIEVE_LIMIT: usize = 1 << 20;

static SMALL_PRIMES: Lazy<Vec<u64>> = Lazy::new(|| sieve(SIEVE_LIMIT as u64));

/// All primes `<= limit` by the sieve of Eratosthenes.
pub fn sieve(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// Primes `<= limit`, served from the cached table when possible.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit as usize <= SIEVE_LIMIT {
        let end = SMALL_PRIMES.partition_point(|&p| p <= limit);
        SMALL_PRIMES[..end].to_vec()
    } else {
        sieve(limit)
    }
}

/// Primes in the closed range `[lo, hi]`.
pub fn primes_in(lo: u64, hi: u64) -> Vec<u64> {
    primes_up_to(hi).into_iter().filter(|&p| p >= lo).collect()
}

pub(crate) fn small_primes() -> &'static [u64] {
    &SMALL_PRIMES
}

#[inline]
pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

fn strong_probable_prime_u64(n: u64, a: u64) -> bool {
    let a = a % n;
    if a == 0 {
        return true;
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    let mut x = pow_mod(a, d, n);
    if x == 1 || x == n - 1 {
        return true;
    }
    for _ in 1..s {
        x = mul_mod(x, x, n);
        if x == n - 1 {
            return true;
        }
    }
    false
}

/// Deterministic primality test for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &BASES {
        if n % p == 0 {
            return n == p;
        }
    }
    BASES.iter().all(|&a| strong_probable_prime_u64(n, a))
}

fn strong_probable_prime_big(n: &BigUint, n_minus_one: &BigUint, d: &BigUint, s: u64, a: &BigUint) -> bool {
    let mut x = a.modpow(d, n);
    if x.is_one() || &x == n_minus_one {
        return true;
    }
    for _ in 1..s {
        x = (&x * &x) % n;
        if &x == n_minus_one {
            return true;
        }
    }
    false
}

/// Primality test for non-negative integers of any size.
pub fn is_prime_biguint(n: &BigUint) -> bool {
    if let Some(v) = n.to_u64() {
        return is_prime_u64(v);
    }
    for &p in small_primes().iter().take(200) {
        if (n % p).is_zero() {
            return false;
        }
    }
    let n_minus_one = n - 1u32;
    let s = n_minus_one.trailing_zeros().unwrap_or(0);
    let d = &n_minus_one >> s;
    let two = BigUint::from(2u32);
    if !strong_probable_prime_big(n, &n_minus_one, &d, s, &two) {
        return false;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_a1f1_e5ee_u64);
    let bits = n.bits();
    let upper = n - 2u32;
    for _ in 0..BIG_MR_ROUNDS {
        let mut a = random_below(&mut rng, &upper, bits);
        if a < two {
            a = two.clone();
        }
        if !strong_probable_prime_big(n, &n_minus_one, &d, s, &a) {
            return false;
        }
    }
    true
}

fn random_below(rng: &mut ChaCha8Rng, upper: &BigUint, bits: u64) -> BigUint {
    let words = bits.div_ceil(32) as usize;
    let digits: Vec<u32> = (0..words).map(|_| rng.gen()).collect();
    BigUint::new(digits) % upper
}

/// Primality of a signed integer (negative values and units are not prime).
pub fn is_prime(n: &BigInt) -> bool {
    match n.sign() {
        Sign::Plus => is_prime_biguint(n.magnitude()),
        _ => false,
    }
}

/// Squarefree test for a positive 64-bit integer by trial division.
pub fn is_squarefree(mut n: u64) -> bool {
    if n == 0 {
        return false;
    }
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return false;
            }
        }
        p += 1;
    }
    true
}

/// Distinct prime divisors of a small positive integer, increasing.
pub fn prime_divisors_u64(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Moebius function of a small positive integer.
pub fn moebius(n: u64) -> i32 {
    if !is_squarefree(n) {
        return 0;
    }
    if prime_divisors_u64(n).len() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// `gcd` of two machine integers.
pub fn gcd_u64(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sieve_matches_trial_division() {
        let fast = primes_up_to(2000);
        let slow: Vec<u64> = (2..=2000u64)
            .filter(|&n| (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0))
            .collect();
        assert_eq!(fast, slow);
    }

    #[test]
    fn u64_primality_edge_cases() {
        assert!(!is_prime_u64(0));
        assert!(!is_prime_u64(1));
        assert!(is_prime_u64(2));
        assert!(!is_prime_u64(561));
        // strong pseudoprime to bases 2..=37 would need > 3.3e24
        assert!(!is_prime_u64(3_215_031_751));
        assert!(is_prime_u64(18_446_744_073_709_551_557));
    }

    #[test]
    fn big_primality() {
        let m127 = (BigUint::one() << 127u32) - 1u32;
        assert!(is_prime_biguint(&m127));
        let m101 = (BigUint::one() << 101u32) - 1u32;
        assert!(!is_prime_biguint(&m101));
    }

    #[test]
    fn moebius_values() {
        assert_eq!(moebius(1), 1);
        assert_eq!(moebius(6), 1);
        assert_eq!(moebius(30), -1);
        assert_eq!(moebius(12), 0);
    }
}
