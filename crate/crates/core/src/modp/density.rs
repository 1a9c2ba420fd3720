use std::collections::HashSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use serde::Serialize;

use super::image::{generate_image, FiniteImage};
use super::check_modulus;
use crate::arith::primes::prime_divisors_u64;
use crate::arith::{prime_support, s_integer_part, FactorBudget, PrimeSet, Rat};
use crate::error::{Error, Result};
use crate::matgroup::MatrixQ;
use crate::poly::MultiPoly;

fn check_arity(f: &MultiPoly, n: usize) -> Result<()> {
    if f.nvars() != n * n {
        return Err(Error::Dimension { expected: n * n, got: f.nvars() });
    }
    Ok(())
}

/// `N_f(d)`: residues of the image modulo `d` at which `f` vanishes.
///
/// Primes of `ramified` are first removed from `d`; the image must have been
/// generated modulo a multiple of what remains.
pub fn count_nf(image: &FiniteImage, f: &MultiPoly, d: u64, ramified: &PrimeSet) -> Result<u64> {
    check_modulus(d)?;
    let d_eff: u64 = prime_divisors_u64(d).into_iter().filter(|&p| !ramified.contains(p)).product();
    if image.modulus() % d_eff != 0 {
        return Err(Error::invalid(format!(
            "image modulo {} cannot resolve residues modulo {d_eff}",
            image.modulus()
        )));
    }
    let n = image.elements().first().map(|e| e.dim()).unwrap_or(0);
    check_arity(f, n)?;
    if d_eff == image.modulus() {
        let mut c = 0;
        for e in image.elements() {
            if f.eval_mod(e.entries(), d_eff)? == 0 {
                c += 1;
            }
        }
        return Ok(c);
    }
    let mut seen = HashSet::new();
    let mut c = 0;
    for e in image.elements() {
        let r = e.project(d_eff)?;
        if seen.insert(r.clone()) && f.eval_mod(r.entries(), d_eff)? == 0 {
            c += 1;
        }
    }
    Ok(c)
}

/// `beta(p) = N_f(p) / |pi_p(Gamma)|`, or 0 at a ramified prime.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LocalDensity {
    pub p: u64,
    /// Raw count of image elements where `f` vanishes mod p.
    pub n_f: u64,
    pub order: u64,
    #[serde(serialize_with = "crate::arith::serialize_rat")]
    pub beta: Rat,
    pub ramified: bool,
}

pub fn local_density(gens: &[MatrixQ], f: &MultiPoly, p: u64, ramified: &PrimeSet, cap: usize) -> Result<LocalDensity> {
    if !crate::arith::is_prime_u64(p) {
        return Err(Error::invalid(format!("{p} is not prime")));
    }
    let image = generate_image(gens, p, cap)?;
    let n_f = count_nf(&image, f, p, &PrimeSet::empty())?;
    let order = image.order() as u64;
    let is_ram = ramified.contains(p);
    let beta = if is_ram { Rat::zero() } else { Rat::new(n_f.into(), order.into()) };
    Ok(LocalDensity { p, n_f, order, beta, ramified: is_ram })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BetaSquarefree {
    pub d: u64,
    #[serde(serialize_with = "crate::arith::serialize_rat")]
    pub beta: Rat,
    pub per_prime: Vec<LocalDensity>,
    /// `N_f(d) / |pi_d(Gamma)|` from the image modulo `d` itself.
    #[serde(serialize_with = "crate::arith::serialize_opt_rat")]
    pub direct: Option<Rat>,
}

impl BetaSquarefree {
    pub fn consistent(&self) -> Option<bool> {
        self.direct.as_ref().map(|d| *d == self.beta)
    }
}

/// Product of local densities over the primes of a squarefree `d`; zero if
/// one of them is ramified. With `direct`, also computes the ratio from the
/// image modulo `d`.
pub fn beta_squarefree(
    gens: &[MatrixQ],
    f: &MultiPoly,
    d: u64,
    ramified: &PrimeSet,
    cap: usize,
    direct: bool,
) -> Result<BetaSquarefree> {
    check_modulus(d)?;
    let primes = prime_divisors_u64(d);
    let per_prime = primes
        .iter()
        .map(|&p| local_density(gens, f, p, ramified, cap))
        .collect::<Result<Vec<_>>>()?;
    let beta = per_prime.iter().fold(Rat::from_integer(1.into()), |acc, l| acc * &l.beta);
    let any_ram = primes.iter().any(|&p| ramified.contains(p));
    let direct = if direct && !any_ram && d > 1 {
        let image = generate_image(gens, d, cap)?;
        let n = count_nf(&image, f, d, &PrimeSet::empty())?;
        Some(Rat::new(n.into(), (image.order() as u64).into()))
    } else {
        None
    };
    Ok(BetaSquarefree { d, beta, per_prime, direct })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RamifiedReport {
    /// Candidates confirmed on the full image modulo p.
    pub confirmed: PrimeSet,
    /// Candidates where some image element has `f != 0 mod p`.
    pub rejected: Vec<u64>,
    /// Candidates above `p_max` (or beyond 64 bits), left undecided.
    pub unresolved: Vec<String>,
    /// Gcd of the S-integer parts of the nonzero sampled values.
    pub sample_gcd: String,
    /// Primes stripped before taking the gcd: denominators plus declared S.
    pub stripped: PrimeSet,
}

/// Primes `p` with `f(gamma) = 0 mod p` for every `gamma`.
///
/// Candidates come from the gcd over `sample`; each one up to `p_max` is
/// settled on the image modulo p, where `f` is constant on residue classes.
pub fn detect_ramified(
    gens: &[MatrixQ],
    f: &MultiPoly,
    sample: &[MatrixQ],
    p_max: u64,
    s: &PrimeSet,
    cap: usize,
) -> Result<RamifiedReport> {
    if sample.is_empty() {
        return Err(Error::invalid("empty sample"));
    }
    let n = gens.first().map(MatrixQ::dim).ok_or_else(|| Error::invalid("no generators"))?;
    check_arity(f, n)?;
    let budget = FactorBudget::default();
    let mut stripped = s.clone();
    for den in gens.iter().map(MatrixQ::denominator_lcm).chain(f.terms().values().map(|c| c.denom().clone())) {
        let (ps, large) = prime_support(&den, &budget)?;
        if !large.is_empty() {
            return Err(Error::invalid("denominator prime beyond 64 bits"));
        }
        stripped = stripped.union(&ps);
    }
    let mut g = BigInt::zero();
    for gamma in sample {
        let v = f.eval(gamma.entries())?;
        if !v.is_zero() {
            g = g.gcd(&s_integer_part(&v, &stripped)?);
        }
    }
    if g.is_zero() {
        return Err(Error::Inconclusive("f vanishes on the whole sample".into()));
    }
    let (small, large) = prime_support(&g, &budget)?;
    let mut confirmed = PrimeSet::empty();
    let mut rejected = Vec::new();
    let mut unresolved: Vec<String> = large.iter().map(|p| p.to_string()).collect();
    for p in small.iter() {
        if p > p_max {
            unresolved.push(p.to_string());
            continue;
        }
        let image = generate_image(gens, p, cap)?;
        let n_f = count_nf(&image, f, p, &PrimeSet::empty())?;
        if n_f as usize == image.order() {
            confirmed.insert(p);
        } else {
            rejected.push(p);
        }
    }
    Ok(RamifiedReport { confirmed, rejected, unresolved, sample_gcd: g.to_string(), stripped })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use crate::matgroup::{ball, GeneratorSet};
    use crate::modp::DEFAULT_IMAGE_CAP;
    use crate::poly::matrix_parser;

    fn free_pair() -> Vec<MatrixQ> {
        vec![MatrixQ::from_ints(&[&[1, 2], &[0, 1]]), MatrixQ::from_ints(&[&[1, 0], &[2, 1]])]
    }

    fn f(s: &str) -> MultiPoly {
        matrix_parser(2).parse(s).unwrap()
    }

    #[test]
    fn counts_and_densities() {
        let g = free_pair();
        let none = PrimeSet::empty();
        let im3 = generate_image(&g, 3, DEFAULT_IMAGE_CAP).unwrap();
        assert_eq!(count_nf(&im3, &f("tr - 2"), 3, &none).unwrap(), 9);
        let im15 = generate_image(&g, 15, DEFAULT_IMAGE_CAP).unwrap();
        assert_eq!(count_nf(&im15, &f("tr - 2"), 15, &none).unwrap(), 225);
        assert_eq!(count_nf(&im15, &f("1"), 15, &none).unwrap(), 0);
        assert_eq!(count_nf(&im15, &f("tr - 2"), 5, &none).unwrap(), 25);

        let ram = PrimeSet::new([2]).unwrap();
        assert_eq!(local_density(&g, &f("tr - 2"), 3, &ram, DEFAULT_IMAGE_CAP).unwrap().beta, rat(3, 8));
        assert_eq!(local_density(&g, &f("tr - 2"), 5, &ram, DEFAULT_IMAGE_CAP).unwrap().beta, rat(5, 24));
        let l2 = local_density(&g, &f("tr - 2"), 2, &ram, DEFAULT_IMAGE_CAP).unwrap();
        assert!(l2.ramified && l2.beta.is_zero());

        let b = beta_squarefree(&g, &f("tr - 2"), 15, &ram, DEFAULT_IMAGE_CAP, true).unwrap();
        assert_eq!(b.beta, rat(5, 64));
        assert_eq!(b.consistent(), Some(true));
        let b = beta_squarefree(&g, &f("tr - 2"), 6, &ram, DEFAULT_IMAGE_CAP, true).unwrap();
        assert!(b.beta.is_zero());
        let b = beta_squarefree(&g, &f("tr - 2"), 1, &ram, DEFAULT_IMAGE_CAP, true).unwrap();
        assert_eq!(b.beta, rat(1, 1));
        assert!(beta_squarefree(&g, &f("tr - 2"), 12, &ram, DEFAULT_IMAGE_CAP, true).is_err());
    }

    #[test]
    fn ramified_primes() {
        let g = free_pair();
        let gs = GeneratorSet::symmetrized(g.clone()).unwrap();
        let sample = ball(&gs, 3, 10_000).unwrap();
        let none = PrimeSet::empty();
        let r = detect_ramified(&g, &f("tr - 2"), sample.elements(), 50, &none, DEFAULT_IMAGE_CAP).unwrap();
        assert_eq!(r.confirmed.iter().collect::<Vec<_>>(), vec![2]);
        let r = detect_ramified(&g, &f("3*(tr - 2)"), sample.elements(), 50, &none, DEFAULT_IMAGE_CAP).unwrap();
        assert_eq!(r.confirmed.iter().collect::<Vec<_>>(), vec![2, 3]);

        let sl2z = vec![MatrixQ::from_ints(&[&[1, 1], &[0, 1]]), MatrixQ::from_ints(&[&[0, -1], &[1, 0]])];
        let gs = GeneratorSet::symmetrized(sl2z.clone()).unwrap();
        let sample = ball(&gs, 3, 10_000).unwrap();
        let r = detect_ramified(&sl2z, &f("tr"), sample.elements(), 50, &none, DEFAULT_IMAGE_CAP).unwrap();
        assert!(r.confirmed.is_empty());
    }
}
