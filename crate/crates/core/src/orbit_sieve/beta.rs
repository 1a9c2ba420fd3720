use std::collections::BTreeMap;

use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::arith::primes::prime_divisors_u64;
use crate::arith::{is_prime_u64, PrimeSet, Rat};
use crate::error::{Error, Result};
use crate::matgroup::MatrixQ;
use crate::modp::{enumerate_variety_mod_p, local_density, VarietyStrategy};
use crate::poly::MultiPoly;

fn serialize_table<S: Serializer>(m: &BTreeMap<u64, Rat>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_map(m.iter().map(|(k, v)| (k.to_string(), v.to_string())))
}

/// `beta(p)` on a finite set of primes, extended multiplicatively to
/// squarefree `d`. Ramified primes contribute 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BetaTable {
    #[serde(serialize_with = "serialize_table")]
    primes: BTreeMap<u64, Rat>,
    ramified: PrimeSet,
}

impl BetaTable {
    pub fn new(ramified: &PrimeSet) -> Self {
        BetaTable { primes: BTreeMap::new(), ramified: ramified.clone() }
    }

    pub fn insert(&mut self, p: u64, beta: Rat) -> Result<()> {
        if !is_prime_u64(p) {
            return Err(Error::invalid(format!("{p} is not prime")));
        }
        if beta < Rat::zero() || beta > Rat::from_integer(1.into()) {
            return Err(Error::invalid(format!("beta({p}) = {beta} is not a proportion")));
        }
        self.primes.insert(p, beta);
        Ok(())
    }

    pub fn from_fn(primes: &[u64], ramified: &PrimeSet, f: impl Fn(u64) -> Result<Rat>) -> Result<Self> {
        let mut t = BetaTable::new(ramified);
        for &p in primes {
            let b = if ramified.contains(p) { Rat::zero() } else { f(p)? };
            t.insert(p, b)?;
        }
        Ok(t)
    }

    /// `beta(p) = N_f(p) / |pi_p(Gamma)|` from generated images.
    pub fn from_images(gens: &[MatrixQ], f: &MultiPoly, primes: &[u64], ramified: &PrimeSet, cap: usize) -> Result<Self> {
        let rows = primes
            .par_iter()
            .map(|&p| local_density(gens, f, p, ramified, cap).map(|d| (p, d.beta)))
            .collect::<Result<Vec<_>>>()?;
        let mut t = BetaTable::new(ramified);
        for (p, b) in rows {
            t.insert(p, b)?;
        }
        Ok(t)
    }

    /// `beta(p) = #V(ambient, f)(F_p) / #V(ambient)(F_p)`.
    ///
    /// Equals the image-based density wherever reduction mod p is onto the
    /// points of the ambient group.
    pub fn from_variety_counts(
        f: &MultiPoly,
        ambient: &[MultiPoly],
        primes: &[u64],
        ramified: &PrimeSet,
        strategy: VarietyStrategy,
    ) -> Result<Self> {
        let mut with_f = ambient.to_vec();
        with_f.push(f.clone());
        let rows = primes
            .par_iter()
            .map(|&p| {
                if ramified.contains(p) {
                    return Ok((p, Rat::zero()));
                }
                let num = enumerate_variety_mod_p(&with_f, p, strategy)?;
                let den = enumerate_variety_mod_p(ambient, p, strategy)?;
                if den == 0 {
                    return Err(Error::invalid(format!("ambient variety has no points mod {p}")));
                }
                Ok((p, Rat::new(num.into(), den.into())))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut t = BetaTable::new(ramified);
        for (p, b) in rows {
            t.insert(p, b)?;
        }
        Ok(t)
    }

    pub fn ramified(&self) -> &PrimeSet {
        &self.ramified
    }

    pub fn primes(&self) -> impl Iterator<Item = (u64, &Rat)> {
        self.primes.iter().map(|(&p, b)| (p, b))
    }

    pub fn beta_prime(&self, p: u64) -> Option<Rat> {
        if self.ramified.contains(p) {
            return Some(Rat::zero());
        }
        self.primes.get(&p).cloned()
    }

    pub fn touches_ramified(&self, d: u64) -> bool {
        prime_divisors_u64(d).into_iter().any(|p| self.ramified.contains(p))
    }

    /// `beta(d)` for squarefree `d`.
    pub fn beta(&self, d: u64) -> Result<Rat> {
        if d == 0 || !crate::arith::primes::is_squarefree(d) {
            return Err(Error::invalid(format!("beta is defined on squarefree d, got {d}")));
        }
        let mut acc = Rat::from_integer(1.into());
        for p in prime_divisors_u64(d) {
            match self.beta_prime(p) {
                Some(b) => acc *= b,
                None => return Err(Error::invalid(format!("beta({p}) missing from the table"))),
            }
        }
        Ok(acc)
    }
}

/// Least-squares fit of `y -> sum_{w <= p <= y} beta(p) log p` against
/// `log y`, one sample per prime of the window.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimensionFit {
    pub w: u64,
    pub z: u64,
    pub primes: usize,
    pub slope: f64,
    pub intercept: f64,
    /// Largest absolute deviation of the cumulative sum from the fitted line.
    pub residual: f64,
}

pub fn sieve_dimension_fit(beta: &BetaTable, w: u64, z: u64) -> Result<DimensionFit> {
    if w > z {
        return Err(Error::invalid(format!("empty window [{w}, {z}]")));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut acc = 0.0;
    for (p, b) in beta.primes().filter(|&(p, _)| p >= w && p <= z) {
        let b = if beta.ramified().contains(p) { 0.0 } else { b.to_f64().unwrap_or(0.0) };
        let lp = (p as f64).ln();
        acc += b * lp;
        xs.push(lp);
        ys.push(acc);
    }
    if xs.len() < 10 {
        return Err(Error::Inconclusive(format!(
            "{} primes of the table lie in [{w}, {z}]; at least 10 are needed",
            xs.len()
        )));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let residual = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - slope * x - intercept).abs())
        .fold(0.0, f64::max);
    Ok(DimensionFit { w, z, primes: xs.len(), slope, intercept, residual })
}
