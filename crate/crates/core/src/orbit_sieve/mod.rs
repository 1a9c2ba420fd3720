//! Sieve machinery on general orbits: the sequence `a_n(L)` of S-integer
//! parts of `f` over a word ball, its decomposition along squarefree moduli,
//! sieve-dimension fits, truncated inclusion-exclusion and almost-prime
//! censuses.

mod beta;
mod brun;
mod census;
mod formula;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::arith::primes::is_squarefree;
use crate::arith::{s_integer_part, PrimeSet, Rat};
use crate::error::{Error, Result};
use crate::matgroup::{ball, Ball, GeneratorSet};
use crate::poly::MultiPoly;

pub use beta::{sieve_dimension_fit, BetaTable, DimensionFit};
pub use brun::{brun_bound, BrunBound, DEFAULT_MODULI_BUDGET};
pub use census::{
    almost_prime_census, census_from_ball, saturation_estimate, AlmostPrimeCensus, LevelSaturation, SaturationEstimate,
    SaturationVerdict,
};
pub use formula::{coefficient_norm, r_formula, value_bound_check, ValueBoundCheck};

fn serialize_counts<S: Serializer>(m: &BTreeMap<BigInt, u64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_map(m.iter().map(|(k, v)| (k.to_string(), v)))
}

/// The multiset `{f_Gamma(gamma) : l(gamma) <= L}` with `f(gamma) != 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SieveSequence {
    pub radius: usize,
    pub s_used: PrimeSet,
    /// `n -> a_n(L)`.
    #[serde(serialize_with = "serialize_counts")]
    pub entries: BTreeMap<BigInt, u64>,
    pub x: u64,
    /// Ball elements with `f(gamma) = 0`.
    pub skipped: u64,
    pub ball_size: usize,
}

impl SieveSequence {
    /// Sequence of arbitrary positive integers (radius 0, no ball).
    pub fn from_values(values: impl IntoIterator<Item = BigInt>, s: &PrimeSet) -> Result<Self> {
        let mut entries = BTreeMap::new();
        let mut x = 0;
        let mut skipped = 0;
        for v in values {
            if v.is_zero() {
                skipped += 1;
                continue;
            }
            let n = s_integer_part(&Rat::from_integer(v), s)?;
            *entries.entry(n).or_insert(0) += 1;
            x += 1;
        }
        Ok(SieveSequence {
            radius: 0,
            s_used: s.clone(),
            entries,
            x,
            skipped,
            ball_size: (x + skipped) as usize,
        })
    }

    /// `A_d = sum_{d | n} a_n`.
    pub fn a_d(&self, d: u64) -> u64 {
        self.entries
            .iter()
            .filter(|(n, _)| (*n % d).is_zero())
            .map(|(_, c)| c)
            .sum()
    }
}

/// Evaluate `f` over an already enumerated ball.
pub fn sequence_from_ball(b: &Ball, f: &MultiPoly, s: &PrimeSet) -> Result<SieveSequence> {
    let values: Vec<Option<BigInt>> = b
        .elements()
        .par_iter()
        .map(|g| {
            let v = f.eval(g.entries())?;
            if v.is_zero() {
                Ok(None)
            } else {
                s_integer_part(&v, s).map(Some)
            }
        })
        .collect::<Result<_>>()?;
    let mut entries = BTreeMap::new();
    let mut x = 0;
    let mut skipped = 0;
    for v in values {
        match v {
            Some(n) => {
                *entries.entry(n).or_insert(0) += 1;
                x += 1;
            }
            None => skipped += 1,
        }
    }
    Ok(SieveSequence { radius: b.radius(), s_used: s.clone(), entries, x, skipped, ball_size: b.len() })
}

pub fn build_sequence(gens: &GeneratorSet, f: &MultiPoly, radius: usize, s: &PrimeSet, cap: usize) -> Result<SieveSequence> {
    let n = gens.dim();
    if f.nvars() != n * n {
        return Err(Error::Dimension { expected: n * n, got: f.nvars() });
    }
    let b = ball(gens, radius, cap)?;
    sequence_from_ball(&b, f, s)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModulusRow {
    pub d: u64,
    pub a_d: u64,
    #[serde(serialize_with = "crate::arith::serialize_rat")]
    pub beta: Rat,
    #[serde(serialize_with = "crate::arith::serialize_rat")]
    pub prediction: Rat,
    #[serde(serialize_with = "crate::arith::serialize_rat")]
    pub remainder: Rat,
    /// `d` has a prime factor in the ramified set.
    pub ramified: bool,
}

/// `A_d = beta(d) X + r_d` for every squarefree `d <= D`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModuliDecomposition {
    pub d_max: u64,
    pub x: u64,
    pub rows: Vec<ModulusRow>,
}

impl ModuliDecomposition {
    pub fn row(&self, d: u64) -> Option<&ModulusRow> {
        self.rows.binary_search_by_key(&d, |r| r.d).ok().map(|i| &self.rows[i])
    }
}

pub fn moduli_decomposition(seq: &SieveSequence, beta: &BetaTable, d_max: u64) -> Result<ModuliDecomposition> {
    if d_max == 0 {
        return Err(Error::invalid("D must be at least 1"));
    }
    let ds: Vec<u64> = (1..=d_max).filter(|&d| is_squarefree(d)).collect();
    let x = Rat::from_integer(seq.x.into());
    let rows = ds
        .par_iter()
        .map(|&d| {
            let b = beta.beta(d)?;
            let a_d = seq.a_d(d);
            let prediction = &b * &x;
            let remainder = Rat::from_integer(a_d.into()) - &prediction;
            Ok(ModulusRow { d, a_d, beta: b, prediction, remainder, ramified: beta.touches_ramified(d) })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ModuliDecomposition { d_max, x: seq.x, rows })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelReport {
    pub d_max: u64,
    pub x: u64,
    pub dim: f64,
    pub eps: f64,
    #[serde(serialize_with = "crate::arith::serialize_rat")]
    pub sum_abs: Rat,
    #[serde(serialize_with = "crate::arith::serialize_rat")]
    pub max_abs: Rat,
    /// Divisor attaining `max_abs`.
    pub argmax: u64,
    pub tau_grid: Vec<f64>,
    /// Least grid value with `sum |r_d| <= X^tau D^(dim + eps)`.
    pub least_tau: Option<f64>,
}

/// Empirical level of distribution inside the computed window only.
pub fn level_distribution_report(decomp: &ModuliDecomposition, tau_grid: &[f64], dim: f64, eps: f64) -> LevelReport {
    let mut sum_abs = Rat::zero();
    let mut max_abs = Rat::zero();
    let mut argmax = 1;
    for r in &decomp.rows {
        let a = r.remainder.abs();
        if a > max_abs {
            max_abs = a.clone();
            argmax = r.d;
        }
        sum_abs += a;
    }
    let total = sum_abs.to_f64().unwrap_or(f64::INFINITY);
    let mut grid = tau_grid.to_vec();
    grid.sort_by(|a, b| a.total_cmp(b));
    let dpow = (decomp.d_max as f64).powf(dim + eps);
    let least_tau = grid
        .iter()
        .copied()
        .find(|&t| total <= (decomp.x as f64).powf(t) * dpow);
    LevelReport {
        d_max: decomp.d_max,
        x: decomp.x,
        dim,
        eps,
        sum_abs,
        max_abs,
        argmax,
        tau_grid: grid,
        least_tau,
    }
}
