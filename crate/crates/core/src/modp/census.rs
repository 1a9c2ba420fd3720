use std::collections::BTreeMap;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;

use super::variety::{enumerate_variety_mod_p, VarietyStrategy};
use crate::error::{Error, Result};
use crate::poly::MultiPoly;

/// Fewer classified primes than this and the census is flagged as unstable.
const STABLE_RANGE: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CensusRow {
    pub p: u64,
    pub count: u128,
    /// Nearest integer to `count / p^dim`, when within the Lang-Weil slack.
    pub c_hat: Option<u64>,
    /// `(count - c_hat p^dim) / p^(dim - 1/2)`.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BezoutCheck {
    pub distinct_nonzero: usize,
    pub sum_distinct_nonzero: u64,
    pub bound: u64,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SplittingCensus {
    pub dim: u32,
    pub rows: Vec<CensusRow>,
    pub frequencies: BTreeMap<u64, usize>,
    pub unclassified: Vec<u64>,
    /// Largest observed `c_hat`: estimates the sum of the degrees of the
    /// fields of definition of the top-dimensional components.
    pub sum_deg_estimate: u64,
    /// Mean `c_hat`: estimates the number of components over Q.
    pub mean_c_hat: f64,
    /// Observed values are `{0, c}` for a single `c`.
    pub two_valued: bool,
    pub bezout: BezoutCheck,
    pub unstable_range: bool,
}

impl SplittingCensus {
    pub fn frequency_of(&self, c: u64) -> f64 {
        let total: usize = self.frequencies.values().sum();
        if total == 0 {
            return 0.0;
        }
        *self.frequencies.get(&c).unwrap_or(&0) as f64 / total as f64
    }
}

fn classify(p: u64, count: u128, dim: u32) -> CensusRow {
    let pd = BigInt::from(p).pow(dim);
    let c = BigInt::from(count);
    let c_hat: BigInt = (&c * 2u32 + &pd) / (&pd * 2u32);
    let diff: BigInt = &c - &c_hat * &pd;
    let slack = BigInt::from(36) * BigInt::from(p).pow(2 * dim) / BigInt::from(p);
    let ok = dim >= 1 && &diff * &diff <= slack;
    let residual = {
        let d: f64 = diff.to_string().parse::<f64>().unwrap_or(f64::NAN);
        d / (p as f64).powf(dim as f64 - 0.5)
    };
    CensusRow {
        p,
        count,
        c_hat: if ok { c_hat.to_string().parse().ok() } else { None },
        residual,
    }
}

/// Leading coefficients `c_hat(p)` of `#V(F_p) ~ c_hat p^dim` over a range
/// of primes.
pub fn splitting_census(
    equations: &[MultiPoly],
    dim: u32,
    primes: &[u64],
    strategy: VarietyStrategy,
) -> Result<SplittingCensus> {
    if equations.is_empty() {
        return Err(Error::invalid("no equations"));
    }
    let rows: Vec<CensusRow> = primes
        .par_iter()
        .map(|&p| Ok(classify(p, enumerate_variety_mod_p(equations, p, strategy)?, dim)))
        .collect::<Result<_>>()?;
    let mut frequencies = BTreeMap::new();
    let mut unclassified = Vec::new();
    for r in &rows {
        match r.c_hat {
            Some(c) => *frequencies.entry(c).or_insert(0) += 1,
            None => unclassified.push(r.p),
        }
    }
    let classified: usize = frequencies.values().sum();
    let sum_deg_estimate = frequencies.keys().copied().max().unwrap_or(0);
    let mean_c_hat = if classified == 0 {
        0.0
    } else {
        frequencies.iter().map(|(&c, &k)| c as f64 * k as f64).sum::<f64>() / classified as f64
    };
    let nonzero: Vec<u64> = frequencies.keys().copied().filter(|&c| c > 0).collect();
    let two_valued = nonzero.len() <= 1;
    let bound: u64 = equations.iter().map(|e| e.total_degree().max(1) as u64).product();
    let sum_distinct: u64 = nonzero.iter().sum();
    let bezout = BezoutCheck {
        distinct_nonzero: nonzero.len(),
        sum_distinct_nonzero: sum_distinct,
        bound,
        ok: nonzero.len() as u64 <= bound && sum_distinct <= bound,
    };
    Ok(SplittingCensus {
        dim,
        rows,
        frequencies,
        unclassified,
        sum_deg_estimate,
        mean_c_hat,
        two_valued,
        bezout,
        unstable_range: classified < STABLE_RANGE,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::primes_in;
    use crate::poly::matrix_parser;

    fn sl2(f: &str) -> Vec<MultiPoly> {
        let p = matrix_parser(2);
        vec![p.parse("det - 1").unwrap(), p.parse(f).unwrap()]
    }

    #[test]
    fn census_examples() {
        let odd = primes_in(3, 29);
        let c = splitting_census(&sl2("x11^2 + 1"), 2, &odd, VarietyStrategy::default()).unwrap();
        for r in &c.rows {
            assert_eq!(r.c_hat, Some(if r.p % 4 == 1 { 2 } else { 0 }), "p = {}", r.p);
        }
        assert!(c.two_valued && c.bezout.ok);
        assert_eq!(c.sum_deg_estimate, 2);

        let c = splitting_census(&sl2("tr - 2"), 2, &odd, VarietyStrategy::default()).unwrap();
        assert!(c.rows.iter().all(|r| r.c_hat == Some(1) && r.count == (r.p * r.p) as u128));

        let c = splitting_census(&sl2("5"), 2, &[7, 11], VarietyStrategy::default()).unwrap();
        assert!(c.rows.iter().all(|r| r.count == 0));
        assert!(c.unstable_range);
    }
}
