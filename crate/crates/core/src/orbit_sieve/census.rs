use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{omega_outside, s_integer_part, FactorBudget, Omega, PrimeSet, Rat};
use crate::error::{Error, Result};
use crate::matgroup::{ball, Ball, GeneratorSet};
use crate::poly::{zariski_density_test, DensityVerdict, MultiPoly};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Class {
    Zero,
    Unfactored,
    Omega(u32),
}

fn classify(ball: &Ball, f: &MultiPoly, s: &PrimeSet, budget: &FactorBudget) -> Result<Vec<Class>> {
    let n = ball.elements().first().map(|g| g.dim()).unwrap_or(0);
    if f.nvars() != n * n {
        return Err(Error::Dimension { expected: n * n, got: f.nvars() });
    }
    ball.elements()
        .par_iter()
        .map(|g| {
            let v = f.eval(g.entries())?;
            if v.is_zero() {
                return Ok(Class::Zero);
            }
            let m = s_integer_part(&v, s)?;
            Ok(match omega_outside(&m, s, true, budget)? {
                Omega::Exact(k) => Class::Omega(k),
                Omega::Unknown => Class::Unfactored,
            })
        })
        .collect()
}

/// Ball elements sorted by how many prime factors (with multiplicity) of
/// `f_Gamma` lie outside `S`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlmostPrimeCensus {
    pub radius: usize,
    pub s_used: PrimeSet,
    pub ball_size: usize,
    /// `counts[r]` = elements with at most `r` such factors.
    pub counts: Vec<u64>,
    /// Elements with `f(gamma) = 0`.
    pub zeros: u64,
    /// Elements whose value did not factor within budget.
    pub unfactored: u64,
    #[serde(skip)]
    points: Vec<(Vec<Rat>, u32)>,
}

impl AlmostPrimeCensus {
    /// Matrix entries of the elements counted at level `r`.
    pub fn sample(&self, r: u32) -> Vec<Vec<Rat>> {
        self.points.iter().filter(|(_, k)| *k <= r).map(|(p, _)| p.clone()).collect()
    }

    pub fn r_max(&self) -> u32 {
        self.counts.len().saturating_sub(1) as u32
    }
}

fn assemble(ball: &Ball, classes: &[Class], s: &PrimeSet, radius: usize, r_max: u32) -> AlmostPrimeCensus {
    let mut counts = vec![0u64; r_max as usize + 1];
    let mut zeros = 0;
    let mut unfactored = 0;
    let mut points = Vec::new();
    let mut size = 0;
    for ((g, len), c) in ball.iter().zip(classes) {
        if len > radius {
            continue;
        }
        size += 1;
        match *c {
            Class::Zero => zeros += 1,
            Class::Unfactored => unfactored += 1,
            Class::Omega(k) => {
                for slot in counts.iter_mut().skip(k as usize) {
                    *slot += 1;
                }
                points.push((g.entries().to_vec(), k));
            }
        }
    }
    AlmostPrimeCensus { radius, s_used: s.clone(), ball_size: size, counts, zeros, unfactored, points }
}

pub fn census_from_ball(ball: &Ball, f: &MultiPoly, s: &PrimeSet, r_max: u32, budget: &FactorBudget) -> Result<AlmostPrimeCensus> {
    let classes = classify(ball, f, s, budget)?;
    Ok(assemble(ball, &classes, s, ball.radius(), r_max))
}

pub fn almost_prime_census(
    gens: &GeneratorSet,
    f: &MultiPoly,
    radius: usize,
    s: &PrimeSet,
    r_max: u32,
    budget: &FactorBudget,
    cap: usize,
) -> Result<AlmostPrimeCensus> {
    let b = ball(gens, radius, cap)?;
    census_from_ball(&b, f, s, r_max, budget)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum SaturationVerdict {
    /// The census at `r` passed the density test at the final radius.
    Saturated { r: u32 },
    /// Enough points at every `r <= r_max`, yet all lie on a hypersurface of
    /// degree at most D outside the ambient ideal.
    NotDenseAtD,
    /// Too few certified points to decide at `r_max`.
    InsufficientPoints,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LevelSaturation {
    pub radius: usize,
    pub r_hat: Option<u32>,
    /// Density verdict labels for `r = 0, 1, ...` up to `r_hat` (or `r_max`).
    pub verdicts: Vec<String>,
    pub points: Vec<u64>,
}

/// Empirical lower-confidence estimate of the least `r` for which the
/// census looks Zariski dense at degree D. Not a saturation number.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SaturationEstimate {
    pub kind: &'static str,
    pub r_hat: Option<u32>,
    pub s_used: PrimeSet,
    pub degree: u32,
    pub l_schedule: Vec<usize>,
    pub r_max: u32,
    pub levels: Vec<LevelSaturation>,
    /// Same `r_hat` at the last two radii.
    pub stable: bool,
    pub verdict: SaturationVerdict,
    /// Verdict at `r_hat` and at `r_hat - 1`, final radius.
    pub at_r_hat: Option<String>,
    pub below_r_hat: Option<String>,
}

#[allow(clippy::too_many_arguments)]
pub fn saturation_estimate(
    gens: &GeneratorSet,
    f: &MultiPoly,
    s: &PrimeSet,
    degree: u32,
    l_schedule: &[usize],
    ambient: &[MultiPoly],
    r_max: u32,
    budget: &FactorBudget,
    cap: usize,
) -> Result<SaturationEstimate> {
    if l_schedule.is_empty() || l_schedule.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("L schedule must be non-empty and strictly increasing"));
    }
    let l_last = *l_schedule.last().unwrap();
    let b = ball(gens, l_last, cap)?;
    let classes = classify(&b, f, s, budget)?;

    let mut levels = Vec::new();
    let mut last_verdicts: Vec<DensityVerdict> = Vec::new();
    for &l in l_schedule {
        let census = assemble(&b, &classes, s, l, r_max);
        let mut verdicts = Vec::new();
        let mut labels = Vec::new();
        let mut points = Vec::new();
        let mut r_hat = None;
        for r in 0..=r_max {
            let sample = census.sample(r);
            points.push(sample.len() as u64);
            let v = if sample.is_empty() {
                DensityVerdict::Inconclusive {
                    need: crate::poly::density::monomials_up_to(f.nvars(), degree).len(),
                    witness: MultiPoly::one(f.nvars()),
                }
            } else {
                zariski_density_test(&sample, degree, ambient)?
            };
            labels.push(v.label());
            let dense = v.is_dense();
            verdicts.push(v);
            if dense {
                r_hat = Some(r);
                break;
            }
        }
        log::debug!("saturation: L={l} r_hat={r_hat:?}");
        levels.push(LevelSaturation { radius: l, r_hat, verdicts: labels, points });
        last_verdicts = verdicts;
    }

    let r_hat = levels.last().and_then(|x| x.r_hat);
    let stable = levels.len() >= 2 && levels[levels.len() - 1].r_hat == levels[levels.len() - 2].r_hat;
    let verdict = match r_hat {
        Some(r) => SaturationVerdict::Saturated { r },
        None => match last_verdicts.last() {
            Some(DensityVerdict::NotDense { .. }) => SaturationVerdict::NotDenseAtD,
            _ => SaturationVerdict::InsufficientPoints,
        },
    };
    let label = |r: u32| last_verdicts.get(r as usize).map(|v| v.label());
    Ok(SaturationEstimate {
        kind: "empirical lower-confidence estimate",
        r_hat,
        s_used: s.clone(),
        degree,
        l_schedule: l_schedule.to_vec(),
        r_max,
        levels,
        stable,
        verdict,
        at_r_hat: r_hat.and_then(label),
        below_r_hat: r_hat.filter(|&r| r > 0).and_then(|r| label(r - 1)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matgroup::{MatrixQ, DEFAULT_BALL_CAP};
    use crate::poly::matrix_parser;

    fn free_pair() -> GeneratorSet {
        GeneratorSet::symmetrized(vec![
            MatrixQ::from_ints(&[&[1, 2], &[0, 1]]),
            MatrixQ::from_ints(&[&[1, 0], &[2, 1]]),
        ])
        .unwrap()
    }

    fn budget() -> FactorBudget {
        FactorBudget::default()
    }

    #[test]
    fn census_examples() {
        let g = free_pair();
        let p = matrix_parser(2);
        let c = almost_prime_census(&g, &p.parse("x11").unwrap(), 0, &PrimeSet::empty(), 3, &budget(), DEFAULT_BALL_CAP).unwrap();
        assert_eq!(c.counts[0], 1);
        let s2 = PrimeSet::new([2]).unwrap();
        let c2 = almost_prime_census(&g, &p.parse("2 x11").unwrap(), 0, &s2, 3, &budget(), DEFAULT_BALL_CAP).unwrap();
        assert_eq!(c2.counts, c.counts);
    }

    #[test]
    fn census_monotone_and_unit_invariant() {
        let g = free_pair();
        let p = matrix_parser(2);
        let f = p.parse("x11 + x12").unwrap();
        let s = PrimeSet::new([2, 3]).unwrap();
        let f6 = p.parse("6 (x11 + x12) / 4").unwrap();
        let mut prev: Option<AlmostPrimeCensus> = None;
        for l in 0..=6 {
            let c = almost_prime_census(&g, &f, l, &s, 6, &budget(), DEFAULT_BALL_CAP).unwrap();
            assert!(c.counts.windows(2).all(|w| w[0] <= w[1]));
            let above = c.points.iter().filter(|(_, k)| *k > 6).count() as u64;
            assert_eq!(c.counts[6] + c.zeros + c.unfactored + above, c.ball_size as u64);
            if let Some(q) = &prev {
                assert!(q.counts.iter().zip(&c.counts).all(|(a, b)| a <= b));
            }
            let c6 = almost_prime_census(&g, &f6, l, &s, 6, &budget(), DEFAULT_BALL_CAP).unwrap();
            assert_eq!(c6.counts, c.counts);
            prev = Some(c);
        }
    }

    #[test]
    fn unit_function_saturates_at_zero() {
        let g = free_pair();
        let p = matrix_parser(2);
        let det = p.parse("det - 1").unwrap();
        let est = saturation_estimate(&g, &p.parse("1").unwrap(), &PrimeSet::empty(), 1, &[2, 3], &[det], 2, &budget(), DEFAULT_BALL_CAP)
            .unwrap();
        assert_eq!(est.verdict, SaturationVerdict::Saturated { r: 0 });
        assert!(est.stable);
        assert_eq!(est.below_r_hat, None);
    }

    #[test]
    fn cyclic_group_is_not_dense() {
        let g = GeneratorSet::symmetrized(vec![MatrixQ::from_ints(&[&[1, 1], &[0, 1]])]).unwrap();
        let p = matrix_parser(2);
        let det = p.parse("det - 1").unwrap();
        let est = saturation_estimate(&g, &p.parse("x12 + 3").unwrap(), &PrimeSet::empty(), 1, &[6, 12], &[det], 3, &budget(), DEFAULT_BALL_CAP)
            .unwrap();
        assert_eq!(est.r_hat, None);
        assert_eq!(est.verdict, SaturationVerdict::NotDenseAtD);
        assert!(est.levels.iter().all(|l| l.verdicts.iter().all(|v| v != "dense")));
    }

    #[test]
    fn too_few_points_is_inconclusive() {
        let g = free_pair();
        let p = matrix_parser(2);
        let est = saturation_estimate(&g, &p.parse("x11").unwrap(), &PrimeSet::empty(), 2, &[0], &[], 1, &budget(), DEFAULT_BALL_CAP)
            .unwrap();
        assert_eq!(est.verdict, SaturationVerdict::InsufficientPoints);
        assert!(!est.stable);
    }
}
