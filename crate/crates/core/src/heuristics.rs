//! Evidence for non-saturation on tori: Hilbert-Schmidt norm growth along a
//! free abelian group, the shifted product `prod_j (F + j)`, prime-factor
//! trends of actual values, and the Borel-Cantelli comparison sums.
//!
//! Nothing here is random. The "random integer" model is only ever used
//! to produce the comparison sums, which are reported next to the true
//! factor counts.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{factorize, s_integer_part, FactorBudget, PrimeSet, Rat};
use crate::error::{Error, Result};
use crate::matgroup::MatrixQ;

/// `F(x) = Tr(x^t x)`, the sum of squared entries.
pub fn hilbert_schmidt(x: &MatrixQ) -> Rat {
    x.entries().iter().map(|e| e * e).sum()
}

/// `prod_{j=1..nu} (F(x) + j)`; the empty product when `nu = 0`.
pub fn shifted_product(x: &MatrixQ, nu: u32) -> Rat {
    let f = hilbert_schmidt(x);
    (1..=nu).fold(Rat::one(), |acc, j| acc * (&f + Rat::from_integer(j.into())))
}

fn ln_int(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits < 1000 {
        return n.to_f64().unwrap_or(f64::INFINITY).abs().ln();
    }
    let shift = bits - 64;
    let top: BigInt = n.abs() >> shift;
    top.to_f64().unwrap_or(0.0).ln() + shift as f64 * std::f64::consts::LN_2
}

fn ln_rat(q: &Rat) -> f64 {
    ln_int(q.numer()) - ln_int(q.denom())
}

/// Pairwise commuting generators and an exponent box `max |m_i| <= M`.
#[derive(Debug, Clone)]
pub struct TorusSpec {
    generators: Vec<MatrixQ>,
    box_radius: u32,
}

impl TorusSpec {
    pub fn new(generators: Vec<MatrixQ>, box_radius: u32) -> Result<Self> {
        let Some(first) = generators.first() else {
            return Err(Error::invalid("a torus needs at least one generator"));
        };
        let n = first.dim();
        if let Some(g) = generators.iter().find(|g| g.dim() != n) {
            return Err(Error::Dimension { expected: n, got: g.dim() });
        }
        if generators.iter().any(|g| !g.invertible()) {
            return Err(Error::invalid("torus generators must be invertible"));
        }
        for (i, a) in generators.iter().enumerate() {
            for b in &generators[i + 1..] {
                if &(a * b) != &(b * a) {
                    return Err(Error::invalid("torus generators do not commute"));
                }
            }
        }
        Ok(TorusSpec { generators, box_radius })
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn generators(&self) -> &[MatrixQ] {
        &self.generators
    }

    pub fn box_radius(&self) -> u32 {
        self.box_radius
    }

    /// Every exponent vector of the box, in lexicographic order.
    pub fn exponents(&self) -> Vec<Vec<i64>> {
        let m = self.box_radius as i64;
        let mut out = vec![Vec::new()];
        for _ in 0..self.rank() {
            out = out
                .into_iter()
                .flat_map(|v| {
                    (-m..=m).map(move |k| {
                        let mut w = v.clone();
                        w.push(k);
                        w
                    })
                })
                .collect();
        }
        out
    }

    /// `gamma_1^{m_1} ... gamma_t^{m_t}`.
    pub fn element(&self, m: &[i64]) -> Result<MatrixQ> {
        if m.len() != self.rank() {
            return Err(Error::Dimension { expected: self.rank(), got: m.len() });
        }
        let n = self.generators[0].dim();
        let mut acc = MatrixQ::identity(n);
        for (g, &e) in self.generators.iter().zip(m) {
            acc = &acc * &g.powi(e)?;
        }
        Ok(acc)
    }
}

fn sup_norm(m: &[i64]) -> u64 {
    m.iter().map(|x| x.unsigned_abs()).max().unwrap_or(0)
}

/// Fitted two-sided envelope `A2^|m| / K <= F(gamma^m) <= K A1^|m|`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormGrowth {
    pub box_radius: u32,
    pub a1: f64,
    pub a2: f64,
    pub k: f64,
    pub points: usize,
    /// Every computed point satisfies the envelope with `(a1, a2, k)`.
    pub envelope_ok: bool,
    /// `a2 <= 1`: some direction does not escape (torsion, unit-circle
    /// eigenvalues, or a trivial generator).
    pub degenerate: bool,
}

fn ls_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx > 0.0 {
        sxy / sxx
    } else {
        0.0
    }
}

/// Slopes of the upper and lower shell envelopes of `log F`, fitted over the
/// outer half of the box (`M/2 <= |m| <= M`, sup norm) to stay clear of
/// small-`|m|` transients.
pub fn norm_growth_check(spec: &TorusSpec) -> Result<NormGrowth> {
    let m_max = spec.box_radius();
    if m_max < 3 {
        return Err(Error::invalid("norm growth needs a box radius of at least 3"));
    }
    let exps = spec.exponents();
    let logs: Vec<(u64, f64)> = exps
        .par_iter()
        .map(|m| Ok((sup_norm(m), ln_rat(&hilbert_schmidt(&spec.element(m)?)))))
        .collect::<Result<_>>()?;
    let mut upper = vec![f64::NEG_INFINITY; m_max as usize + 1];
    let mut lower = vec![f64::INFINITY; m_max as usize + 1];
    for &(k, v) in &logs {
        upper[k as usize] = upper[k as usize].max(v);
        lower[k as usize] = lower[k as usize].min(v);
    }
    let ks: Vec<f64> = (m_max / 2..=m_max).map(|k| k as f64).collect();
    let pick = |env: &[f64]| -> Vec<f64> { (m_max / 2..=m_max).map(|k| env[k as usize]).collect() };
    let s1 = ls_slope(&ks, &pick(&upper));
    let s2 = ls_slope(&ks, &pick(&lower));
    let a1 = s1.exp();
    let a2 = s2.exp();
    let log_k = logs
        .iter()
        .map(|&(k, v)| (v - s1 * k as f64).max(s2 * k as f64 - v))
        .fold(0.0, f64::max);
    let k = log_k.exp();
    let slack = 1e-9;
    let envelope_ok = logs
        .iter()
        .all(|&(m, v)| v <= log_k + s1 * m as f64 + slack && v >= s2 * m as f64 - log_k - slack);
    Ok(NormGrowth {
        box_radius: m_max,
        a1,
        a2,
        k,
        points: logs.len(),
        envelope_ok,
        degenerate: a2 <= 1.0 + 1e-9,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum TrendStatus {
    Factored,
    /// The value is 0.
    Zero,
    /// Factoring ran out of budget.
    Unfactored,
    /// A denominator prime lies outside `S`.
    NotSInteger,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TrendRow {
    pub index: Vec<i64>,
    pub value: String,
    /// Distinct primes outside `S`.
    pub omega: Option<u32>,
    /// Primes outside `S` with multiplicity.
    pub big_omega: Option<u32>,
    pub status: TrendStatus,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DyadicMinimum {
    pub lo: u64,
    pub hi: u64,
    pub min_omega: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TrendTable {
    pub s: PrimeSet,
    pub rows: Vec<TrendRow>,
    /// Least `omega` over rows with `|index|` in `[2^j, 2^{j+1})`.
    pub dyadic: Vec<DyadicMinimum>,
}

impl TrendTable {
    /// Tab-separated `index, value, omega, big_omega, status`.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("index\tvalue\tomega\tbig_omega\tstatus\n");
        let opt = |v: Option<u32>| v.map(|x| x.to_string()).unwrap_or_else(|| "-".into());
        for r in &self.rows {
            let idx: Vec<String> = r.index.iter().map(|i| i.to_string()).collect();
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{:?}\n",
                idx.join(","),
                r.value,
                opt(r.omega),
                opt(r.big_omega),
                r.status
            ));
        }
        out
    }
}

/// Factor counts outside `S` for each `(index, value)`.
pub fn prime_factor_trend(values: &[(Vec<i64>, Rat)], s: &PrimeSet, budget: &FactorBudget) -> Result<TrendTable> {
    let rows: Vec<TrendRow> = values
        .par_iter()
        .map(|(index, v)| {
            let row = |value: String, omega, big_omega, status| TrendRow { index: index.clone(), value, omega, big_omega, status };
            if v.is_zero() {
                return Ok(row("0".into(), None, None, TrendStatus::Zero));
            }
            let n = match s_integer_part(v, s) {
                Ok(n) => n,
                Err(Error::NotSInteger { .. }) => return Ok(row(v.to_string(), None, None, TrendStatus::NotSInteger)),
                Err(e) => return Err(e),
            };
            let f = factorize(&n, budget)?;
            Ok(match (f.omega_outside(s, false), f.omega_outside(s, true)) {
                (Some(a), Some(b)) => row(v.to_string(), Some(a), Some(b), TrendStatus::Factored),
                _ => row(v.to_string(), None, None, TrendStatus::Unfactored),
            })
        })
        .collect::<Result<_>>()?;

    let mut dyadic: Vec<DyadicMinimum> = Vec::new();
    for r in &rows {
        let k = sup_norm(&r.index);
        if k == 0 {
            continue;
        }
        let lo = 1u64 << (63 - k.leading_zeros());
        let hi = lo.saturating_mul(2) - 1;
        let slot = match dyadic.iter_mut().find(|d| d.lo == lo) {
            Some(d) => d,
            None => {
                dyadic.push(DyadicMinimum { lo, hi, min_omega: None });
                dyadic.last_mut().unwrap()
            }
        };
        if let Some(w) = r.omega {
            slot.min_omega = Some(slot.min_omega.map_or(w, |m| m.min(w)));
        }
    }
    dyadic.sort_by_key(|d| d.lo);
    Ok(TrendTable { s: s.clone(), rows, dyadic })
}

/// `(2^m - 2)(2^m - 1)` for `m = 1..=m_max`.
pub fn two_power_values(m_max: u32) -> Vec<(Vec<i64>, Rat)> {
    (1..=m_max)
        .map(|m| {
            let p = BigInt::one() << m;
            (vec![m as i64], Rat::from_integer((&p - 2) * (&p - 1)))
        })
        .collect()
}

/// `shifted_product(gamma^m, nu)` over the box of `spec`.
pub fn torus_values(spec: &TorusSpec, nu: u32) -> Result<Vec<(Vec<i64>, Rat)>> {
    spec.exponents()
        .into_par_iter()
        .map(|m| {
            let g = spec.element(&m)?;
            Ok((m, shifted_product(&g, nu)))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BorelCantelli {
    pub t: u32,
    pub nu: u32,
    pub r: u32,
    /// `(M, sum_{|m| <= M} g(m))` at powers of ten and at the final `M`.
    pub checkpoints: Vec<(u64, f64)>,
    /// Increase over the last decade (or the last checkpoint step).
    pub last_increment: f64,
    /// Integral-test upper bound on the full sum over `Z^t`.
    pub bound: f64,
    pub increments_decreasing: bool,
}

fn summand(k: u64, nu: u32, a: u32) -> f64 {
    let x = (k + 1) as f64;
    x.ln().powi(a as i32) / x.powi(nu as i32)
}

/// Lattice points of `Z^t` with sup norm exactly `k`.
fn shell(k: u64, t: u32) -> f64 {
    if k == 0 {
        1.0
    } else {
        (2.0 * k as f64 + 1.0).powi(t as i32) - (2.0 * k as f64 - 1.0).powi(t as i32)
    }
}

/// `sum_{j >= 2} (ln j)^a / j^s` bounded by explicit terms up to the point
/// where the summand decreases, then the incomplete gamma tail.
fn tail_bound(a: u32, s: f64) -> f64 {
    let j0 = ((a as f64 / s).exp().ceil() as u64).max(2);
    let head: f64 = (2..=j0).map(|j| (j as f64).ln().powi(a as i32) / (j as f64).powf(s)).sum();
    let y = (s - 1.0) * (j0 as f64).ln();
    let mut term = 1.0;
    let mut acc = 1.0;
    for k in 1..=a {
        term *= y / k as f64;
        acc += term;
    }
    let gamma = (1..=a).map(|k| k as f64).product::<f64>() * (-y).exp() * acc;
    head + gamma / (s - 1.0).powi(a as i32 + 1)
}

/// Partial sums of `[log(|m|+1)]^{nu(r-1)} / (|m|+1)^nu` over `|m| <= M`,
/// `m` in `Z^t`, sup norm, unit constant.
pub fn borel_cantelli_sum(t: u32, nu: u32, r: u32, m_max: u64) -> Result<BorelCantelli> {
    if t < 1 || r < 1 {
        return Err(Error::invalid("need t >= 1 and r >= 1"));
    }
    if nu <= t {
        return Err(Error::invalid(format!("the sum diverges unless nu > t (nu = {nu}, t = {t})")));
    }
    let a = nu * (r - 1);
    let mut checkpoints = Vec::new();
    let mut next = 1u64;
    let mut acc = 0.0;
    for k in 0..=m_max {
        acc += shell(k, t) * summand(k, nu, a);
        if k == next || k == m_max {
            checkpoints.push((k, acc));
            if k == next {
                next = next.saturating_mul(10);
            }
        }
    }
    checkpoints.dedup_by_key(|c| c.0);
    let incs: Vec<f64> = checkpoints.windows(2).map(|w| w[1].1 - w[0].1).collect();
    let last_increment = incs.last().copied().unwrap_or(0.0);
    let increments_decreasing = {
        let decades: Vec<f64> = checkpoints
            .windows(2)
            .filter(|w| w[1].0 == w[0].0 * 10)
            .map(|w| w[1].1 - w[0].1)
            .collect();
        decades.windows(2).all(|w| w[1] <= w[0])
    };
    // shell(k) <= t 2^t (k+1)^(t-1) for k >= 1
    let s = (nu - t + 1) as f64;
    let bound = summand(0, nu, a) + (t as f64) * 2f64.powi(t as i32) * tail_bound(a, s);
    Ok(BorelCantelli { t, nu, r, checkpoints, last_increment, bound, increments_decreasing })
}

/// Growth constants, trend table and comparison sums in one record.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeuristicReport {
    pub growth: NormGrowth,
    pub nu: u32,
    pub trend: TrendTable,
    pub borel_cantelli: Vec<BorelCantelli>,
}

pub fn torus_heuristic(spec: &TorusSpec, nu: u32, r_values: &[u32], s: &PrimeSet, budget: &FactorBudget) -> Result<HeuristicReport> {
    let growth = norm_growth_check(spec)?;
    let trend = prime_factor_trend(&torus_values(spec, nu)?, s, budget)?;
    let t = spec.rank() as u32;
    let borel_cantelli = r_values
        .iter()
        .map(|&r| borel_cantelli_sum(t, nu, r, spec.box_radius() as u64))
        .collect::<Result<_>>()?;
    Ok(HeuristicReport { growth, nu, trend, borel_cantelli })
}
