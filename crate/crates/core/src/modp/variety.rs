use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use crate::arith::primes::{mul_mod, pow_mod};
use crate::error::{Error, Result};
use crate::poly::univariate::roots_mod_p;
use crate::poly::{rat_mod, Monomial, MultiPoly};

/// Sparse polynomial over F_p.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct PolyModP {
    nvars: usize,
    p: u64,
    terms: BTreeMap<Monomial, u64>,
}

impl PolyModP {
    pub fn from_multi(f: &MultiPoly, p: u64) -> Result<Self> {
        let mut terms = BTreeMap::new();
        for (m, c) in f.terms() {
            let r = rat_mod(c, p)?;
            if r != 0 {
                terms.insert(m.clone(), r);
            }
        }
        Ok(PolyModP { nvars: f.nvars(), p, terms })
    }

    fn zero(nvars: usize, p: u64) -> Self {
        PolyModP { nvars, p, terms: BTreeMap::new() }
    }

    fn add_term(&mut self, m: Monomial, c: u64) {
        let c = c % self.p;
        if c == 0 {
            return;
        }
        let p = self.p;
        match self.terms.entry(m) {
            Entry::Occupied(mut o) => {
                let v = (*o.get() + c) % p;
                if v == 0 {
                    o.remove();
                } else {
                    *o.get_mut() = v;
                }
            }
            Entry::Vacant(slot) => {
                slot.insert(c);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.iter().all(|&e| e == 0))
    }

    pub fn vars_used(&self) -> Vec<usize> {
        (0..self.nvars).filter(|&v| self.terms.keys().any(|m| m[v] > 0)).collect()
    }

    pub fn degree_in(&self, v: usize) -> u32 {
        self.terms.keys().map(|m| m[v]).max().unwrap_or(0)
    }

    pub fn eval(&self, x: &[u64]) -> u64 {
        let p = self.p;
        self.terms.iter().fold(0, |acc, (m, &c)| {
            let t = m
                .iter()
                .zip(x)
                .filter(|(e, _)| **e > 0)
                .fold(c, |t, (&e, &xi)| mul_mod(t, pow_mod(xi, e as u64, p), p));
            (acc + t) % p
        })
    }

    fn add(&self, o: &PolyModP) -> PolyModP {
        let mut r = self.clone();
        for (m, &c) in &o.terms {
            r.add_term(m.clone(), c);
        }
        r
    }

    fn mul(&self, o: &PolyModP) -> PolyModP {
        let mut r = PolyModP::zero(self.nvars, self.p);
        for (m1, &c1) in &self.terms {
            for (m2, &c2) in &o.terms {
                let m: Monomial = m1.iter().zip(m2).map(|(a, b)| a + b).collect();
                r.add_term(m, mul_mod(c1, c2, self.p));
            }
        }
        r
    }

    fn scale(&self, c: u64) -> PolyModP {
        let mut r = PolyModP::zero(self.nvars, self.p);
        for (m, &v) in &self.terms {
            r.add_term(m.clone(), mul_mod(v, c, self.p));
        }
        r
    }

    fn coefficients_in(&self, v: usize) -> Vec<PolyModP> {
        let d = self.degree_in(v) as usize;
        let mut out = vec![PolyModP::zero(self.nvars, self.p); d + 1];
        for (m, &c) in &self.terms {
            let mut m2 = m.clone();
            m2[v] = 0;
            out[m[v] as usize].add_term(m2, c);
        }
        out
    }

    fn substitute_value(&self, v: usize, a: u64) -> PolyModP {
        let mut r = PolyModP::zero(self.nvars, self.p);
        for (m, &c) in &self.terms {
            let mut m2 = m.clone();
            m2[v] = 0;
            r.add_term(m2, mul_mod(c, pow_mod(a, m[v] as u64, self.p), self.p));
        }
        r
    }

    fn substitute(&self, v: usize, q: &PolyModP) -> PolyModP {
        if self.degree_in(v) == 0 {
            return self.clone();
        }
        let mut acc = PolyModP::zero(self.nvars, self.p);
        for c in self.coefficients_in(v).iter().rev() {
            acc = acc.mul(q).add(c);
        }
        acc
    }

    fn dense_in(&self, v: usize) -> Vec<u64> {
        let mut d = vec![0u64; self.degree_in(v) as usize + 1];
        for (m, &c) in &self.terms {
            d[m[v] as usize] = c;
        }
        d
    }
}

/// How to count `#V(F_p)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarietyStrategy {
    /// Recursive elimination: root-finding on univariate members,
    /// substitution through members linear in a variable with unit
    /// coefficient, otherwise branching over the values of one coordinate.
    Sliced { max_prime: u64, node_budget: u64 },
    /// Evaluate at every point of `F_p^k`.
    BruteForce { max_prime: u64 },
}

impl Default for VarietyStrategy {
    fn default() -> Self {
        VarietyStrategy::Sliced { max_prime: 2000, node_budget: 20_000_000 }
    }
}

impl VarietyStrategy {
    pub fn brute_force() -> Self {
        VarietyStrategy::BruteForce { max_prime: 31 }
    }
}

const BRUTE_FORCE_POINTS: u128 = 50_000_000;

fn reduce_all(equations: &[MultiPoly], p: u64) -> Result<(usize, Vec<PolyModP>)> {
    let nvars = equations.first().map(MultiPoly::nvars).ok_or_else(|| Error::invalid("no equations"))?;
    if let Some(e) = equations.iter().find(|e| e.nvars() != nvars) {
        return Err(Error::Dimension { expected: nvars, got: e.nvars() });
    }
    let polys = equations.iter().map(|e| PolyModP::from_multi(e, p)).collect::<Result<_>>()?;
    Ok((nvars, polys))
}

/// Exact number of common zeros in `F_p^k` of the equations (all in the
/// same `k` variables).
pub fn enumerate_variety_mod_p(equations: &[MultiPoly], p: u64, strategy: VarietyStrategy) -> Result<u128> {
    if !crate::arith::is_prime_u64(p) {
        return Err(Error::invalid(format!("{p} is not prime")));
    }
    let (nvars, polys) = reduce_all(equations, p)?;
    match strategy {
        VarietyStrategy::BruteForce { max_prime } => {
            check_brute(p, nvars, max_prime)?;
            let mut count = 0u128;
            for_each_point(nvars, p, |x| {
                if polys.iter().all(|f| f.eval(x) == 0) {
                    count += 1;
                }
            });
            Ok(count)
        }
        VarietyStrategy::Sliced { max_prime, node_budget } => {
            if p > max_prime {
                return Err(Error::resource(
                    "enumerate_variety_mod_p",
                    format!("p = {p} beyond the enumeration cap {max_prime}"),
                ));
            }
            let mut budget = node_budget;
            count_rec(polys, vec![true; nvars], p, &mut budget)
        }
    }
}

fn check_brute(p: u64, nvars: usize, max_prime: u64) -> Result<()> {
    if p > max_prime || (p as u128).checked_pow(nvars as u32).is_none_or(|t| t > BRUTE_FORCE_POINTS) {
        return Err(Error::resource(
            "enumerate_variety_mod_p",
            format!("brute force over F_{p}^{nvars} exceeds the budget"),
        ));
    }
    Ok(())
}

fn for_each_point(nvars: usize, p: u64, mut visit: impl FnMut(&[u64])) {
    let mut x = vec![0u64; nvars];
    loop {
        visit(&x);
        let mut i = 0;
        loop {
            if i == nvars {
                return;
            }
            x[i] += 1;
            if x[i] < p {
                break;
            }
            x[i] = 0;
            i += 1;
        }
    }
}

/// All points of `V(F_p)` by brute force, at most `limit` of them.
pub fn variety_points_mod_p(equations: &[MultiPoly], p: u64, limit: usize) -> Result<Vec<Vec<u64>>> {
    let (nvars, polys) = reduce_all(equations, p)?;
    check_brute(p, nvars, u64::MAX)?;
    let mut out = Vec::new();
    for_each_point(nvars, p, |x| {
        if out.len() < limit && polys.iter().all(|f| f.eval(x) == 0) {
            out.push(x.to_vec());
        }
    });
    Ok(out)
}

fn count_rec(polys: Vec<PolyModP>, free: Vec<bool>, p: u64, budget: &mut u64) -> Result<u128> {
    if *budget == 0 {
        return Err(Error::resource("enumerate_variety_mod_p", format!("node budget exhausted at p = {p}")));
    }
    *budget -= 1;
    let mut polys: Vec<PolyModP> = polys.into_iter().filter(|f| !f.is_zero()).collect();
    polys.sort();
    polys.dedup();
    if polys.iter().any(PolyModP::is_constant) {
        return Ok(0);
    }
    if polys.is_empty() {
        let k = free.iter().filter(|&&f| f).count() as u32;
        return Ok((p as u128).pow(k));
    }

    // a univariate member: branch over its roots
    if let Some(f) = polys.iter().filter(|f| f.vars_used().len() == 1).min_by_key(|f| f.degree_in(f.vars_used()[0])) {
        let v = f.vars_used()[0];
        let roots = roots_mod_p(&f.dense_in(v), p);
        let mut total = 0;
        for r in roots {
            let next = polys.iter().map(|g| g.substitute_value(v, r)).collect();
            let mut fr = free.clone();
            fr[v] = false;
            total += count_rec(next, fr, p, budget)?;
        }
        return Ok(total);
    }

    // a member linear in v with a unit coefficient: eliminate v
    for (i, f) in polys.iter().enumerate() {
        for v in f.vars_used() {
            if f.degree_in(v) != 1 {
                continue;
            }
            let co = f.coefficients_in(v);
            if !co[1].is_constant() {
                continue;
            }
            let c = co[1].terms.values().next().copied().unwrap_or(0);
            let inv = pow_mod(c, p - 2, p);
            let image = co[0].scale((p - inv) % p);
            let next = polys
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, g)| g.substitute(v, &image))
                .collect();
            let mut fr = free.clone();
            fr[v] = false;
            return count_rec(next, fr, p, budget);
        }
    }

    // branch over the values of one coordinate, preferring a variable that
    // is the whole coefficient of some linear variable
    let v = pick_branch_var(&polys);
    let mut total = 0;
    let mut fr = free.clone();
    fr[v] = false;
    for a in 0..p {
        let next = polys.iter().map(|g| g.substitute_value(v, a)).collect();
        total += count_rec(next, fr.clone(), p, budget)?;
    }
    Ok(total)
}

fn pick_branch_var(polys: &[PolyModP]) -> usize {
    for f in polys {
        for u in f.vars_used() {
            if f.degree_in(u) == 1 {
                let co = &f.coefficients_in(u)[1];
                let used = co.vars_used();
                if used.len() == 1 {
                    return used[0];
                }
            }
        }
    }
    let nvars = polys[0].nvars;
    (0..nvars)
        .max_by_key(|&v| (polys.iter().filter(|f| f.degree_in(v) > 0).count(), std::cmp::Reverse(v)))
        .expect("some variable")
}
