use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{denominator_lcm, Rat};
use crate::error::{Error, Result};

/// Exponent vector of a monomial.
pub type Monomial = Vec<u32>;

/// Sparse polynomial with rational coefficients in a fixed number of
/// variables. Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiPoly {
    nvars: usize,
    terms: BTreeMap<Monomial, Rat>,
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        MultiPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Rat) -> Self {
        let mut p = MultiPoly::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn one(nvars: usize) -> Self {
        MultiPoly::constant(nvars, Rat::one())
    }

    pub fn from_int(nvars: usize, c: i64) -> Self {
        MultiPoly::constant(nvars, Rat::from_integer(c.into()))
    }

    /// The coordinate function `x_i`.
    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars, "variable index out of range");
        let mut e = vec![0; nvars];
        e[i] = 1;
        MultiPoly::monomial(e, Rat::one())
    }

    pub fn monomial(exps: Monomial, c: Rat) -> Self {
        let nvars = exps.len();
        let mut p = MultiPoly::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(exps, c);
        }
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, Rat)>) -> Self {
        let mut p = MultiPoly::zero(nvars);
        for (m, c) in terms {
            assert_eq!(m.len(), nvars);
            p.add_term(m, c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: Rat) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, Rat> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.iter().all(|&e| e == 0))
    }

    /// Constant term (the value when the polynomial is constant).
    pub fn constant_term(&self) -> Rat {
        self.terms.get(&vec![0; self.nvars]).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.iter().sum()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|m| m[var]).max().unwrap_or(0)
    }

    pub fn depends_on(&self, var: usize) -> bool {
        self.terms.keys().any(|m| m[var] > 0)
    }

    pub fn vars_used(&self) -> Vec<usize> {
        (0..self.nvars).filter(|&v| self.depends_on(v)).collect()
    }

    pub fn coefficients(&self) -> impl Iterator<Item = &Rat> {
        self.terms.values()
    }

    /// Leading term under the stored (lexicographic) order.
    pub fn leading(&self) -> Option<(&Monomial, &Rat)> {
        self.terms.iter().next_back()
    }

    pub fn neg(&self) -> Self {
        MultiPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn add(&self, other: &MultiPoly) -> Self {
        assert_eq!(self.nvars, other.nvars, "variable count");
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &MultiPoly) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &MultiPoly) -> Self {
        assert_eq!(self.nvars, other.nvars, "variable count");
        let mut out = MultiPoly::zero(self.nvars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let m: Monomial = m1.iter().zip(m2).map(|(a, b)| a + b).collect();
                out.add_term(m, c1 * c2);
            }
        }
        out
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return MultiPoly::zero(self.nvars);
        }
        MultiPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = MultiPoly::one(self.nvars);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Multiply by `x_var^k`.
    pub fn shift(&self, var: usize, k: u32) -> Self {
        MultiPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    let mut m = m.clone();
                    m[var] += k;
                    (m, c.clone())
                })
                .collect(),
        }
    }

    pub fn eval(&self, x: &[Rat]) -> Result<Rat> {
        if x.len() != self.nvars {
            return Err(Error::Dimension { expected: self.nvars, got: x.len() });
        }
        let mut acc = Rat::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (xi, &e) in x.iter().zip(m) {
                if e > 0 {
                    t *= xi.pow(e as i32);
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    pub fn eval_int(&self, x: &[BigInt]) -> Result<Rat> {
        let xs: Vec<Rat> = x.iter().map(|v| Rat::from_integer(v.clone())).collect();
        self.eval(&xs)
    }

    /// Reduce coefficients modulo `m` (denominators must be invertible mod m).
    pub fn coefficients_mod(&self, m: u64) -> Result<Vec<(Monomial, u64)>> {
        self.terms
            .iter()
            .map(|(mono, c)| Ok((mono.clone(), rat_mod(c, m)?)))
            .filter(|r| !matches!(r, Ok((_, 0))))
            .collect()
    }

    /// Evaluate modulo `m` at residues `x`.
    pub fn eval_mod(&self, x: &[u64], m: u64) -> Result<u64> {
        let mut acc = 0u64;
        for (mono, c) in &self.terms {
            let mut t = rat_mod(c, m)?;
            for (&xi, &e) in x.iter().zip(mono) {
                for _ in 0..e {
                    t = mulmod(t, xi, m);
                }
            }
            acc = (acc + t) % m;
        }
        Ok(acc)
    }

    /// Coefficient list in `var`: `self = sum_k coeffs[k] * x_var^k`.
    pub fn coefficients_in(&self, var: usize) -> Vec<MultiPoly> {
        let d = self.degree_in(var) as usize;
        let mut out = vec![MultiPoly::zero(self.nvars); d + 1];
        for (m, c) in &self.terms {
            let k = m[var] as usize;
            let mut m2 = m.clone();
            m2[var] = 0;
            out[k].add_term(m2, c.clone());
        }
        if self.is_zero() {
            out.clear();
        }
        out
    }

    pub fn from_coefficients_in(var: usize, coeffs: &[MultiPoly], nvars: usize) -> MultiPoly {
        let mut out = MultiPoly::zero(nvars);
        for (k, c) in coeffs.iter().enumerate() {
            out = out.add(&c.shift(var, k as u32));
        }
        out
    }

    /// Substitute `x_var := q`.
    pub fn substitute(&self, var: usize, q: &MultiPoly) -> MultiPoly {
        let coeffs = self.coefficients_in(var);
        let mut out = MultiPoly::zero(self.nvars);
        // Horner
        for c in coeffs.iter().rev() {
            out = out.mul(q).add(c);
        }
        out
    }

    /// Substitute a constant for `x_var`.
    pub fn substitute_value(&self, var: usize, v: &Rat) -> MultiPoly {
        self.substitute(var, &MultiPoly::constant(self.nvars, v.clone()))
    }

    /// Replace every variable by a polynomial in a (possibly different) ring.
    pub fn compose(&self, images: &[MultiPoly]) -> Result<MultiPoly> {
        if images.len() != self.nvars {
            return Err(Error::Dimension { expected: self.nvars, got: images.len() });
        }
        let target = images.first().map(|p| p.nvars).unwrap_or(0);
        let mut out = MultiPoly::zero(target);
        for (m, c) in &self.terms {
            let mut t = MultiPoly::constant(target, c.clone());
            for (img, &e) in images.iter().zip(m) {
                if e > 0 {
                    t = t.mul(&img.pow(e));
                }
            }
            out = out.add(&t);
        }
        Ok(out)
    }

    /// Drop to the variables listed in `keep` (others must not occur).
    pub fn restrict(&self, keep: &[usize]) -> Result<MultiPoly> {
        let mut out = MultiPoly::zero(keep.len());
        for (m, c) in &self.terms {
            if (0..self.nvars).any(|v| m[v] > 0 && !keep.contains(&v)) {
                return Err(Error::invalid("polynomial uses a dropped variable"));
            }
            out.add_term(keep.iter().map(|&v| m[v]).collect(), c.clone());
        }
        Ok(out)
    }

    /// Re-embed into `nvars` variables, sending variable `i` to `map[i]`.
    pub fn embed(&self, nvars: usize, map: &[usize]) -> MultiPoly {
        let mut out = MultiPoly::zero(nvars);
        for (m, c) in &self.terms {
            let mut e = vec![0; nvars];
            for (i, &k) in m.iter().enumerate() {
                e[map[i]] += k;
            }
            out.add_term(e, c.clone());
        }
        out
    }

    pub fn is_integral(&self) -> bool {
        self.terms.values().all(|c| c.is_integer())
    }

    /// `(d, d * self)` with `d > 0` the least common denominator.
    pub fn integerize(&self) -> (BigInt, MultiPoly) {
        let d = denominator_lcm(self.terms.values());
        (d.clone(), self.scale(&Rat::from_integer(d)))
    }

    /// Gcd of the (integer) coefficients; zero for the zero polynomial.
    pub fn integer_content(&self) -> BigInt {
        let (_, p) = self.integerize();
        p.terms.values().fold(BigInt::zero(), |g, c| g.gcd(&c.to_integer()))
    }

    /// Scale to integer coefficients with gcd 1 and positive leading term.
    pub fn primitive_normalized(&self) -> MultiPoly {
        if self.is_zero() {
            return self.clone();
        }
        let (_, p) = self.integerize();
        let g = p.integer_content();
        let mut q = p.scale(&Rat::new(BigInt::one(), g));
        if q.leading().is_some_and(|(_, c)| c.is_negative()) {
            q = q.neg();
        }
        q
    }

    /// Largest absolute value of a coefficient.
    pub fn max_abs_coefficient(&self) -> Rat {
        self.terms.values().map(|c| c.abs()).max().unwrap_or_else(Rat::zero)
    }

    pub fn display_with(&self, names: &[String]) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut s = String::new();
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if i == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let is_const = m.iter().all(|&e| e == 0);
            let mut parts: Vec<String> = Vec::new();
            if !a.is_one() || is_const {
                parts.push(a.to_string());
            }
            for (v, &e) in m.iter().enumerate() {
                let name = names.get(v).cloned().unwrap_or_else(|| format!("x{}", v + 1));
                match e {
                    0 => {}
                    1 => parts.push(name),
                    _ => parts.push(format!("{name}^{e}")),
                }
            }
            s.push_str(&parts.join("*"));
        }
        s
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_with(&[]))
    }
}

#[inline]
fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// Residue of a rational modulo `m`; the denominator must be a unit mod m.
pub fn rat_mod(c: &Rat, m: u64) -> Result<u64> {
    let mb = BigInt::from(m);
    let n = c.numer().mod_floor(&mb).to_u64().expect("residue");
    let d = c.denom().mod_floor(&mb).to_u64().expect("residue");
    let inv = inv_mod(d, m).ok_or_else(|| Error::MisScopedModulus { modulus: m.to_string() })?;
    Ok(mulmod(n, inv, m))
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let e = (a as i128).extended_gcd(&(m as i128));
    if e.gcd != 1 {
        return None;
    }
    Some(e.x.rem_euclid(m as i128) as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat, rint};

    #[test]
    fn eval_examples() {
        let x = MultiPoly::var(1, 0);
        let p = x.pow(2).add(&MultiPoly::from_int(1, 1));
        assert_eq!(p.eval(&[rint(2)]).unwrap(), rint(5));
        assert_eq!(MultiPoly::zero(3).eval(&[rint(1), rint(2), rint(3)]).unwrap(), rint(0));
        let (a, b, c) = (MultiPoly::var(3, 0), MultiPoly::var(3, 1), MultiPoly::var(3, 2));
        let q = a.mul(&b).sub(&c);
        assert_eq!(q.eval(&[rint(2), rint(3), rint(6)]).unwrap(), rint(0));
        assert!(q.eval(&[rint(1)]).is_err());
    }

    #[test]
    fn substitution_and_coefficients() {
        let (x, y) = (MultiPoly::var(2, 0), MultiPoly::var(2, 1));
        let p = x.mul(&y).add(&y.pow(2)).add(&MultiPoly::from_int(2, 3));
        let co = p.coefficients_in(1);
        assert_eq!(co.len(), 3);
        assert_eq!(co[1], x);
        assert_eq!(MultiPoly::from_coefficients_in(1, &co, 2), p);
        let s = p.substitute(1, &x.add(&MultiPoly::from_int(2, 1)));
        let v = s.eval(&[rint(2), rint(100)]).unwrap();
        assert_eq!(v, p.eval(&[rint(2), rint(3)]).unwrap());
    }

    #[test]
    fn modular_reduction() {
        let p = MultiPoly::var(1, 0).scale(&rat(1, 2));
        assert_eq!(p.eval_mod(&[3], 5).unwrap(), 4);
        assert!(p.eval_mod(&[3], 4).is_err());
    }

    #[test]
    fn normalization() {
        let x = MultiPoly::var(1, 0);
        let p = x.scale(&rat(-2, 3)).add(&MultiPoly::constant(1, rat(4, 3)));
        assert_eq!(p.primitive_normalized().display_with(&["x".into()]), "x - 2");
    }
}
