//! Dense univariate polynomials over Q and over F_p.

use num_traits::{One, Zero};

use super::MultiPoly;
use crate::arith::Rat;
use crate::error::{Error, Result};

/// Dense polynomial over Q, coefficients from degree 0 upward, no trailing
/// zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UPoly(pub Vec<Rat>);

impl UPoly {
    pub fn new(mut c: Vec<Rat>) -> Self {
        while c.last().is_some_and(Zero::is_zero) {
            c.pop();
        }
        UPoly(c)
    }

    pub fn zero() -> Self {
        UPoly(Vec::new())
    }

    pub fn constant(c: Rat) -> Self {
        UPoly::new(vec![c])
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn lead(&self) -> Rat {
        self.0.last().cloned().unwrap_or_else(Rat::zero)
    }

    /// From a multivariate polynomial that depends on `var` only.
    pub fn from_multi(p: &MultiPoly, var: usize) -> Result<Self> {
        if p.vars_used().iter().any(|&v| v != var) {
            return Err(Error::invalid("polynomial is not univariate in the chosen variable"));
        }
        Ok(UPoly::new(p.coefficients_in(var).iter().map(MultiPoly::constant_term).collect()))
    }

    pub fn to_multi(&self, nvars: usize, var: usize) -> MultiPoly {
        let mut out = MultiPoly::zero(nvars);
        for (k, c) in self.0.iter().enumerate() {
            if !c.is_zero() {
                let mut e = vec![0; nvars];
                e[var] = k as u32;
                out = out.add(&MultiPoly::monomial(e, c.clone()));
            }
        }
        out
    }

    pub fn add(&self, o: &UPoly) -> UPoly {
        let n = self.0.len().max(o.0.len());
        UPoly::new(
            (0..n)
                .map(|i| {
                    self.0.get(i).cloned().unwrap_or_else(Rat::zero) + o.0.get(i).cloned().unwrap_or_else(Rat::zero)
                })
                .collect(),
        )
    }

    pub fn neg(&self) -> UPoly {
        UPoly(self.0.iter().map(|c| -c).collect())
    }

    pub fn sub(&self, o: &UPoly) -> UPoly {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &UPoly) -> UPoly {
        if self.is_zero() || o.is_zero() {
            return UPoly::zero();
        }
        let mut c = vec![Rat::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        UPoly::new(c)
    }

    pub fn scale(&self, c: &Rat) -> UPoly {
        UPoly::new(self.0.iter().map(|x| x * c).collect())
    }

    pub fn div_rem(&self, d: &UPoly) -> (UPoly, UPoly) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let dd = d.degree().unwrap();
        let inv = d.lead().recip();
        let mut r = self.0.clone();
        if r.len() <= dd {
            return (UPoly::zero(), self.clone());
        }
        let mut q = vec![Rat::zero(); r.len() - dd];
        for k in (dd..r.len()).rev() {
            let c = &r[k] * &inv;
            if c.is_zero() {
                continue;
            }
            for (j, dc) in d.0.iter().enumerate() {
                r[k - dd + j] -= &c * dc;
            }
            q[k - dd] = c;
        }
        (UPoly::new(q), UPoly::new(r))
    }

    pub fn monic(&self) -> UPoly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&self.lead().recip())
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        self.0.iter().rev().fold(Rat::zero(), |acc, c| acc * x + c)
    }

    /// `(g, s, t)` with `s a + t b = g` and `g` monic (or zero).
    pub fn xgcd(a: &UPoly, b: &UPoly) -> (UPoly, UPoly, UPoly) {
        let (mut r0, mut r1) = (a.clone(), b.clone());
        let (mut s0, mut s1) = (UPoly::constant(Rat::one()), UPoly::zero());
        let (mut t0, mut t1) = (UPoly::zero(), UPoly::constant(Rat::one()));
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            let s2 = s0.sub(&q.mul(&s1));
            let t2 = t0.sub(&q.mul(&t1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s2);
            t0 = std::mem::replace(&mut t1, t2);
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let inv = r0.lead().recip();
        (r0.scale(&inv), s0.scale(&inv), t0.scale(&inv))
    }
}

// ---------------------------------------------------------------------------
// F_p arithmetic on dense coefficient vectors (degree 0 first)
// ---------------------------------------------------------------------------

#[inline]
fn mm(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn inv_p(a: u64, p: u64) -> u64 {
    crate::arith::primes::pow_mod(a, p - 2, p)
}

pub(crate) fn trim_p(mut v: Vec<u64>) -> Vec<u64> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

fn mul_p(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut c = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            c[i + j] = (c[i + j] + mm(x, y, p)) % p;
        }
    }
    trim_p(c)
}

fn rem_p(a: &[u64], d: &[u64], p: u64) -> Vec<u64> {
    let dd = d.len() - 1;
    let inv = inv_p(d[dd], p);
    let mut r = a.to_vec();
    while r.len() > dd {
        let k = r.len() - 1;
        let c = mm(r[k], inv, p);
        if c != 0 {
            for (j, &dc) in d.iter().enumerate() {
                r[k - dd + j] = (r[k - dd + j] + p - mm(c, dc, p)) % p;
            }
        }
        r.pop();
        r = trim_p(r);
    }
    r
}

fn div_p(a: &[u64], d: &[u64], p: u64) -> Vec<u64> {
    let dd = d.len() - 1;
    if a.len() <= dd {
        return Vec::new();
    }
    let inv = inv_p(d[dd], p);
    let mut r = a.to_vec();
    let mut q = vec![0u64; a.len() - dd];
    for k in (dd..r.len()).rev() {
        let c = mm(r[k], inv, p);
        if c == 0 {
            continue;
        }
        for (j, &dc) in d.iter().enumerate() {
            r[k - dd + j] = (r[k - dd + j] + p - mm(c, dc, p)) % p;
        }
        q[k - dd] = c;
    }
    trim_p(q)
}

fn gcd_p(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let (mut a, mut b) = (trim_p(a.to_vec()), trim_p(b.to_vec()));
    while !b.is_empty() {
        let r = rem_p(&a, &b, p);
        a = b;
        b = r;
    }
    if let Some(&l) = a.last() {
        let inv = inv_p(l, p);
        for x in a.iter_mut() {
            *x = mm(*x, inv, p);
        }
    }
    a
}

fn powmod_p(base: &[u64], mut e: u64, modulus: &[u64], p: u64) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut b = rem_p(base, modulus, p);
    while e > 0 {
        if e & 1 == 1 {
            acc = rem_p(&mul_p(&acc, &b, p), modulus, p);
        }
        b = rem_p(&mul_p(&b, &b, p), modulus, p);
        e >>= 1;
    }
    acc
}

fn eval_p(f: &[u64], x: u64, p: u64) -> u64 {
    f.iter().rev().fold(0, |acc, &c| (mm(acc, x, p) + c) % p)
}

/// Distinct roots in F_p of a nonzero polynomial (coefficients reduced mod
/// p, degree 0 first), in increasing order.
///
/// Uses `gcd(f, x^p - x)` and deterministic equal-degree splitting with the
/// shifts `(x + a)^((p-1)/2) - 1`, `a = 0, 1, 2, ...`.
pub fn roots_mod_p(f: &[u64], p: u64) -> Vec<u64> {
    let f = trim_p(f.iter().map(|&c| c % p).collect());
    assert!(!f.is_empty(), "roots of the zero polynomial");
    if f.len() == 1 {
        return Vec::new();
    }
    if p <= 64 || p <= 4 * f.len() as u64 {
        return (0..p).filter(|&x| eval_p(&f, x, p) == 0).collect();
    }
    let xp = powmod_p(&[0, 1], p, &f, p);
    let mut xp_minus_x = xp;
    xp_minus_x.resize(xp_minus_x.len().max(2), 0);
    xp_minus_x[1] = (xp_minus_x[1] + p - 1) % p;
    let g = gcd_p(&f, &trim_p(xp_minus_x), p);
    let mut roots = Vec::new();
    split_linear(&g, p, 0, &mut roots);
    roots.sort_unstable();
    roots
}

fn split_linear(g: &[u64], p: u64, mut shift: u64, out: &mut Vec<u64>) {
    match g.len() {
        0 | 1 => return,
        2 => {
            // g = g0 + g1 x
            out.push(mm(p - g[0] % p, inv_p(g[1], p), p) % p);
            return;
        }
        _ => {}
    }
    loop {
        let h = powmod_p(&[shift % p, 1], (p - 1) / 2, g, p);
        let mut hm1 = h;
        if hm1.is_empty() {
            hm1.push(0);
        }
        hm1[0] = (hm1[0] + p - 1) % p;
        let d = gcd_p(g, &trim_p(hm1), p);
        shift += 1;
        if d.len() > 1 && d.len() < g.len() {
            let other = div_p(g, &d, p);
            split_linear(&d, p, shift, out);
            split_linear(&other, p, shift, out);
            return;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rint, primes::primes_up_to};

    fn up(v: &[i64]) -> UPoly {
        UPoly::new(v.iter().map(|&x| rint(x)).collect())
    }

    #[test]
    fn xgcd_identity() {
        let a = up(&[0, 0, 1]);
        let b = up(&[1, 1]);
        let (g, s, t) = UPoly::xgcd(&a, &b);
        assert_eq!(g, up(&[1]));
        assert_eq!(s.mul(&a).add(&t.mul(&b)), g);
    }

    #[test]
    fn roots_match_brute_force() {
        for p in primes_up_to(400) {
            for f in [vec![1i64, 0, 1], vec![-2, 0, 0, 1], vec![6, -5, 1], vec![3, 1, 4, 1, 5]] {
                let fp: Vec<u64> = f.iter().map(|&c| c.rem_euclid(p as i64) as u64).collect();
                if trim_p(fp.clone()).is_empty() {
                    continue;
                }
                let brute: Vec<u64> = (0..p).filter(|&x| eval_p(&trim_p(fp.clone()), x, p) == 0).collect();
                assert_eq!(roots_mod_p(&fp, p), brute, "p={p} f={f:?}");
            }
        }
    }
}
