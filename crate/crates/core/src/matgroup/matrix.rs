use std::fmt;
use std::ops::Mul;

use num_traits::{One, Signed, Zero};

use crate::arith::{denominator_lcm, padic_abs, Int, PrimeSet, Rat};
use crate::error::{Error, Result};

/// Square matrix with exact rational entries, stored row-major.
///
/// Equality and hashing are on the reduced entries, so two products that
/// land on the same group element always collide.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MatrixQ {
    n: usize,
    entries: Vec<Rat>,
}

impl MatrixQ {
    pub fn identity(n: usize) -> Self {
        let mut entries = vec![Rat::zero(); n * n];
        for i in 0..n {
            entries[i * n + i] = Rat::one();
        }
        MatrixQ { n, entries }
    }

    pub fn zero(n: usize) -> Self {
        MatrixQ {
            n,
            entries: vec![Rat::zero(); n * n],
        }
    }

    /// Build from rows; the rows must form a square array. Singular input is
    /// accepted here (nilpotent logarithms are singular); group code calls
    /// [`MatrixQ::invertible`].
    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::invalid("empty matrix"));
        }
        let mut entries = Vec::with_capacity(n * n);
        for r in rows {
            if r.len() != n {
                return Err(Error::Dimension { expected: n, got: r.len() });
            }
            entries.extend(r);
        }
        Ok(MatrixQ { n, entries })
    }

    pub fn from_ints(rows: &[&[i64]]) -> Self {
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|&x| Rat::from_integer(x.into())).collect())
            .collect();
        MatrixQ::from_rows(rows).expect("square integer matrix")
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Rat {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rat) {
        self.entries[i * self.n + j] = v;
    }

    pub fn entries(&self) -> &[Rat] {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<Rat>> {
        self.entries.chunks(self.n).map(|c| c.to_vec()).collect()
    }

    pub fn is_identity(&self) -> bool {
        *self == MatrixQ::identity(self.n)
    }

    pub fn transpose(&self) -> MatrixQ {
        let n = self.n;
        let mut t = MatrixQ::zero(n);
        for i in 0..n {
            for j in 0..n {
                t.entries[j * n + i] = self.entries[i * n + j].clone();
            }
        }
        t
    }

    pub fn trace(&self) -> Rat {
        (0..self.n).map(|i| self.get(i, i).clone()).sum()
    }

    pub fn scale(&self, c: &Rat) -> MatrixQ {
        MatrixQ {
            n: self.n,
            entries: self.entries.iter().map(|x| x * c).collect(),
        }
    }

    pub fn add(&self, other: &MatrixQ) -> MatrixQ {
        assert_eq!(self.n, other.n);
        MatrixQ {
            n: self.n,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &MatrixQ) -> MatrixQ {
        assert_eq!(self.n, other.n);
        MatrixQ {
            n: self.n,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn mul_vec(&self, v: &[Rat]) -> Result<Vec<Rat>> {
        if v.len() != self.n {
            return Err(Error::Dimension { expected: self.n, got: v.len() });
        }
        Ok(self
            .entries
            .chunks(self.n)
            .map(|row| row.iter().zip(v).filter(|(a, _)| !a.is_zero()).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn pow(&self, e: u32) -> MatrixQ {
        let mut acc = MatrixQ::identity(self.n);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Integer power, negative exponents via the inverse.
    pub fn powi(&self, e: i64) -> Result<MatrixQ> {
        if e >= 0 {
            Ok(self.pow(e as u32))
        } else {
            Ok(self.inverse()?.pow((-e) as u32))
        }
    }

    /// Determinant by fraction-keeping Gaussian elimination.
    pub fn det(&self) -> Rat {
        let n = self.n;
        let mut a = self.rows();
        let mut det = Rat::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&r| !a[r][c].is_zero()) else {
                return Rat::zero();
            };
            if p != c {
                a.swap(p, c);
                det = -det;
            }
            let piv = a[c][c].clone();
            det *= &piv;
            for r in c + 1..n {
                if a[r][c].is_zero() {
                    continue;
                }
                let f = &a[r][c] / &piv;
                let pivot_row = a[c].clone();
                for (x, y) in a[r].iter_mut().zip(&pivot_row) {
                    *x -= &f * y;
                }
            }
        }
        det
    }

    pub fn invertible(&self) -> bool {
        !self.det().is_zero()
    }

    /// Exact inverse by Gauss-Jordan elimination.
    pub fn inverse(&self) -> Result<MatrixQ> {
        let n = self.n;
        let mut a = self.rows();
        let mut inv = MatrixQ::identity(n).rows();
        for c in 0..n {
            let p = (c..n)
                .find(|&r| !a[r][c].is_zero())
                .ok_or_else(|| Error::invalid("singular matrix has no inverse"))?;
            a.swap(p, c);
            inv.swap(p, c);
            let piv = a[c][c].recip();
            for x in a[c].iter_mut() {
                *x *= &piv;
            }
            for x in inv[c].iter_mut() {
                *x *= &piv;
            }
            for r in 0..n {
                if r == c || a[r][c].is_zero() {
                    continue;
                }
                let f = a[r][c].clone();
                let (ar, ac) = (a[r].clone(), a[c].clone());
                a[r] = ar.iter().zip(&ac).map(|(x, y)| x - &f * y).collect();
                let (ir, ic) = (inv[r].clone(), inv[c].clone());
                inv[r] = ir.iter().zip(&ic).map(|(x, y)| x - &f * y).collect();
            }
        }
        MatrixQ::from_rows(inv)
    }

    /// Group commutator `a^-1 b^-1 a b`.
    pub fn commutator(a: &MatrixQ, b: &MatrixQ) -> Result<MatrixQ> {
        Ok(&(&(&a.inverse()? * &b.inverse()?) * a) * b)
    }

    pub fn max_abs_entry(&self) -> Rat {
        self.entries.iter().map(|x| x.abs()).max().unwrap_or_else(Rat::zero)
    }

    /// Largest p-adic absolute value among the entries.
    pub fn max_padic_entry(&self, p: u64) -> Rat {
        self.entries.iter().map(|x| padic_abs(x, p)).max().unwrap_or_else(Rat::zero)
    }

    pub fn denominator_lcm(&self) -> Int {
        denominator_lcm(self.entries.iter())
    }

    pub fn is_strictly_upper(&self) -> bool {
        let n = self.n;
        (0..n).all(|i| (0..=i).all(|j| self.get(i, j).is_zero()))
    }

    pub fn is_upper_unipotent(&self) -> bool {
        let n = self.n;
        (0..n).all(|i| {
            self.get(i, i).is_one() && (0..i).all(|j| self.get(i, j).is_zero())
        })
    }

    /// Archimedean part of [`s_norm`]: `n * max |entry|`.
    pub fn archimedean_surrogate(&self) -> Rat {
        Rat::from_integer((self.n as i64).into()) * self.max_abs_entry()
    }
}

/// Computable stand-in for `max(||g||, ||g||_p : p in S)`.
///
/// The archimedean operator norm is replaced by `n * max |entry|`, an upper
/// bound that is still submultiplicative; the p-adic parts are exact.
pub fn s_norm(g: &MatrixQ, s: &PrimeSet) -> Rat {
    let mut best = g.archimedean_surrogate();
    for p in s.iter() {
        let v = g.max_padic_entry(p);
        if v > best {
            best = v;
        }
    }
    best
}

impl Mul for &MatrixQ {
    type Output = MatrixQ;

    fn mul(self, rhs: &MatrixQ) -> MatrixQ {
        assert_eq!(self.n, rhs.n, "matrix dimensions");
        let n = self.n;
        let mut out = vec![Rat::zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = &self.entries[i * n + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = &rhs.entries[k * n + j];
                    if !b.is_zero() {
                        out[i * n + j] += a * b;
                    }
                }
            }
        }
        MatrixQ { n, entries: out }
    }
}

impl fmt::Display for MatrixQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, row) in self.entries.chunks(self.n).enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for (j, x) in row.iter().enumerate() {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// Embed the affine map `x -> A x + b` as the block matrix `[[A, b], [0, 1]]`.
pub fn affine_embed(a: &MatrixQ, b: &[Rat]) -> Result<MatrixQ> {
    let n = a.dim();
    if b.len() != n {
        return Err(Error::Dimension { expected: n, got: b.len() });
    }
    if !a.invertible() {
        return Err(Error::invalid("linear part of an affine motion must be invertible"));
    }
    let mut m = MatrixQ::zero(n + 1);
    for i in 0..n {
        for j in 0..n {
            m.set(i, j, a.get(i, j).clone());
        }
        m.set(i, n, b[i].clone());
    }
    m.set(n, n, Rat::one());
    Ok(m)
}
