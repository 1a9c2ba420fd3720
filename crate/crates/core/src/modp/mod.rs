//! Reductions modulo squarefree integers: finite images, local densities,
//! ramified primes and point counts of varieties over prime fields.

mod census;
mod density;
mod image;
mod variety;

use std::fmt;

pub use census::{splitting_census, BezoutCheck, CensusRow, SplittingCensus};
pub use density::{
    beta_squarefree, count_nf, detect_ramified, local_density, BetaSquarefree, LocalDensity, RamifiedReport,
};
pub use image::{
    generate_image, sl_order, verify_strong_approx, ExpectedOrder, FiniteImage, StrongApprox, DEFAULT_IMAGE_CAP,
};
pub use variety::{enumerate_variety_mod_p, variety_points_mod_p, PolyModP, VarietyStrategy};

use crate::arith::primes::is_squarefree;
use crate::matgroup::MatrixQ;
use crate::poly::rat_mod;
use crate::error::{Error, Result};

/// An n x n matrix of residues modulo a squarefree `q`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MatrixModQ {
    q: u64,
    n: usize,
    entries: Vec<u64>,
}

#[inline]
fn mulmod(a: u64, b: u64, q: u64) -> u64 {
    ((a as u128 * b as u128) % q as u128) as u64
}

pub(crate) fn check_modulus(q: u64) -> Result<()> {
    if q == 0 || !is_squarefree(q) {
        return Err(Error::invalid(format!("modulus {q} is not a positive squarefree integer")));
    }
    Ok(())
}

impl MatrixModQ {
    pub fn identity(n: usize, q: u64) -> Self {
        let entries = (0..n * n).map(|k| if k / n == k % n { 1 % q } else { 0 }).collect();
        MatrixModQ { q, n, entries }
    }

    pub fn from_entries(n: usize, q: u64, entries: Vec<u64>) -> Result<Self> {
        check_modulus(q)?;
        if entries.len() != n * n {
            return Err(Error::Dimension { expected: n * n, got: entries.len() });
        }
        Ok(MatrixModQ { q, n, entries: entries.into_iter().map(|e| e % q).collect() })
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.entries[i * self.n + j]
    }

    pub fn mul(&self, o: &MatrixModQ) -> MatrixModQ {
        assert_eq!((self.n, self.q), (o.n, o.q));
        let n = self.n;
        let q = self.q;
        let mut e = vec![0u64; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.entries[i * n + k];
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    e[i * n + j] = (e[i * n + j] + mulmod(a, o.entries[k * n + j], q)) % q;
                }
            }
        }
        MatrixModQ { q, n, entries: e }
    }

    /// Reduce further modulo a divisor `d` of `q`.
    pub fn project(&self, d: u64) -> Result<MatrixModQ> {
        if d == 0 || self.q % d != 0 {
            return Err(Error::invalid(format!("{d} does not divide {}", self.q)));
        }
        Ok(MatrixModQ { q: d, n: self.n, entries: self.entries.iter().map(|e| e % d).collect() })
    }

    pub fn is_identity(&self) -> bool {
        *self == MatrixModQ::identity(self.n, self.q)
    }

    /// Determinant by Laplace expansion along rows (valid for composite
    /// moduli, unlike elimination).
    pub fn det(&self) -> u64 {
        fn rec(m: &MatrixModQ, row: usize, used: &mut [bool]) -> u64 {
            let (n, q) = (m.n, m.q);
            if row == n {
                return 1 % q;
            }
            let mut acc = 0u64;
            let mut left = 0;
            for col in 0..n {
                if used[col] {
                    continue;
                }
                let a = m.get(row, col);
                if a != 0 {
                    used[col] = true;
                    let t = mulmod(a, rec(m, row + 1, used), q);
                    used[col] = false;
                    acc = if left % 2 == 0 { (acc + t) % q } else { (acc + q - t) % q };
                }
                left += 1;
            }
            acc
        }
        rec(self, 0, &mut vec![false; self.n])
    }
}

impl fmt::Display for MatrixModQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.n {
            if i > 0 {
                write!(f, ", ")?;
            }
            let row: Vec<String> = (0..self.n).map(|j| self.get(i, j).to_string()).collect();
            write!(f, "[{}]", row.join(", "))?;
        }
        write!(f, "] mod {}", self.q)
    }
}

/// Entrywise reduction of a rational matrix modulo a squarefree `q`.
pub fn reduce_mod(g: &MatrixQ, q: u64) -> Result<MatrixModQ> {
    check_modulus(q)?;
    let entries = g
        .entries()
        .iter()
        .map(|c| rat_mod(c, q).map_err(|_| Error::MisScopedModulus { modulus: q.to_string() }))
        .collect::<Result<Vec<_>>>()?;
    Ok(MatrixModQ { q, n: g.dim(), entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat, rint};

    #[test]
    fn reduction_examples() {
        assert!(reduce_mod(&MatrixQ::identity(2), 15).unwrap().is_identity());
        assert!(reduce_mod(&MatrixQ::from_ints(&[&[1, 2], &[0, 1]]), 2).unwrap().is_identity());
        let half = MatrixQ::from_rows(vec![vec![rint(1), rat(1, 2)], vec![rint(0), rint(1)]]).unwrap();
        assert!(matches!(reduce_mod(&half, 2), Err(Error::MisScopedModulus { .. })));
        assert_eq!(reduce_mod(&half, 3).unwrap().get(0, 1), 2);
        assert!(reduce_mod(&MatrixQ::identity(2), 12).is_err());
    }

    #[test]
    fn multiplicative_and_crt() {
        let a = MatrixQ::from_ints(&[&[5, 2], &[2, 1]]);
        let b = MatrixQ::from_ints(&[&[1, 7], &[-3, -20]]);
        for q in [2u64, 15, 35, 30] {
            let lhs = reduce_mod(&(&a * &b), q).unwrap();
            assert_eq!(lhs, reduce_mod(&a, q).unwrap().mul(&reduce_mod(&b, q).unwrap()));
        }
        let r = reduce_mod(&a, 15).unwrap();
        assert_eq!(r.project(3).unwrap(), reduce_mod(&a, 3).unwrap());
        assert_eq!(reduce_mod(&a, 7).unwrap().det(), 1);
        let m = MatrixQ::from_ints(&[&[2, 0, 1], &[1, 3, 0], &[0, 1, 1]]);
        assert_eq!(reduce_mod(&m, 1009).unwrap().det(), 7);
    }
}
