//! Exact linear algebra over the rationals and the integers: echelon forms,
//! nullspaces, and Hermite-style bases of finitely generated Z-modules.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::{denominator_lcm, Rat};

/// Row space kept in reduced echelon form; rows can be added one at a time.
#[derive(Debug, Clone)]
pub struct RowSpace {
    ncols: usize,
    rows: Vec<Vec<Rat>>,
    pivots: Vec<usize>,
}

impl RowSpace {
    pub fn new(ncols: usize) -> Self {
        RowSpace {
            ncols,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    /// Reduce `v` against the current rows (the residual is zero iff `v` is
    /// in the span).
    pub fn reduce(&self, v: &[Rat]) -> Vec<Rat> {
        let mut v = v.to_vec();
        for (row, &pc) in self.rows.iter().zip(&self.pivots) {
            if !v[pc].is_zero() {
                let c = v[pc].clone();
                for (x, r) in v.iter_mut().zip(row) {
                    if !r.is_zero() {
                        *x -= &c * r;
                    }
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &[Rat]) -> bool {
        self.reduce(v).iter().all(Zero::is_zero)
    }

    /// Insert a row; returns true iff the rank grew.
    pub fn insert(&mut self, v: &[Rat]) -> bool {
        assert_eq!(v.len(), self.ncols, "row length");
        let mut r = self.reduce(v);
        let Some(pc) = r.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = r[pc].recip();
        for x in r.iter_mut() {
            *x *= &inv;
        }
        for row in self.rows.iter_mut() {
            if !row[pc].is_zero() {
                let c = row[pc].clone();
                for (x, y) in row.iter_mut().zip(&r) {
                    if !y.is_zero() {
                        *x -= &c * y;
                    }
                }
            }
        }
        let at = self.pivots.partition_point(|&p| p < pc);
        self.rows.insert(at, r);
        self.pivots.insert(at, pc);
        true
    }

    pub fn rows(&self) -> &[Vec<Rat>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Basis of `{x : row . x = 0 for every row}`.
    pub fn nullspace(&self) -> Vec<Vec<Rat>> {
        let free: Vec<usize> = (0..self.ncols).filter(|c| !self.pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Rat::zero(); self.ncols];
                v[f] = Rat::one();
                for (row, &pc) in self.rows.iter().zip(&self.pivots) {
                    v[pc] = -row[f].clone();
                }
                v
            })
            .collect()
    }
}

pub fn rank(rows: &[Vec<Rat>], ncols: usize) -> usize {
    let mut rs = RowSpace::new(ncols);
    for r in rows {
        rs.insert(r);
    }
    rs.rank()
}

/// Nullspace basis of the matrix whose rows are `rows`.
pub fn nullspace(rows: &[Vec<Rat>], ncols: usize) -> Vec<Vec<Rat>> {
    let mut rs = RowSpace::new(ncols);
    for r in rows {
        rs.insert(r);
    }
    rs.nullspace()
}

/// Echelon basis over Z of the integer row span (Hermite-style, pivots
/// positive, entries above pivots reduced).
pub fn integer_echelon(rows: &[Vec<BigInt>], ncols: usize) -> Vec<Vec<BigInt>> {
    let mut m: Vec<Vec<BigInt>> = rows.iter().filter(|r| r.iter().any(|x| !x.is_zero())).cloned().collect();
    let mut out_row = 0;
    for col in 0..ncols {
        if out_row >= m.len() {
            break;
        }
        // gcd-combine all rows below out_row into a single pivot
        loop {
            let nz: Vec<usize> = (out_row..m.len()).filter(|&i| !m[i][col].is_zero()).collect();
            if nz.is_empty() {
                break;
            }
            let best = *nz.iter().min_by_key(|&&i| m[i][col].abs()).unwrap();
            m.swap(out_row, best);
            let mut done = true;
            for i in out_row + 1..m.len() {
                if m[i][col].is_zero() {
                    continue;
                }
                let q = m[i][col].div_floor(&m[out_row][col]);
                let pivot_row = m[out_row].clone();
                for (x, y) in m[i].iter_mut().zip(&pivot_row) {
                    *x -= &q * y;
                }
                if !m[i][col].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if m[out_row][col].is_zero() {
            continue;
        }
        if m[out_row][col].is_negative() {
            for x in m[out_row].iter_mut() {
                *x = -x.clone();
            }
        }
        let pivot_row = m[out_row].clone();
        for i in 0..out_row {
            let q = m[i][col].div_floor(&pivot_row[col]);
            if !q.is_zero() {
                for (x, y) in m[i].iter_mut().zip(&pivot_row) {
                    *x -= &q * y;
                }
            }
        }
        out_row += 1;
    }
    m.truncate(out_row);
    m.retain(|r| r.iter().any(|x| !x.is_zero()));
    m
}

/// Basis of the Z-module spanned by rational vectors.
pub fn lattice_basis(vectors: &[Vec<Rat>], ncols: usize) -> Vec<Vec<Rat>> {
    let den = denominator_lcm(vectors.iter().flatten());
    let scaled: Vec<Vec<BigInt>> = vectors
        .iter()
        .map(|v| v.iter().map(|x| (x * Rat::from_integer(den.clone())).to_integer()).collect())
        .collect();
    integer_echelon(&scaled, ncols)
        .into_iter()
        .map(|r| r.into_iter().map(|x| Rat::new(x, den.clone())).collect())
        .collect()
}

/// Coordinates of `v` in a lattice basis in echelon form, if `v` lies in the
/// rational span (the coordinates are integers iff `v` is in the lattice).
pub fn echelon_coordinates(basis: &[Vec<Rat>], v: &[Rat]) -> Option<Vec<Rat>> {
    let mut rest = v.to_vec();
    let mut coords = Vec::with_capacity(basis.len());
    for b in basis {
        let pc = b.iter().position(|x| !x.is_zero())?;
        let c = &rest[pc] / &b[pc];
        for (x, y) in rest.iter_mut().zip(b) {
            *x -= &c * y;
        }
        coords.push(c);
    }
    rest.iter().all(Zero::is_zero).then_some(coords)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat, rint};

    fn row(v: &[i64]) -> Vec<Rat> {
        v.iter().map(|&x| rint(x)).collect()
    }

    #[test]
    fn rank_and_nullspace() {
        let rows = vec![row(&[1, 2, 3]), row(&[2, 4, 6]), row(&[1, 0, 1])];
        assert_eq!(rank(&rows, 3), 2);
        let ns = nullspace(&rows, 3);
        assert_eq!(ns.len(), 1);
        for r in &rows {
            let dot: Rat = r.iter().zip(&ns[0]).map(|(a, b)| a * b).sum();
            assert!(dot.is_zero());
        }
    }

    #[test]
    fn lattice_of_half_integers() {
        let vs = vec![row(&[1, 0, 0]), row(&[0, 1, 0]), vec![rint(1), rint(1), rat(1, 2)]];
        let b = lattice_basis(&vs, 3);
        assert_eq!(b.len(), 3);
        let c = echelon_coordinates(&b, &[rint(0), rint(0), rat(1, 2)]).unwrap();
        assert!(c.iter().all(|x| x.is_integer()));
        let c = echelon_coordinates(&b, &[rint(0), rint(0), rat(1, 4)]).unwrap();
        assert!(!c.iter().all(|x| x.is_integer()));
    }

    #[test]
    fn integer_echelon_gcd() {
        let rows = vec![vec![BigInt::from(4), BigInt::from(0)], vec![BigInt::from(6), BigInt::from(1)]];
        let e = integer_echelon(&rows, 2);
        assert_eq!(e.len(), 2);
        assert_eq!(e[0][0], BigInt::from(2));
    }
}
