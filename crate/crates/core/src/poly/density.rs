//! Bounded-degree Zariski density of a finite point set.

use super::MultiPoly;
use crate::arith::Rat;
use crate::error::{Error, Result};
use crate::linalg::RowSpace;
use num_traits::{One, Zero};

/// Exponent vectors of total degree at most `d` in `k` variables, by degree
/// and then lexicographically.
pub fn monomials_up_to(k: usize, d: u32) -> Vec<Vec<u32>> {
    fn rec(k: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == k {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for e in (0..=left).rev() {
            cur.push(e);
            rec(k, left - e, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    for deg in 0..=d {
        rec(k, deg, &mut Vec::new(), &mut out);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DensityVerdict {
    /// Every polynomial of degree at most D vanishing on the points lies in
    /// the supplied ambient span.
    Dense,
    /// A polynomial outside the ambient span vanishes on the points.
    NotDense { witness: MultiPoly },
    /// Fewer points than unknowns: a vanishing polynomial exists for
    /// counting reasons alone. `need` more points would be required.
    Inconclusive { need: usize, witness: MultiPoly },
}

impl DensityVerdict {
    pub fn is_dense(&self) -> bool {
        matches!(self, DensityVerdict::Dense)
    }

    pub fn label(&self) -> String {
        match self {
            DensityVerdict::Dense => "dense".into(),
            DensityVerdict::NotDense { .. } => "not-dense".into(),
            DensityVerdict::Inconclusive { need, .. } => format!("inconclusive(need {need} more points)"),
        }
    }

    pub fn witness(&self) -> Option<&MultiPoly> {
        match self {
            DensityVerdict::Dense => None,
            DensityVerdict::NotDense { witness } | DensityVerdict::Inconclusive { witness, .. } => Some(witness),
        }
    }
}

/// Decide whether the points impose independent conditions on polynomials
/// of degree at most `d`, modulo the degree-`d` part of the ideal generated
/// by `ambient` (as far as `basis * monomials` reaches).
pub fn zariski_density_test(points: &[Vec<Rat>], d: u32, ambient: &[MultiPoly]) -> Result<DensityVerdict> {
    let Some(first) = points.first() else {
        return Err(Error::invalid("density test needs at least one point"));
    };
    let k = first.len();
    if let Some(bad) = points.iter().find(|p| p.len() != k) {
        return Err(Error::Dimension { expected: k, got: bad.len() });
    }
    if let Some(bad) = ambient.iter().find(|p| p.nvars() != k) {
        return Err(Error::Dimension { expected: k, got: bad.nvars() });
    }
    let monos = monomials_up_to(k, d);
    let index: std::collections::HashMap<&Vec<u32>, usize> = monos.iter().enumerate().map(|(i, m)| (m, i)).collect();

    let mut amb = RowSpace::new(monos.len());
    for b in ambient.iter().filter(|b| !b.is_zero()) {
        let bd = b.total_degree();
        if bd > d {
            continue;
        }
        for mu in monos.iter().filter(|m| m.iter().sum::<u32>() + bd <= d) {
            let prod = b.mul(&MultiPoly::monomial(mu.clone(), Rat::one()));
            let mut row = vec![Rat::zero(); monos.len()];
            for (m, c) in prod.terms() {
                row[index[m]] = c.clone();
            }
            amb.insert(&row);
        }
    }

    let mut rows = RowSpace::new(monos.len());
    for p in points {
        if rows.rank() == monos.len() {
            break;
        }
        let row: Vec<Rat> = monos
            .iter()
            .map(|m| m.iter().zip(p).fold(Rat::one(), |acc, (&e, x)| acc * num_traits::pow(x.clone(), e as usize)))
            .collect();
        rows.insert(&row);
    }

    let to_poly = |v: &[Rat]| {
        MultiPoly::from_terms(k, monos.iter().cloned().zip(v.iter().cloned()))
    };
    let Some(w) = rows.nullspace().into_iter().find(|v| !amb.contains(v)) else {
        return Ok(DensityVerdict::Dense);
    };
    let witness = to_poly(&w).primitive_normalized();
    let unknowns = monos.len() - amb.rank();
    if points.len() < unknowns {
        Ok(DensityVerdict::Inconclusive { need: unknowns - points.len(), witness })
    } else {
        Ok(DensityVerdict::NotDense { witness })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rint;
    use crate::poly::PolyParser;

    fn pts(v: &[(i64, i64)]) -> Vec<Vec<Rat>> {
        v.iter().map(|&(a, b)| vec![rint(a), rint(b)]).collect()
    }

    #[test]
    fn examples() {
        let p = pts(&[(0, 0), (1, 1), (2, 4)]);
        assert!(zariski_density_test(&p, 1, &[]).unwrap().is_dense());
        let v = zariski_density_test(&p, 2, &[]).unwrap();
        assert!(!v.is_dense());
        let w = v.witness().unwrap();
        for q in &p {
            assert!(w.eval(q).unwrap().is_zero());
        }
        let v = zariski_density_test(&pts(&[(3, 7)]), 1, &[]).unwrap();
        assert_eq!(v.label(), "inconclusive(need 2 more points)");
        assert!(!v.is_dense());
    }

    #[test]
    fn ambient_filtering() {
        let par = PolyParser::new(&["x", "y"]);
        let parab = par.parse("y - x^2").unwrap();
        let p: Vec<Vec<Rat>> = (-4..=4).map(|t| vec![rint(t), rint(t * t)]).collect();
        assert!(zariski_density_test(&p, 2, &[parab.clone()]).unwrap().is_dense());
        assert!(zariski_density_test(&p, 3, &[parab]).unwrap().is_dense());
        assert_eq!(monomials_up_to(2, 2).len(), 6);
    }
}
