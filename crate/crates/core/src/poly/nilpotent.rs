//! Exponential and logarithm on unipotent upper-triangular matrices, and
//! lattice coordinates for finitely generated unipotent groups.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::MultiPoly;
use crate::arith::{padic_valuation, prime_support, primes::primes_up_to, FactorBudget, Rat};
use crate::error::{Error, Result};
use crate::linalg::{echelon_coordinates, lattice_basis, RowSpace};
use crate::matgroup::MatrixQ;

fn factorial(k: usize) -> Rat {
    Rat::from_integer((1..=k as u64).map(BigInt::from).product())
}

pub fn nilpotent_exp(x: &MatrixQ) -> Result<MatrixQ> {
    if !x.is_strictly_upper() {
        return Err(Error::invalid("exp needs a strictly upper triangular matrix"));
    }
    let n = x.dim();
    let mut acc = MatrixQ::identity(n);
    let mut pw = MatrixQ::identity(n);
    for k in 1..n {
        pw = &pw * x;
        acc = acc.add(&pw.scale(&factorial(k).recip()));
    }
    Ok(acc)
}

pub fn nilpotent_log(u: &MatrixQ) -> Result<MatrixQ> {
    if !u.is_upper_unipotent() {
        return Err(Error::invalid("log needs a unipotent upper triangular matrix"));
    }
    let n = u.dim();
    let x = u.sub(&MatrixQ::identity(n));
    let mut acc = MatrixQ::zero(n);
    let mut pw = MatrixQ::identity(n);
    for k in 1..n {
        pw = &pw * &x;
        let c = Rat::new(if k % 2 == 1 { BigInt::one() } else { -BigInt::one() }, BigInt::from(k));
        acc = acc.add(&pw.scale(&c));
    }
    Ok(acc)
}

/// Strictly-upper entries in row-major order `(0,1), (0,2), ..., (n-2,n-1)`.
pub fn upper_coordinates(x: &MatrixQ) -> Vec<Rat> {
    let n = x.dim();
    let mut v = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            v.push(x.get(i, j).clone());
        }
    }
    v
}

pub fn from_upper_coordinates(n: usize, v: &[Rat]) -> MatrixQ {
    let mut m = MatrixQ::zero(n);
    let mut k = 0;
    for i in 0..n {
        for j in i + 1..n {
            m.set(i, j, v[k].clone());
            k += 1;
        }
    }
    m
}

/// `h` lies in `{h : N^(j-i) h_ij in Z}` (unipotent upper triangular).
pub fn in_integral_form(h: &MatrixQ, conj: &BigInt) -> bool {
    if !h.is_upper_unipotent() {
        return false;
    }
    let n = h.dim();
    (0..n).all(|i| {
        (i + 1..n).all(|j| (h.get(i, j) * Rat::from_integer(conj.pow((j - i) as u32))).is_integer())
    })
}

/// Least `N > 0` with `N^(j-i) g_ij` integral for every generator.
pub fn conjugation_modulus(gens: &[MatrixQ]) -> Result<BigInt> {
    let mut need: std::collections::BTreeMap<u64, i64> = Default::default();
    for g in gens {
        let n = g.dim();
        for i in 0..n {
            for j in i + 1..n {
                let d = g.get(i, j).denom().clone();
                if d.is_one() {
                    continue;
                }
                let (ps, large) = prime_support(&d, &FactorBudget::default())?;
                if !large.is_empty() {
                    return Err(Error::invalid("denominator prime beyond 64 bits"));
                }
                for p in ps.iter() {
                    let v = -padic_valuation(g.get(i, j), p)?;
                    let e = (v + (j - i) as i64 - 1) / (j - i) as i64;
                    let slot = need.entry(p).or_insert(0);
                    *slot = (*slot).max(e);
                }
            }
        }
    }
    Ok(need.into_iter().map(|(p, e)| BigInt::from(p).pow(e as u32)).product())
}

/// True if `p` takes integer values on all of `Z^k`.
///
/// Exact: a polynomial of degree `d_v` in each variable is integer-valued iff
/// it is integral on the grid `prod_v {0..d_v}` (Newton basis).
pub fn is_integer_valued(p: &MultiPoly) -> bool {
    let vars = p.vars_used();
    let degs: Vec<u32> = vars.iter().map(|&v| p.degree_in(v)).collect();
    let total: usize = degs.iter().map(|&d| d as usize + 1).product();
    let mut point = vec![Rat::zero(); p.nvars()];
    for idx in 0..total {
        let mut r = idx;
        for (k, &v) in vars.iter().enumerate() {
            let base = degs[k] as usize + 1;
            point[v] = Rat::from_integer(BigInt::from(r % base));
            r /= base;
        }
        if !p.eval(&point).expect("arity").is_integer() {
            return false;
        }
    }
    true
}

/// Entries (row-major) of `exp(m * sum_k c_k basis_k)` as polynomials in the
/// lattice coordinates `c`.
pub fn exp_map(basis: &[MatrixQ], n: usize, scale: &BigInt) -> Vec<MultiPoly> {
    let k = basis.len();
    let ms = Rat::from_integer(scale.clone());
    let x: Vec<MultiPoly> = (0..n * n)
        .map(|e| {
            let mut p = MultiPoly::zero(k);
            for (v, b) in basis.iter().enumerate() {
                let c = &b.entries()[e] * &ms;
                if !c.is_zero() {
                    p = p.add(&MultiPoly::var(k, v).scale(&c));
                }
            }
            p
        })
        .collect();
    let mul = |a: &[MultiPoly], b: &[MultiPoly]| -> Vec<MultiPoly> {
        let mut out = vec![MultiPoly::zero(k); n * n];
        for i in 0..n {
            for j in 0..n {
                let mut s = MultiPoly::zero(k);
                for l in 0..n {
                    let (u, w) = (&a[i * n + l], &b[l * n + j]);
                    if !u.is_zero() && !w.is_zero() {
                        s = s.add(&u.mul(w));
                    }
                }
                out[i * n + j] = s;
            }
        }
        out
    };
    let mut acc: Vec<MultiPoly> = (0..n * n)
        .map(|e| if e / n == e % n { MultiPoly::one(k) } else { MultiPoly::zero(k) })
        .collect();
    let mut pw = acc.clone();
    for t in 1..n {
        pw = mul(&pw, &x);
        let inv = factorial(t).recip();
        for (a, p) in acc.iter_mut().zip(&pw) {
            *a = a.add(&p.scale(&inv));
        }
    }
    acc
}

/// Lattice `Lambda` in the Lie algebra and a scale `m` with
/// `exp(m Lambda)` inside the integral form of conjugation modulus `N`.
#[derive(Debug, Clone)]
pub struct NilpotentLog {
    pub n: usize,
    /// Echelon Z-basis of the lattice spanned by the collected logarithms.
    pub basis: Vec<MatrixQ>,
    pub scale: BigInt,
    /// `N` of the integral form `{N^(j-i) h_ij in Z}`.
    pub conjugation: BigInt,
    /// Polynomial entries of `c -> exp(scale * sum c_k basis_k)`.
    pub exp_map: Vec<MultiPoly>,
    /// Group elements whose logarithms were collected.
    pub sampled_elements: usize,
    /// Scales rejected before `scale` passed the integrality check.
    pub rejected_scales: Vec<BigInt>,
}

impl NilpotentLog {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// `exp(scale * sum c_k basis_k)`.
    pub fn point(&self, c: &[BigInt]) -> Result<MatrixQ> {
        if c.len() != self.dim() {
            return Err(Error::Dimension { expected: self.dim(), got: c.len() });
        }
        let x: Vec<Rat> = c.iter().map(|v| Rat::from_integer(v.clone())).collect();
        let rows = (0..self.n)
            .map(|i| (0..self.n).map(|j| self.exp_map[i * self.n + j].eval(&x)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        MatrixQ::from_rows(rows)
    }

    /// Lattice coordinates of `u` relative to the scaled basis, if `log u`
    /// lies in the rational span.
    pub fn coordinates(&self, u: &MatrixQ) -> Result<Option<Vec<Rat>>> {
        let l = nilpotent_log(u)?.scale(&Rat::from_integer(self.scale.clone()).recip());
        let basis: Vec<Vec<Rat>> = self.basis.iter().map(upper_coordinates).collect();
        Ok(echelon_coordinates(&basis, &upper_coordinates(&l)))
    }
}

fn divisors_sorted(n: &BigInt, primes: &[u64]) -> Vec<BigInt> {
    let mut divs = vec![BigInt::one()];
    for &p in primes {
        let pb = BigInt::from(p);
        let mut e = 0u32;
        let mut t = n.clone();
        while (&t % &pb).is_zero() {
            t /= &pb;
            e += 1;
        }
        let mut next = Vec::new();
        for d in &divs {
            for k in 0..=e {
                next.push(d * pb.pow(k));
            }
        }
        divs = next;
    }
    divs.sort();
    divs
}

fn collect_elements(gens: &[MatrixQ], rounds: usize, cap: usize) -> Result<Vec<MatrixQ>> {
    let mut seen: BTreeSet<MatrixQ> = gens.iter().cloned().collect();
    let mut frontier: Vec<MatrixQ> = gens.to_vec();
    for _ in 0..rounds {
        let mut next = Vec::new();
        for g in &frontier {
            for h in gens {
                for c in [g * h, MatrixQ::commutator(g, h)?] {
                    if !c.is_identity() && seen.insert(c.clone()) {
                        next.push(c);
                    }
                }
            }
        }
        if seen.len() > cap {
            return Err(Error::resource("malcev_lattice", format!("more than {cap} sampled elements")));
        }
        frontier = next;
    }
    Ok(seen.into_iter().collect())
}

/// Lattice coordinates for the group generated by `gens`.
///
/// `Lambda_0` is the Z-span of the logarithms of the generators and of their
/// products and commutators up to the nilpotency class; its rational span
/// must be closed under brackets. The scale is the least divisor of
/// `lcm(1..n-1)^n`, then the least multiple of it, for which every entry of
/// the exponential map is integer-valued after the `N` conjugation.
pub fn malcev_lattice(gens: &[MatrixQ]) -> Result<NilpotentLog> {
    let Some(first) = gens.first() else {
        return Err(Error::invalid("no generators"));
    };
    let n = first.dim();
    if gens.iter().any(|g| g.dim() != n) {
        return Err(Error::invalid("generators of different sizes"));
    }
    if gens.iter().any(|g| !g.is_upper_unipotent()) {
        return Err(Error::invalid(
            "generators are not jointly triangularizable in the declared basis (not unipotent upper triangular)",
        ));
    }
    let conj = conjugation_modulus(gens)?;
    let elements = collect_elements(gens, n.saturating_sub(1), 100_000)?;
    let ncols = n * (n - 1) / 2;
    let logs: Vec<Vec<Rat>> = elements
        .iter()
        .map(|g| nilpotent_log(g).map(|l| upper_coordinates(&l)))
        .collect::<Result<_>>()?;
    let basis_vecs = lattice_basis(&logs, ncols);
    let basis: Vec<MatrixQ> = basis_vecs.iter().map(|v| from_upper_coordinates(n, v)).collect();

    let mut span = RowSpace::new(ncols);
    for v in &basis_vecs {
        span.insert(v);
    }
    for a in &basis {
        for b in &basis {
            let br = (a * b).sub(&(b * a));
            if !span.contains(&upper_coordinates(&br)) {
                return Err(Error::Inconclusive(
                    "span of the collected logarithms is not closed under brackets".into(),
                ));
            }
        }
    }
    for g in gens {
        if nilpotent_exp(&nilpotent_log(g)?)? != *g {
            return Err(Error::invalid("exp(log g) != g"));
        }
    }

    let small: Vec<u64> = primes_up_to(n.saturating_sub(1) as u64);
    let l = (1..n.max(2) as u64).fold(BigInt::one(), |acc, k| acc.lcm(&BigInt::from(k)));
    let bound = l.pow(n as u32);
    let mut candidates = divisors_sorted(&bound, &small);
    candidates.extend((2..=64u32).map(|t| &bound * t));

    let mut rejected = Vec::new();
    for m in candidates {
        let map = exp_map(&basis, n, &m);
        let ok = (0..n).all(|i| {
            (i + 1..n).all(|j| {
                let w = Rat::from_integer(conj.pow((j - i) as u32));
                is_integer_valued(&map[i * n + j].scale(&w))
            })
        });
        if ok {
            return Ok(NilpotentLog {
                n,
                basis,
                scale: m,
                conjugation: conj,
                exp_map: map,
                sampled_elements: elements.len(),
                rejected_scales: rejected,
            });
        }
        rejected.push(m);
    }
    Err(Error::resource(
        "malcev_lattice",
        format!("no scale up to 64 lcm(1..n-1)^n; last tried {}", rejected.last().map(|m| m.to_string()).unwrap_or_default()),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat, rint};
    use proptest::prelude::*;

    fn e(n: usize, i: usize, j: usize) -> MatrixQ {
        let mut m = MatrixQ::zero(n);
        m.set(i, j, rint(1));
        m
    }

    #[test]
    fn exp_log_examples() {
        assert_eq!(nilpotent_log(&MatrixQ::identity(3)).unwrap(), MatrixQ::zero(3));
        assert_eq!(nilpotent_exp(&e(2, 0, 1)).unwrap(), MatrixQ::from_ints(&[&[1, 1], &[0, 1]]));
        let u = MatrixQ::from_rows(vec![
            vec![rint(1), rint(1), rat(1, 2)],
            vec![rint(0), rint(1), rint(1)],
            vec![rint(0), rint(0), rint(1)],
        ])
        .unwrap();
        assert_eq!(nilpotent_log(&u).unwrap(), e(3, 0, 1).add(&e(3, 1, 2)));
        assert!(nilpotent_log(&MatrixQ::from_ints(&[&[2, 0], &[0, 1]])).is_err());
        assert!(nilpotent_exp(&MatrixQ::identity(2)).is_err());
    }

    #[test]
    fn malcev_examples() {
        let x = nilpotent_exp(&e(2, 0, 1)).unwrap();
        let lat = malcev_lattice(&[x]).unwrap();
        assert_eq!(lat.basis, vec![e(2, 0, 1)]);
        assert_eq!(lat.scale, BigInt::one());

        let x = nilpotent_exp(&e(3, 0, 1)).unwrap();
        let y = nilpotent_exp(&e(3, 1, 2)).unwrap();
        let lat = malcev_lattice(&[x.clone(), y.clone()]).unwrap();
        assert_eq!(lat.basis, vec![e(3, 0, 1), e(3, 0, 2).scale(&rat(1, 2)), e(3, 1, 2)]);
        assert_eq!(lat.scale, BigInt::from(2));
        assert_eq!(lat.rejected_scales, vec![BigInt::one()]);
        assert_eq!(lat.conjugation, BigInt::one());
        let p = lat.point(&[BigInt::from(1), BigInt::from(3), BigInt::from(2)]).unwrap();
        assert_eq!(p, MatrixQ::from_ints(&[&[1, 2, 3 + 2 * 2], &[0, 1, 4], &[0, 0, 1]]));

        let half = MatrixQ::from_rows(vec![
            vec![rint(1), rat(1, 2), rint(0)],
            vec![rint(0), rint(1), rint(0)],
            vec![rint(0), rint(0), rint(1)],
        ])
        .unwrap();
        let lat = malcev_lattice(&[half, y]).unwrap();
        assert_eq!(lat.conjugation, BigInt::from(2));
        for c in [[1, 0, 0], [0, 1, 0], [1, 1, 1], [-1, 2, 3]] {
            let c: Vec<BigInt> = c.iter().map(|&v| BigInt::from(v)).collect();
            assert!(in_integral_form(&lat.point(&c).unwrap(), &lat.conjugation));
        }
        assert!(malcev_lattice(&[MatrixQ::from_ints(&[&[1, 0], &[1, 1]])]).is_err());
    }

    #[test]
    fn integer_valued_polys() {
        let x = MultiPoly::var(1, 0);
        let binom2 = x.mul(&x.sub(&MultiPoly::one(1))).scale(&rat(1, 2));
        assert!(is_integer_valued(&binom2));
        assert!(!is_integer_valued(&x.scale(&rat(1, 2))));
    }

    fn unipotent4() -> impl Strategy<Value = MatrixQ> {
        prop::collection::vec((-1_000_000i64..=1_000_000, 1i64..=1000), 6).prop_map(|v| {
            let c: Vec<Rat> = v.into_iter().map(|(a, b)| rat(a, b)).collect();
            from_upper_coordinates(4, &c).add(&MatrixQ::identity(4))
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn exp_log_round_trip(u in unipotent4()) {
            let l = nilpotent_log(&u).unwrap();
            prop_assert_eq!(nilpotent_exp(&l).unwrap(), u);
            prop_assert_eq!(nilpotent_log(&nilpotent_exp(&l).unwrap()).unwrap(), l);
        }
    }
}
