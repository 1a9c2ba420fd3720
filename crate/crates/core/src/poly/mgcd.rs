//! Gcd and exact division in Q[x_1, ..., x_n].
//!
//! Recursive primitive remainder sequences: content and primitive part are
//! taken with respect to the highest variable present, and the contents are
//! handled by recursion on fewer variables. Results are normalized with
//! `MultiPoly::primitive_normalized`, so gcds are defined up to that choice
//! of scalar.

use super::MultiPoly;

/// `a / b` if `b` divides `a` exactly, else `None`.
pub fn divide_exact(a: &MultiPoly, b: &MultiPoly) -> Option<MultiPoly> {
    let (bm, bc) = b.leading()?;
    let (bm, bc) = (bm.clone(), bc.clone());
    let mut r = a.clone();
    let mut q = MultiPoly::zero(a.nvars());
    while let Some((rm, rc)) = r.leading() {
        if rm.iter().zip(&bm).any(|(x, y)| x < y) {
            return None;
        }
        let e: Vec<u32> = rm.iter().zip(&bm).map(|(x, y)| x - y).collect();
        let t = MultiPoly::monomial(e, rc / &bc);
        r = r.sub(&t.mul(b));
        q = q.add(&t);
    }
    Some(q)
}

/// Leading coefficient with respect to `var`.
pub fn lead_coeff_in(p: &MultiPoly, var: usize) -> MultiPoly {
    p.coefficients_in(var).pop().unwrap_or_else(|| MultiPoly::zero(p.nvars()))
}

/// Gcd of the coefficients of `p` viewed as a polynomial in `var`.
pub fn content_in(p: &MultiPoly, var: usize) -> MultiPoly {
    p.coefficients_in(var)
        .iter()
        .filter(|c| !c.is_zero())
        .fold(MultiPoly::zero(p.nvars()), |g, c| gcd(&g, c))
}

pub fn primitive_part_in(p: &MultiPoly, var: usize) -> MultiPoly {
    if p.is_zero() {
        return p.clone();
    }
    divide_exact(p, &content_in(p, var)).expect("content divides")
}

fn prem(a: &MultiPoly, b: &MultiPoly, var: usize) -> MultiPoly {
    let db = b.degree_in(var);
    let lb = lead_coeff_in(b, var);
    let mut r = a.clone();
    while !r.is_zero() && r.degree_in(var) >= db {
        let dr = r.degree_in(var);
        let lr = lead_coeff_in(&r, var);
        r = r.mul(&lb).sub(&lr.mul(b).shift(var, dr - db));
    }
    r
}

/// Normalized gcd. `gcd(0, 0) = 0`; nonzero constants have gcd 1.
pub fn gcd(a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
    if a.is_zero() {
        return b.primitive_normalized();
    }
    if b.is_zero() {
        return a.primitive_normalized();
    }
    let n = a.nvars();
    let Some(v) = a.vars_used().into_iter().chain(b.vars_used()).max() else {
        return MultiPoly::one(n);
    };
    let (ca, cb) = (content_in(a, v), content_in(b, v));
    let c = gcd(&ca, &cb);
    let mut pa = divide_exact(a, &ca).expect("content divides");
    let mut pb = divide_exact(b, &cb).expect("content divides");
    if pa.degree_in(v) < pb.degree_in(v) {
        std::mem::swap(&mut pa, &mut pb);
    }
    while !pb.is_zero() && pb.degree_in(v) > 0 {
        let r = prem(&pa, &pb, v);
        pa = pb;
        pb = primitive_part_in(&r, v);
    }
    let g = if pb.is_zero() { primitive_part_in(&pa, v) } else { MultiPoly::one(n) };
    c.mul(&g).primitive_normalized()
}

pub fn gcd_all<'a>(ps: impl IntoIterator<Item = &'a MultiPoly>, nvars: usize) -> MultiPoly {
    ps.into_iter().fold(MultiPoly::zero(nvars), |g, p| gcd(&g, p))
}

/// True if the family has no common factor of positive degree (and is not
/// identically zero).
pub fn is_coprime_family(ps: &[MultiPoly], nvars: usize) -> bool {
    let g = gcd_all(ps, nvars);
    !g.is_zero() && g.is_constant()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::PolyParser;
    use proptest::prelude::*;

    fn pp(s: &str) -> MultiPoly {
        PolyParser::new(&["x", "y", "z"]).parse(s).unwrap()
    }

    #[test]
    fn small_gcds() {
        assert_eq!(gcd(&pp("x^2 - y^2"), &pp("(x+y)^2")), pp("x + y"));
        assert_eq!(gcd(&pp("x*y"), &pp("x + 1")), pp("1"));
        assert_eq!(gcd(&pp("2x*z + 2z"), &pp("4z*y*(x+1)")), pp("x*z + z"));
        assert_eq!(gcd(&pp("6"), &pp("0")), pp("1"));
        assert!(gcd(&pp("0"), &pp("0")).is_zero());
        assert!(is_coprime_family(&[pp("x"), pp("x+2")], 3));
        assert!(!is_coprime_family(&[pp("x*y"), pp("x*z")], 3));
    }

    #[test]
    fn exact_division() {
        assert_eq!(divide_exact(&pp("x^2 - y^2"), &pp("x - y")), Some(pp("x + y")));
        assert_eq!(divide_exact(&pp("x^2 + 1"), &pp("x - y")), None);
    }

    fn small_poly() -> impl Strategy<Value = MultiPoly> {
        prop::collection::vec(((0u32..3, 0u32..3, 0u32..2), -3i64..4), 1..4).prop_map(|ts| {
            MultiPoly::from_terms(
                3,
                ts.into_iter().map(|((a, b, c), k)| (vec![a, b, c], crate::arith::rint(k))),
            )
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn common_factor_divides_gcd(a in small_poly(), b in small_poly(), c in small_poly()) {
            prop_assume!(!c.is_zero() && !a.is_zero() && !b.is_zero());
            let g = gcd(&a.mul(&c), &b.mul(&c));
            prop_assert!(divide_exact(&g, &c).is_some());
            prop_assert!(divide_exact(&a.mul(&c), &g).is_some());
            prop_assert!(divide_exact(&b.mul(&c), &g).is_some());
        }
    }
}
