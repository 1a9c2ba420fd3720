use std::collections::HashMap;

use serde::Serialize;

use super::{check_modulus, reduce_mod, variety::enumerate_variety_mod_p, MatrixModQ, VarietyStrategy};
use crate::arith::primes::prime_divisors_u64;
use crate::error::{Error, Result};
use crate::matgroup::MatrixQ;
use crate::poly::MultiPoly;

pub const DEFAULT_IMAGE_CAP: usize = 2_000_000;

/// The subgroup of `GL_n(Z/q)` generated by the reduced generators.
///
/// Every element carries the generator index that reached it and its
/// parent, so each element has a recorded word.
#[derive(Debug, Clone)]
pub struct FiniteImage {
    q: u64,
    gens: Vec<MatrixModQ>,
    elements: Vec<MatrixModQ>,
    index: HashMap<MatrixModQ, usize>,
    parent: Vec<Option<(usize, usize)>>,
}

impl FiniteImage {
    pub fn modulus(&self) -> u64 {
        self.q
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[MatrixModQ] {
        &self.elements
    }

    pub fn generators(&self) -> &[MatrixModQ] {
        &self.gens
    }

    pub fn contains(&self, m: &MatrixModQ) -> bool {
        self.index.contains_key(m)
    }

    /// Generator indices whose product (left to right) is element `i`.
    pub fn word(&self, mut i: usize) -> Vec<usize> {
        let mut w = Vec::new();
        while let Some((p, g)) = self.parent[i] {
            w.push(g);
            i = p;
        }
        w.reverse();
        w
    }

    /// Re-check closure under the generators and every recorded word.
    pub fn verify_closure(&self) -> bool {
        let n = self.elements.first().map(MatrixModQ::dim).unwrap_or(0);
        let id = MatrixModQ::identity(n, self.q);
        if !self.contains(&id) {
            return false;
        }
        let closed = self.elements.iter().all(|e| self.gens.iter().all(|g| self.contains(&e.mul(g))));
        let words = (0..self.elements.len()).all(|i| {
            let prod = self.word(i).into_iter().fold(id.clone(), |acc, g| acc.mul(&self.gens[g]));
            prod == self.elements[i]
        });
        closed && words
    }
}

pub fn generate_image(gens: &[MatrixQ], q: u64, cap: usize) -> Result<FiniteImage> {
    check_modulus(q)?;
    let n = gens.first().map(MatrixQ::dim).ok_or_else(|| Error::invalid("no generators"))?;
    let red: Vec<MatrixModQ> = gens.iter().map(|g| reduce_mod(g, q)).collect::<Result<_>>()?;
    let id = MatrixModQ::identity(n, q);
    let mut elements = vec![id.clone()];
    let mut index = HashMap::from([(id, 0usize)]);
    let mut parent = vec![None];
    let mut head = 0;
    while head < elements.len() {
        for (gi, g) in red.iter().enumerate() {
            let m = elements[head].mul(g);
            if !index.contains_key(&m) {
                if elements.len() >= cap {
                    return Err(Error::resource(
                        "generate_image",
                        format!("cap {cap} reached modulo {q} with {} elements so far", elements.len()),
                    ));
                }
                index.insert(m.clone(), elements.len());
                elements.push(m);
                parent.push(Some((head, gi)));
            }
        }
        head += 1;
    }
    Ok(FiniteImage { q, gens: red, elements, index, parent })
}

/// `|SL_n(F_p)| = p^(n(n-1)/2) prod_{k=2..n} (p^k - 1)`.
pub fn sl_order(n: usize, p: u64) -> u128 {
    let p = p as u128;
    let mut o = p.pow((n * (n.saturating_sub(1)) / 2) as u32);
    for k in 2..=n as u32 {
        o *= p.pow(k) - 1;
    }
    o
}

/// Where the expected order of the image modulo a prime comes from.
#[derive(Debug, Clone)]
pub enum ExpectedOrder {
    SpecialLinear(usize),
    /// Point count of the ambient equations over F_p.
    Variety(Vec<MultiPoly>),
    Unknown,
}

impl ExpectedOrder {
    pub fn at(&self, p: u64) -> Result<Option<u128>> {
        Ok(match self {
            ExpectedOrder::SpecialLinear(n) => Some(sl_order(*n, p)),
            ExpectedOrder::Variety(eqs) => Some(enumerate_variety_mod_p(eqs, p, VarietyStrategy::default())?),
            ExpectedOrder::Unknown => None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StrongApproxVerdict {
    Holds,
    Fails,
    Unverifiable,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StrongApprox {
    pub q: u64,
    pub image_order: u128,
    pub expected: Vec<(u64, Option<u128>)>,
    pub verdict: StrongApproxVerdict,
}

impl StrongApprox {
    pub fn holds(&self) -> bool {
        self.verdict == StrongApproxVerdict::Holds
    }
}

pub fn verify_strong_approx(gens: &[MatrixQ], q: u64, expected: &ExpectedOrder, cap: usize) -> Result<StrongApprox> {
    let image = generate_image(gens, q, cap)?;
    let per_prime: Vec<(u64, Option<u128>)> = prime_divisors_u64(q)
        .into_iter()
        .map(|p| Ok((p, expected.at(p)?)))
        .collect::<Result<_>>()?;
    let image_order = image.order() as u128;
    let verdict = if per_prime.iter().any(|(_, e)| e.is_none()) {
        StrongApproxVerdict::Unverifiable
    } else if per_prime.iter().map(|(_, e)| e.unwrap()).product::<u128>() == image_order {
        StrongApproxVerdict::Holds
    } else {
        StrongApproxVerdict::Fails
    };
    Ok(StrongApprox { q, image_order, expected: per_prime, verdict })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::matrix_parser;

    fn free_pair() -> Vec<MatrixQ> {
        vec![MatrixQ::from_ints(&[&[1, 2], &[0, 1]]), MatrixQ::from_ints(&[&[1, 0], &[2, 1]])]
    }

    #[test]
    fn image_orders() {
        let g = free_pair();
        let im = generate_image(&g, 3, DEFAULT_IMAGE_CAP).unwrap();
        assert_eq!(im.order(), 24);
        assert!(im.verify_closure());
        assert_eq!(generate_image(&g, 2, DEFAULT_IMAGE_CAP).unwrap().order(), 1);
        assert_eq!(generate_image(&g, 15, DEFAULT_IMAGE_CAP).unwrap().order(), 2880);
        let err = generate_image(&g, 15, 100).unwrap_err();
        assert!(err.is_resource());
        assert!(generate_image(&g, 9, DEFAULT_IMAGE_CAP).is_err());
    }

    #[test]
    fn strong_approximation() {
        let g = free_pair();
        let sl2 = ExpectedOrder::SpecialLinear(2);
        assert!(verify_strong_approx(&g, 35, &sl2, DEFAULT_IMAGE_CAP).unwrap().holds());
        let r = verify_strong_approx(&g, 2, &sl2, DEFAULT_IMAGE_CAP).unwrap();
        assert_eq!((r.image_order, r.verdict), (1, StrongApproxVerdict::Fails));
        let u = vec![MatrixQ::from_ints(&[&[1, 1], &[0, 1]])];
        let r = verify_strong_approx(&u, 3, &sl2, DEFAULT_IMAGE_CAP).unwrap();
        assert_eq!((r.image_order, r.verdict), (3, StrongApproxVerdict::Fails));
        let r = verify_strong_approx(&g, 5, &ExpectedOrder::Unknown, DEFAULT_IMAGE_CAP).unwrap();
        assert_eq!(r.verdict, StrongApproxVerdict::Unverifiable);
        let det = matrix_parser(2).parse("det - 1").unwrap();
        let r = verify_strong_approx(&g, 7, &ExpectedOrder::Variety(vec![det]), DEFAULT_IMAGE_CAP).unwrap();
        assert!(r.holds());
        assert_eq!(sl_order(3, 2), 168);
    }
}
