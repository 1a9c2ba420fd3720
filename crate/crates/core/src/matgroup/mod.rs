//! Finitely generated matrix groups over Q: word-metric balls, orbits,
//! norms and commutator generator sets.

mod matrix;

use std::collections::{HashMap, HashSet};

use rayon::prelude::*;

pub use matrix::{affine_embed, s_norm, MatrixQ};

use crate::arith::{PrimeSet, Rat};
use crate::error::{Error, Result};

/// Default cap on the number of ball elements.
pub const DEFAULT_BALL_CAP: usize = 5_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorSet {
    generators: Vec<MatrixQ>,
    symmetric: bool,
}

impl GeneratorSet {
    /// Generators as given, with identity and duplicates removed.
    pub fn new(gens: Vec<MatrixQ>) -> Result<Self> {
        let n = gens.first().map(MatrixQ::dim).ok_or_else(|| Error::invalid("no generators"))?;
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for g in gens {
            if g.dim() != n {
                return Err(Error::Dimension { expected: n, got: g.dim() });
            }
            if !g.invertible() {
                return Err(Error::invalid(format!("generator {g} is singular")));
            }
            if !g.is_identity() && seen.insert(g.clone()) {
                out.push(g);
            }
        }
        let symmetric = out.iter().all(|g| seen.contains(&g.inverse().expect("invertible")));
        Ok(GeneratorSet { generators: out, symmetric })
    }

    /// Close the set under inverses (each generator followed by its inverse).
    pub fn symmetrized(gens: Vec<MatrixQ>) -> Result<Self> {
        let base = GeneratorSet::new(gens)?;
        let mut all = Vec::new();
        for g in &base.generators {
            all.push(g.clone());
            all.push(g.inverse()?);
        }
        let mut s = GeneratorSet::new(all)?;
        s.symmetric = true;
        Ok(s)
    }

    pub fn generators(&self) -> &[MatrixQ] {
        &self.generators
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    /// Matrix dimension (0 for an empty set).
    pub fn dim(&self) -> usize {
        self.generators.first().map(MatrixQ::dim).unwrap_or(0)
    }

    /// Whether all generators pairwise commute.
    pub fn commuting(&self) -> bool {
        let g = &self.generators;
        (0..g.len()).all(|i| (i + 1..g.len()).all(|j| &g[i] * &g[j] == &g[j] * &g[i]))
    }
}

/// All group elements of word length at most `radius`.
#[derive(Debug, Clone)]
pub struct Ball {
    radius: usize,
    elements: Vec<MatrixQ>,
    lengths: Vec<usize>,
    index: HashMap<MatrixQ, usize>,
}

impl Ball {
    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Elements in canonical order: by word length, then by entries.
    pub fn elements(&self) -> &[MatrixQ] {
        &self.elements
    }

    pub fn iter(&self) -> impl Iterator<Item = (&MatrixQ, usize)> {
        self.elements.iter().zip(self.lengths.iter().copied())
    }

    pub fn length_of(&self, g: &MatrixQ) -> Option<usize> {
        self.index.get(g).map(|&i| self.lengths[i])
    }

    pub fn contains(&self, g: &MatrixQ) -> bool {
        self.index.contains_key(g)
    }

    /// Number of elements of each exact length 0..=radius.
    pub fn sphere_sizes(&self) -> Vec<usize> {
        let mut out = vec![0; self.radius + 1];
        for &l in &self.lengths {
            out[l] += 1;
        }
        out
    }
}

/// Breadth-first enumeration of the word-metric ball of radius `radius`.
///
/// Each layer is expanded in parallel and merged with set semantics; the
/// new layer is sorted before it is appended, so the output is canonical.
pub fn ball(gens: &GeneratorSet, radius: usize, cap: usize) -> Result<Ball> {
    let n = gens.dim().max(1);
    let id = MatrixQ::identity(n);
    let mut elements = vec![id.clone()];
    let mut lengths = vec![0];
    let mut index = HashMap::from([(id, 0usize)]);
    let mut frontier: Vec<usize> = vec![0];
    for layer in 1..=radius {
        let candidates: Vec<MatrixQ> = frontier
            .par_iter()
            .flat_map_iter(|&i| {
                let g = &elements[i];
                gens.generators().iter().map(move |s| s * g)
            })
            .collect();
        let mut fresh: Vec<MatrixQ> = candidates
            .into_iter()
            .filter(|m| !index.contains_key(m))
            .collect::<HashSet<_>>()
            .into_iter()
            .collect();
        fresh.sort();
        if elements.len() + fresh.len() > cap {
            return Err(Error::resource(
                "ball",
                format!(
                    "cap {cap} exceeded at radius {layer}; complete through radius {} with {} elements",
                    layer - 1,
                    elements.len()
                ),
            ));
        }
        frontier.clear();
        for m in fresh {
            frontier.push(elements.len());
            index.insert(m.clone(), elements.len());
            elements.push(m);
            lengths.push(layer);
        }
    }
    Ok(Ball { radius, elements, lengths, index })
}

/// Points `g v` for `g` in the ball, each with its minimal word length.
#[derive(Debug, Clone)]
pub struct OrbitSlice {
    pub base: Vec<Rat>,
    pub points: Vec<(Vec<Rat>, usize)>,
}

impl OrbitSlice {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, v: &[Rat]) -> bool {
        self.points.iter().any(|(p, _)| p.as_slice() == v)
    }
}

pub fn orbit_from_ball(ball: &Ball, v: &[Rat]) -> Result<OrbitSlice> {
    let mut seen = HashSet::new();
    let mut points = Vec::new();
    for (g, l) in ball.iter() {
        let w = g.mul_vec(v)?;
        if seen.insert(w.clone()) {
            points.push((w, l));
        }
    }
    Ok(OrbitSlice { base: v.to_vec(), points })
}

/// Orbit slice `{g v : l(g) <= radius}`.
pub fn orbit(gens: &GeneratorSet, v: &[Rat], radius: usize, cap: usize) -> Result<OrbitSlice> {
    if v.len() != gens.dim() {
        return Err(Error::Dimension { expected: gens.dim(), got: v.len() });
    }
    orbit_from_ball(&ball(gens, radius, cap)?, v)
}

/// Commutators `[a, b]` of the previous level's generators, `depth` times.
///
/// This only seeds experiments with elements of the derived subgroups; no
/// claim is made that they generate a Zariski-dense subgroup.
pub fn derived_generators(gens: &GeneratorSet, depth: usize) -> Result<GeneratorSet> {
    let mut cur = gens.generators().to_vec();
    for _ in 0..depth {
        let mut next = Vec::new();
        for i in 0..cur.len() {
            for j in i + 1..cur.len() {
                let c = MatrixQ::commutator(&cur[i], &cur[j])?;
                if !c.is_identity() {
                    next.push(c);
                }
            }
        }
        cur = next;
        if cur.is_empty() {
            break;
        }
    }
    if cur.is_empty() {
        return Ok(GeneratorSet { generators: Vec::new(), symmetric: true });
    }
    GeneratorSet::new(cur)
}

/// Maximum of [`s_norm`] over the generators (at least 1).
pub fn generator_norm_constant(gens: &GeneratorSet, s: &PrimeSet) -> Rat {
    gens.generators()
        .iter()
        .map(|g| s_norm(g, s))
        .fold(Rat::from_integer(1.into()), |a, b| if b > a { b } else { a })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rint;

    fn free_pair() -> GeneratorSet {
        GeneratorSet::symmetrized(vec![
            MatrixQ::from_ints(&[&[1, 2], &[0, 1]]),
            MatrixQ::from_ints(&[&[1, 0], &[2, 1]]),
        ])
        .unwrap()
    }

    #[test]
    fn ball_sizes() {
        let g = free_pair();
        assert_eq!(ball(&g, 0, DEFAULT_BALL_CAP).unwrap().len(), 1);
        // free of rank 2: 2*3^L - 1
        for l in 0..=5 {
            assert_eq!(ball(&g, l, DEFAULT_BALL_CAP).unwrap().len(), 2 * 3usize.pow(l as u32) - 1);
        }
        let cyc = GeneratorSet::symmetrized(vec![MatrixQ::from_ints(&[&[1, 1], &[0, 1]])]).unwrap();
        assert_eq!(ball(&cyc, 5, DEFAULT_BALL_CAP).unwrap().len(), 11);
    }

    #[test]
    fn ball_cap_reports_partial_radius() {
        let err = ball(&free_pair(), 6, 100).unwrap_err();
        assert!(err.is_resource());
        assert!(err.to_string().contains("radius 3"));
    }

    #[test]
    fn ball_metric_properties() {
        let g = free_pair();
        let b = ball(&g, 4, DEFAULT_BALL_CAP).unwrap();
        for (x, l) in b.iter() {
            assert_eq!(b.length_of(&x.inverse().unwrap()), Some(l));
        }
        let b2 = ball(&g, 2, DEFAULT_BALL_CAP).unwrap();
        for (x, lx) in b2.iter() {
            for (y, ly) in b2.iter() {
                let l = b.length_of(&(x * y)).expect("product within radius 4");
                assert!(l <= lx + ly);
            }
        }
    }

    #[test]
    fn ball_nesting_and_determinism() {
        let g = free_pair();
        let b3 = ball(&g, 3, DEFAULT_BALL_CAP).unwrap();
        let b4 = ball(&g, 4, DEFAULT_BALL_CAP).unwrap();
        assert!(b3.elements().iter().all(|x| b4.contains(x)));
        assert_eq!(b4.elements(), ball(&g, 4, DEFAULT_BALL_CAP).unwrap().elements());
    }

    #[test]
    fn orbit_examples() {
        let g = free_pair();
        let fixed = GeneratorSet::symmetrized(vec![MatrixQ::from_ints(&[&[1, 1], &[0, 1]])]).unwrap();
        let o = orbit(&fixed, &[rint(1), rint(0)], 4, DEFAULT_BALL_CAP).unwrap();
        assert_eq!(o.len(), 1);

        let shift = affine_embed(&MatrixQ::identity(1), &[rint(1)]).unwrap();
        let sg = GeneratorSet::symmetrized(vec![shift]).unwrap();
        let o = orbit(&sg, &[rint(0), rint(1)], 4, DEFAULT_BALL_CAP).unwrap();
        let mut xs: Vec<Rat> = o.points.iter().map(|(p, _)| p[0].clone()).collect();
        xs.sort();
        assert_eq!(xs, (-4..=4).map(rint).collect::<Vec<_>>());

        let b = ball(&g, 3, DEFAULT_BALL_CAP).unwrap();
        let v = [rint(1), rint(0)];
        let brute: HashSet<Vec<Rat>> = b.elements().iter().map(|m| m.mul_vec(&v).unwrap()).collect();
        let o = orbit(&g, &v, 3, DEFAULT_BALL_CAP).unwrap();
        assert_eq!(o.len(), brute.len());
        assert!(o.contains(&v));
    }

    #[test]
    fn derived_examples() {
        let g = free_pair();
        assert_eq!(derived_generators(&g, 0).unwrap(), g);
        let ab = GeneratorSet::new(vec![
            MatrixQ::from_ints(&[&[2, 0], &[0, 1]]),
            MatrixQ::from_ints(&[&[3, 0], &[0, 1]]),
        ])
        .unwrap();
        assert!(derived_generators(&ab, 1).unwrap().is_empty());
        let heis = GeneratorSet::new(vec![
            MatrixQ::from_ints(&[&[1, 1, 0], &[0, 1, 0], &[0, 0, 1]]),
            MatrixQ::from_ints(&[&[1, 0, 0], &[0, 1, 1], &[0, 0, 1]]),
        ])
        .unwrap();
        let d = derived_generators(&heis, 1).unwrap();
        assert!(d.generators().contains(&MatrixQ::from_ints(&[&[1, 0, 1], &[0, 1, 0], &[0, 0, 1]])));
    }
}
