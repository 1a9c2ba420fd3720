//! Almost-prime points for polynomials on Z^d and on finitely generated
//! unipotent groups.
//!
//! The multivariable search peels off one variable at a time. At each level
//! the polynomial factors as `P = H * sum_i H_i x^i` with `gcd_i H_i = 1`;
//! prefixes come from the recursive call on `H`, and for every prefix the
//! last coordinate is searched along a progression that keeps the gcd
//! conditions away from the level's modulus `M`. Points are only emitted
//! after a direct check, and every emitted point carries its certificate.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::arith::{factorize, omega_outside, prime_support, s_integer_part, FactorBudget, Omega, PrimeSet, Rat};
use crate::arith::primes::primes_up_to;
use crate::error::{Error, Result};
use crate::matgroup::MatrixQ;
use crate::poly::mgcd::{content_in, divide_exact, gcd_all, is_coprime_family};
use crate::poly::nilpotent::{from_upper_coordinates, nilpotent_exp, upper_coordinates};
use crate::poly::{bad_prime_bound, gcd_certificate, malcev_lattice, progression_avoiding, BadPrimeBound, MultiPoly, NilpotentLog};

/// One accepted value of a single-variable search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SingleVarHit {
    pub n: String,
    pub value: String,
    pub omega: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SingleVarResult {
    pub hits: Vec<SingleVarHit>,
    /// Number of progression terms examined.
    pub searched: u64,
    /// Values whose factorization ran out of budget.
    pub unfactored: u64,
    /// The search bound was reached before `want` hits were found.
    pub exhausted: bool,
}

fn rat_from(n: &BigInt) -> Rat {
    Rat::from_integer(n.clone())
}

/// Integers `n = a j + b`, `0 <= j <= search_bound`, with at most `r` prime
/// factors (with multiplicity) of `P(n)` outside `S`; at most `want` of them.
/// Units and S-units count as zero prime factors.
pub fn single_variable_almost_primes(
    p: &MultiPoly,
    s: &PrimeSet,
    a: &BigInt,
    b: &BigInt,
    r: u32,
    search_bound: u64,
    want: usize,
    budget: &FactorBudget,
) -> Result<SingleVarResult> {
    if p.vars_used().len() > 1 {
        return Err(Error::invalid("single-variable search needs a univariate polynomial"));
    }
    if !p.is_integral() {
        return Err(Error::invalid("single-variable search needs integer coefficients"));
    }
    let mut hits = Vec::new();
    let mut searched = 0;
    let mut unfactored = 0;
    for j in 0..=search_bound {
        if hits.len() >= want {
            break;
        }
        searched += 1;
        let n = a * BigInt::from(j) + b;
        let v = p.eval(&vec![rat_from(&n); p.nvars()])?.to_integer();
        if v.is_zero() {
            continue;
        }
        match omega_outside(&v, s, true, budget)? {
            Omega::Exact(w) if w <= r => hits.push(SingleVarHit { n: n.to_string(), value: v.to_string(), omega: w }),
            Omega::Exact(_) => {}
            Omega::Unknown => {
                log::debug!("skipping n = {n}: could not factor {v}");
                unfactored += 1;
            }
        }
    }
    Ok(SingleVarResult { exhausted: hits.len() < want, hits, searched, unfactored })
}

/// Polynomial data for the multivariable search: `P` and coprime families
/// `{P_ij}_j`, all in `nvars` variables with integer coefficients.
#[derive(Debug, Clone)]
pub struct UniSieveProblem {
    pub nvars: usize,
    pub p: MultiPoly,
    pub families: Vec<Vec<MultiPoly>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SieveBudgets {
    /// Points wanted from the top level.
    pub points: usize,
    /// Points requested from every lower level (the prefixes).
    pub prefixes: usize,
    /// Values of the last coordinate wanted per prefix.
    pub per_prefix: usize,
    /// Largest progression index searched.
    pub search_bound: u64,
    pub factor: FactorBudget,
}

impl Default for SieveBudgets {
    fn default() -> Self {
        SieveBudgets { points: 128, prefixes: 12, per_prefix: 12, search_bound: 2_000, factor: FactorBudget::default() }
    }
}

/// What one level of the recursion did.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LevelSummary {
    /// Variable searched at this level.
    pub var: usize,
    /// Prime-factor allowance of the univariate polynomial of this level.
    pub r_single: u32,
    pub s: PrimeSet,
    pub prefixes_used: usize,
    pub prefixes_skipped: usize,
    pub points: usize,
}

/// Certificate of an emitted point, recomputed from the original data.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PointCertificate {
    pub x: Vec<String>,
    pub value: String,
    pub factors: Vec<(String, u32)>,
    pub omega_outside: u32,
    /// `gcd_j P_ij(x)` for every family.
    pub family_gcds: Vec<String>,
    pub verified: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct UniSieveResult {
    pub r: u32,
    pub s: PrimeSet,
    pub points: Vec<PointCertificate>,
    pub levels: Vec<LevelSummary>,
    /// Bad-prime bounds of every univariate instance searched (distinct).
    pub single_variable_bounds: Vec<BadPrimeBound>,
}

impl UniSieveResult {
    pub fn all_verified(&self) -> bool {
        self.points.iter().all(|p| p.verified)
    }

    pub fn bounds_inside_s(&self) -> bool {
        self.single_variable_bounds.iter().all(|b| b.primes.is_subset(&self.s))
    }
}

/// How a family is carried into the recursive call.
#[derive(Debug, Clone)]
enum Carried {
    /// Members independent of the peeled variable with gcd 1.
    Independent(Vec<MultiPoly>),
    /// A member whose coefficients in the peeled variable have gcd 1; the
    /// recursion gets those coefficients, the level keeps the whole family.
    Coefficients { members: Vec<MultiPoly>, witness: MultiPoly },
}

fn carry(family: Vec<MultiPoly>, var: usize, nvars: usize, out: &mut Vec<Carried>) {
    let family: Vec<MultiPoly> = family.into_iter().filter(|m| !m.is_zero()).collect();
    let (indep, dep): (Vec<&MultiPoly>, Vec<&MultiPoly>) = family.iter().partition(|m| !m.depends_on(var));
    if dep.is_empty() {
        out.push(Carried::Independent(family.clone()));
        return;
    }
    let indep: Vec<MultiPoly> = indep.into_iter().cloned().collect();
    if !indep.is_empty() && is_coprime_family(&indep, nvars) {
        out.push(Carried::Independent(indep));
        return;
    }
    if let Some(w) = dep.iter().find(|m| content_in(m, var).is_constant()) {
        out.push(Carried::Coefficients { witness: (*w).clone(), members: family.clone() });
        return;
    }
    // split c * q into a copy with c and a copy with q
    let k = family.iter().position(|m| m.depends_on(var)).expect("dependent member");
    let c = content_in(&family[k], var);
    let q = divide_exact(&family[k], &c).expect("content divides");
    let mut with_c = family.clone();
    with_c[k] = c;
    let mut with_q = family;
    with_q[k] = q;
    carry(with_c, var, nvars, out);
    carry(with_q, var, nvars, out);
}

struct Level {
    r: u32,
    s: PrimeSet,
    points: Vec<Vec<BigInt>>,
}

struct Ctx<'a> {
    nvars: usize,
    budgets: &'a SieveBudgets,
    levels: Vec<LevelSummary>,
    bounds: Vec<BadPrimeBound>,
}

impl Ctx<'_> {
    fn record_bound(&mut self, b: BadPrimeBound) {
        if !self.bounds.contains(&b) {
            self.bounds.push(b);
        }
    }
}

fn choose_var(active: &[usize], p: &MultiPoly, families: &[Vec<MultiPoly>]) -> usize {
    let weight = |v: usize| -> u32 {
        p.degree_in(v) + families.iter().flatten().map(|m| m.degree_in(v)).sum::<u32>()
    };
    // ties go to the later variable
    *active.iter().rev().min_by_key(|&&v| weight(v)).expect("active variable")
}

fn certificate_primes(m: &BigInt, budget: &FactorBudget) -> Result<PrimeSet> {
    let (s, large) = prime_support(m, budget)?;
    if !large.is_empty() {
        return Err(Error::resource("multivariable_sieve", "certificate value has a prime beyond 64 bits"));
    }
    Ok(s)
}

fn specialize(p: &MultiPoly, x: &[BigInt], vars: &[usize]) -> MultiPoly {
    vars.iter().fold(p.clone(), |acc, &v| acc.substitute_value(v, &rat_from(&x[v])))
}

fn solve(ctx: &mut Ctx, active: &[usize], p: &MultiPoly, families: &[Vec<MultiPoly>], want: usize) -> Result<Level> {
    let budget = ctx.budgets.factor;
    if active.len() == 1 {
        let v = active[0];
        let mut s = PrimeSet::empty();
        for fam in families {
            let cert = gcd_certificate(fam)?;
            s = s.union(&certificate_primes(&cert.m, &budget)?);
        }
        let bound = bad_prime_bound(p)?;
        s = s.union(&bound.primes);
        ctx.record_bound(bound);
        let r = if p.is_constant() { 0 } else { p.total_degree() };
        let res = single_variable_almost_primes(
            p,
            &s,
            &BigInt::one(),
            &BigInt::zero(),
            r,
            ctx.budgets.search_bound,
            want,
            &budget,
        )?;
        let points: Vec<Vec<BigInt>> = res
            .hits
            .iter()
            .map(|h| {
                let mut x = vec![BigInt::zero(); ctx.nvars];
                x[v] = h.n.parse().expect("integer");
                x
            })
            .collect();
        ctx.levels.push(LevelSummary {
            var: v,
            r_single: r,
            s: s.clone(),
            prefixes_used: 1,
            prefixes_skipped: 0,
            points: points.len(),
        });
        return Ok(Level { r, s, points });
    }

    let nvars = ctx.nvars;
    let xd = choose_var(active, p, families);
    let rest: Vec<usize> = active.iter().copied().filter(|&v| v != xd).collect();

    // P = H * sum H_i x_d^i
    let h = content_in(p, xd);
    let core = divide_exact(p, &h).expect("content divides");
    let hs: Vec<MultiPoly> = core.coefficients_in(xd);
    let mut carried = Vec::new();
    for fam in families {
        carry(fam.clone(), xd, nvars, &mut carried);
    }
    let mut sub_families = vec![hs.iter().filter(|c| !c.is_zero()).cloned().collect::<Vec<_>>()];
    for c in &carried {
        match c {
            Carried::Independent(ms) => sub_families.push(ms.clone()),
            Carried::Coefficients { witness, .. } => {
                sub_families.push(witness.coefficients_in(xd).into_iter().filter(|c| !c.is_zero()).collect())
            }
        }
    }
    let sub = solve(ctx, &rest, &h, &sub_families, ctx.budgets.prefixes)?;

    let r_single = core.degree_in(xd);
    let deg_sum = r_single
        + carried
            .iter()
            .flat_map(|c| match c {
                Carried::Independent(_) => Vec::new(),
                Carried::Coefficients { members, .. } => members.iter().map(|m| m.degree_in(xd)).collect(),
            })
            .sum::<u32>();
    let s = sub.s.union(&PrimeSet::new(primes_up_to(deg_sum as u64))?);
    let r = sub.r + r_single;

    let mut points = Vec::new();
    let (mut used, mut skipped) = (0, 0);
    for x in &sub.points {
        if points.len() >= want {
            break;
        }
        let big_p = specialize(&core, x, &rest);
        if big_p.is_zero() {
            skipped += 1;
            continue;
        }
        // M from the univariate certificates of the families that depend on x_d
        let mut m = BigInt::one();
        let mut avoid = vec![big_p.clone()];
        let mut ok = true;
        for c in &carried {
            if let Carried::Coefficients { members, witness } = c {
                let spec: Vec<MultiPoly> = members.iter().map(|q| specialize(q, x, &rest)).collect();
                match gcd_certificate(&spec) {
                    Ok(cert) => m *= cert.m,
                    Err(Error::NotCoprime { .. }) => {
                        ok = false;
                        break;
                    }
                    Err(e) => return Err(e),
                }
                avoid.push(specialize(witness, x, &rest));
            }
        }
        if !ok {
            skipped += 1;
            continue;
        }
        // primes of M inside S are left alone
        let mut m_out = BigInt::one();
        if !m.is_one() {
            let (small, large) = prime_support(&m, &budget)?;
            for q in small.iter().filter(|&q| !s.contains(q)) {
                m_out *= q;
            }
            for q in large {
                m_out *= BigInt::from(q);
            }
        }
        let prog = progression_avoiding(&m_out, &avoid)?;
        let bound = bad_prime_bound(&big_p)?;
        ctx.record_bound(bound);
        let per = ctx.budgets.per_prefix.min(want - points.len());
        let res = single_variable_almost_primes(
            &big_p,
            &s,
            &prog.a,
            &prog.b,
            r_single,
            ctx.budgets.search_bound,
            per,
            &budget,
        )?;
        used += 1;
        for hit in res.hits {
            let mut y = x.clone();
            y[xd] = hit.n.parse().expect("integer");
            points.push(y);
        }
    }
    ctx.levels.push(LevelSummary { var: xd, r_single, s: s.clone(), prefixes_used: used, prefixes_skipped: skipped, points: points.len() });
    Ok(Level { r, s, points })
}

fn check_problem(problem: &UniSieveProblem) -> Result<()> {
    let all = std::iter::once(&problem.p).chain(problem.families.iter().flatten());
    for q in all {
        if q.nvars() != problem.nvars {
            return Err(Error::Dimension { expected: problem.nvars, got: q.nvars() });
        }
        if !q.is_integral() {
            return Err(Error::invalid("sieve polynomials must have integer coefficients"));
        }
    }
    if problem.p.is_zero() {
        return Err(Error::invalid("P must be nonzero"));
    }
    for fam in &problem.families {
        if !is_coprime_family(fam, problem.nvars) {
            return Err(Error::NotCoprime { common: gcd_all(fam, problem.nvars).to_string() });
        }
    }
    Ok(())
}

/// Recompute the certificate of a point from scratch.
pub fn certify_point(problem: &UniSieveProblem, x: &[BigInt], r: u32, s: &PrimeSet, budget: &FactorBudget) -> Result<PointCertificate> {
    let xr: Vec<Rat> = x.iter().map(rat_from).collect();
    let v = problem.p.eval(&xr)?.to_integer();
    let (factors, omega, mut verified) = if v.is_zero() {
        (Vec::new(), u32::MAX, false)
    } else {
        let f = factorize(&v, budget)?;
        let omega = f.omega_outside(s, true);
        let factors = f.factors.iter().map(|(p, e)| (p.to_string(), *e)).collect();
        (factors, omega.unwrap_or(u32::MAX), omega.is_some_and(|w| w <= r))
    };
    let mut family_gcds = Vec::new();
    for fam in &problem.families {
        let mut g = BigInt::zero();
        for q in fam {
            g = num_integer::Integer::gcd(&g, &q.eval(&xr)?.to_integer());
        }
        verified &= !g.is_zero() && crate::arith::strip_primes(g.magnitude(), s).is_one();
        family_gcds.push(g.to_string());
    }
    Ok(PointCertificate {
        x: x.iter().map(|c| c.to_string()).collect(),
        value: v.to_string(),
        factors,
        omega_outside: omega,
        family_gcds,
        verified,
    })
}

/// Layered search for points of `Z^d` where `P` has at most `r` prime
/// factors outside `S` and every family has S-supported gcd.
pub fn multivariable_sieve(problem: &UniSieveProblem, budgets: &SieveBudgets) -> Result<UniSieveResult> {
    check_problem(problem)?;
    if problem.nvars == 0 {
        return Err(Error::invalid("no variables"));
    }
    let mut ctx = Ctx { nvars: problem.nvars, budgets, levels: Vec::new(), bounds: Vec::new() };
    let active: Vec<usize> = (0..problem.nvars).collect();
    let level = solve(&mut ctx, &active, &problem.p, &problem.families, budgets.points)?;
    let mut points = Vec::with_capacity(level.points.len());
    for x in &level.points {
        points.push(certify_point(problem, x, level.r, &level.s, &budgets.factor)?);
    }
    Ok(UniSieveResult { r: level.r, s: level.s, points, levels: ctx.levels, single_variable_bounds: ctx.bounds })
}

/// An emitted group element with both evaluations of `f`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GroupPoint {
    pub coordinates: Vec<String>,
    pub matrix: String,
    /// `f` evaluated on the matrix entries.
    pub value: String,
    pub omega_outside: u32,
    /// `f` on the matrix agrees with the lattice-coordinate polynomial.
    pub routes_agree: bool,
    pub verified: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct GroupSieveResult {
    pub r: u32,
    pub s: PrimeSet,
    pub scale: String,
    pub conjugation: String,
    pub lattice_basis: Vec<String>,
    pub f_in_lattice_coordinates: String,
    pub points: Vec<GroupPoint>,
    pub inner: UniSieveResult,
}

impl GroupSieveResult {
    pub fn all_verified(&self) -> bool {
        self.points.iter().all(|p| p.verified && p.routes_agree)
    }
}

fn integerize_into(p: &MultiPoly, s: &mut PrimeSet, budget: &FactorBudget) -> Result<MultiPoly> {
    let (d, q) = p.integerize();
    *s = s.union(&certificate_primes(&d, budget)?);
    Ok(q)
}

fn gcd_outside_s(values: &[Rat], s: &PrimeSet) -> Result<Option<BigInt>> {
    let mut g = BigInt::zero();
    for v in values.iter().filter(|v| !v.is_zero()) {
        g = num_integer::Integer::gcd(&g, &s_integer_part(v, s)?);
    }
    Ok((!g.is_zero()).then_some(g))
}

/// Almost-prime values of `f` (a polynomial in the matrix entries) on the
/// group generated by unipotent `gens`, through lattice coordinates.
pub fn unipotent_group_sieve(
    gens: &[MatrixQ],
    f: &MultiPoly,
    families: &[Vec<MultiPoly>],
    budgets: &SieveBudgets,
) -> Result<GroupSieveResult> {
    let lat: NilpotentLog = malcev_lattice(gens)?;
    let n = lat.n;
    for q in std::iter::once(f).chain(families.iter().flatten()) {
        if q.nvars() != n * n {
            return Err(Error::Dimension { expected: n * n, got: q.nvars() });
        }
    }
    let k = lat.dim();
    let mut extra = PrimeSet::empty();
    let f_lat = f.compose(&lat.exp_map)?;
    let p = integerize_into(&f_lat, &mut extra, &budgets.factor)?;
    let fams: Vec<Vec<MultiPoly>> = families
        .iter()
        .map(|fam| {
            fam.iter()
                .map(|q| integerize_into(&q.compose(&lat.exp_map)?, &mut extra, &budgets.factor))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let problem = UniSieveProblem { nvars: k, p, families: fams };
    let mut inner = multivariable_sieve(&problem, budgets)?;
    let s = inner.s.union(&extra);
    inner.s = s.clone();

    let scale = Rat::from_integer(lat.scale.clone());
    let mut points = Vec::new();
    for cert in &inner.points {
        let c: Vec<BigInt> = cert.x.iter().map(|v| v.parse().expect("integer")).collect();
        // matrix route: exp of the scaled Lie algebra element
        let mut x = vec![Rat::zero(); n * (n - 1) / 2];
        for (ci, b) in c.iter().zip(&lat.basis) {
            for (xi, bi) in x.iter_mut().zip(upper_coordinates(b)) {
                *xi += rat_from(ci) * &scale * bi;
            }
        }
        let g = nilpotent_exp(&from_upper_coordinates(n, &x))?;
        let value = f.eval(g.entries())?;
        let lat_value = f_lat.eval(&c.iter().map(rat_from).collect::<Vec<_>>())?;
        let routes_agree = value == lat_value;
        let omega = if value.is_zero() {
            None
        } else {
            let part = s_integer_part(&value, &s)?;
            factorize(&part, &budgets.factor)?.omega_outside(&s, true)
        };
        let mut verified = omega.is_some_and(|w| w <= inner.r);
        for fam in families {
            let vals = fam.iter().map(|q| q.eval(g.entries())).collect::<Result<Vec<_>>>()?;
            verified &= gcd_outside_s(&vals, &s)?.is_some_and(|g| g.is_one());
        }
        points.push(GroupPoint {
            coordinates: cert.x.clone(),
            matrix: g.to_string(),
            value: value.to_string(),
            omega_outside: omega.unwrap_or(u32::MAX),
            routes_agree,
            verified,
        });
    }
    Ok(GroupSieveResult {
        r: inner.r,
        s,
        scale: lat.scale.to_string(),
        conjugation: lat.conjugation.to_string(),
        lattice_basis: lat.basis.iter().map(|b| b.to_string()).collect(),
        f_in_lattice_coordinates: f_lat.to_string(),
        points,
        inner,
    })
}

/// Largest emitted `omega_outside`, for comparison with `r`.
pub fn max_observed_omega(result: &UniSieveResult) -> u32 {
    result.points.iter().map(|p| p.omega_outside).max().unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::primes::is_prime_u64;
    use crate::poly::{matrix_parser, PolyParser};

    fn px(s: &str) -> MultiPoly {
        PolyParser::new(&["x"]).parse(s).unwrap()
    }

    fn ns(r: &SingleVarResult) -> Vec<i64> {
        r.hits.iter().map(|h| h.n.parse().unwrap()).collect()
    }

    #[test]
    fn single_variable_examples() {
        let b = FactorBudget::default();
        let one = BigInt::one();
        let zero = BigInt::zero();
        let r = single_variable_almost_primes(&px("x"), &PrimeSet::empty(), &one, &zero, 1, 100, 1000, &b).unwrap();
        let expect: Vec<i64> = (1..=100).filter(|&n| n == 1 || is_prime_u64(n as u64)).collect();
        assert_eq!(ns(&r), expect);
        assert!(r.exhausted);

        let r = single_variable_almost_primes(&px("x*(x+2)"), &PrimeSet::empty(), &BigInt::from(2), &one, 2, 20, 100, &b)
            .unwrap();
        for t in [3, 5, 11, 17] {
            assert!(ns(&r).contains(&t));
        }
        let s2 = PrimeSet::new([2]).unwrap();
        let r = single_variable_almost_primes(&px("x^2+x+2"), &s2, &one, &zero, 1, 10, 100, &b).unwrap();
        assert!(ns(&r).contains(&1));
    }

    #[test]
    fn base_case_delegation() {
        let problem = UniSieveProblem { nvars: 1, p: px("x"), families: vec![vec![px("x+1"), px("x")]] };
        let res = multivariable_sieve(&problem, &SieveBudgets { points: 20, ..Default::default() }).unwrap();
        assert_eq!(res.r, 1);
        assert!(res.s.is_empty());
        assert!(res.all_verified());
        assert!(res.points.iter().all(|p| p.x[0] == "1" || is_prime_u64(p.x[0].parse().unwrap())));
    }

    #[test]
    fn two_variables() {
        let par = PolyParser::new(&["x1", "x2"]);
        let problem = UniSieveProblem {
            nvars: 2,
            p: par.parse("x1").unwrap(),
            families: vec![vec![par.parse("x1").unwrap(), par.parse("x2").unwrap()]],
        };
        let res = multivariable_sieve(&problem, &SieveBudgets::default()).unwrap();
        assert!(res.points.len() >= 50);
        assert!(res.all_verified());
        assert!(res.bounds_inside_s());
        assert!(max_observed_omega(&res) <= res.r);
    }

    #[test]
    fn rejects_common_factor() {
        let par = PolyParser::new(&["x1", "x2"]);
        let problem = UniSieveProblem {
            nvars: 2,
            p: par.parse("x1").unwrap(),
            families: vec![vec![par.parse("x1*x2").unwrap(), par.parse("x2^2").unwrap()]],
        };
        assert!(matches!(multivariable_sieve(&problem, &SieveBudgets::default()), Err(Error::NotCoprime { .. })));
    }

    #[test]
    fn heisenberg_group() {
        let x = MatrixQ::from_ints(&[&[1, 1, 0], &[0, 1, 0], &[0, 0, 1]]);
        let y = MatrixQ::from_ints(&[&[1, 0, 0], &[0, 1, 1], &[0, 0, 1]]);
        let par = matrix_parser(3);
        let f = par.parse("x13").unwrap();
        let fam = vec![vec![par.parse("x12").unwrap(), par.parse("x23").unwrap()]];
        let res = unipotent_group_sieve(&[x, y], &f, &fam, &SieveBudgets::default()).unwrap();
        assert!(res.points.len() >= 100, "{} points", res.points.len());
        assert!(res.all_verified());
        assert!(res.inner.bounds_inside_s());
        assert_eq!(res.r, 1);
    }

    #[test]
    fn unit_function() {
        let x = MatrixQ::from_ints(&[&[1, 1], &[0, 1]]);
        let f = matrix_parser(2).parse("1").unwrap();
        let res = unipotent_group_sieve(&[x.clone()], &f, &[], &SieveBudgets { points: 10, ..Default::default() }).unwrap();
        assert_eq!(res.r, 0);
        assert_eq!(res.points.len(), 10);
        let f = matrix_parser(2).parse("x12").unwrap();
        let res = unipotent_group_sieve(&[x], &f, &[], &SieveBudgets { points: 10, ..Default::default() }).unwrap();
        assert_eq!(res.r, 1);
        assert!(res.all_verified());
    }
}
