//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

use std::time::Instant;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use affine_sieve::arith::{factorize, primes_up_to, rat, FactorBudget, PrimeSet, Rat};
use affine_sieve::heuristics::{borel_cantelli_sum, prime_factor_trend, two_power_values};
use affine_sieve::matgroup::{ball, GeneratorSet, MatrixQ};
use affine_sieve::modp::{
    count_nf, detect_ramified, generate_image, local_density, sl_order, splitting_census, verify_strong_approx,
    ExpectedOrder, VarietyStrategy,
};
use affine_sieve::orbit_sieve::{
    almost_prime_census, brun_bound, build_sequence, moduli_decomposition, r_formula, sieve_dimension_fit,
    BetaTable, SieveSequence,
};
use affine_sieve::poly::{matrix_parser, MultiPoly};
use affine_sieve::unipotent::{unipotent_group_sieve, SieveBudgets};

type Check = Result<String, String>;

const CAP: usize = 2_000_000;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn sl2_pair() -> Vec<MatrixQ> {
    vec![MatrixQ::from_ints(&[&[1, 2], &[0, 1]]), MatrixQ::from_ints(&[&[1, 0], &[2, 1]])]
}

fn poly(n: usize, text: &str) -> MultiPoly {
    matrix_parser(n).parse(text).expect("polynomial parses")
}

fn sym(gens: Vec<MatrixQ>) -> GeneratorSet {
    GeneratorSet::symmetrized(gens).expect("generators")
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

/// Brute force over all of SL_2(F_p): (#{trace = 2}, #SL_2(F_p)).
fn sl2_trace_two(p: u64) -> (u64, u64) {
    let (mut hits, mut total) = (0, 0);
    for a in 0..p {
        for b in 0..p {
            for c in 0..p {
                for d in 0..p {
                    if (a * d + p * p - b * c) % p == 1 % p {
                        total += 1;
                        if (a + d) % p == 2 % p {
                            hits += 1;
                        }
                    }
                }
            }
        }
    }
    (hits, total)
}

fn c1_local_density() -> Check {
    let start = Instant::now();
    let gens = sl2_pair();
    let f = poly(2, "tr - 2");
    for p in [3u64, 5, 7, 11, 13] {
        let d = local_density(&gens, &f, p, &PrimeSet::empty(), CAP).map_err(e)?;
        let (hits, total) = sl2_trace_two(p);
        let oracle = rat(hits as i64, total as i64);
        ensure(d.beta == oracle, format!("p = {p}: beta {} vs enumeration {oracle}", d.beta))?;
        ensure(oracle == rat(p as i64, (p * p - 1) as i64), format!("p = {p}: enumeration disagrees with p/(p^2-1)"))?;
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 5.0, format!("took {secs:.2} s"))?;
    Ok(format!("beta(p) = p/(p^2-1) for p in 3..13 in {secs:.2} s"))
}

fn c2_multiplicativity() -> Check {
    let gens = sl2_pair();
    let f = poly(2, "tr - 2");
    let none = PrimeSet::empty();
    let n_at = |q: u64| -> Result<u64, String> {
        let im = generate_image(&gens, q, CAP).map_err(e)?;
        count_nf(&im, &f, q, &none).map_err(e)
    };
    let mut notes = Vec::new();
    for (p1, p2) in [(3u64, 5u64), (3, 7)] {
        let (a, b, ab) = (n_at(p1)?, n_at(p2)?, n_at(p1 * p2)?);
        let oracle = sl2_trace_two(p1).0 * sl2_trace_two(p2).0;
        ensure(ab == a * b && ab == oracle, format!("N_f({}) = {ab}, product {}, oracle {oracle}", p1 * p2, a * b))?;
        notes.push(format!("N_f({}) = {ab}", p1 * p2));
    }
    Ok(notes.join(", "))
}

fn odd_prime_factors(q: u64) -> Vec<u64> {
    (3..=q).step_by(2).filter(|p| q % p == 0 && (2..*p).all(|d| p % d != 0)).collect()
}

fn c3_strong_approx() -> Check {
    let gens = sl2_pair();
    let exp = ExpectedOrder::SpecialLinear(2);
    for q in [3u64, 5, 7, 15, 35] {
        let r = verify_strong_approx(&gens, q, &exp, CAP).map_err(e)?;
        let classical: u128 = odd_prime_factors(q).iter().map(|&p| (p as u128) * (p as u128 * p as u128 - 1)).product();
        ensure(r.holds(), format!("q = {q}: {:?}", r.verdict))?;
        ensure(r.image_order == classical, format!("q = {q}: image {} vs {classical}", r.image_order))?;
        let formula: u128 = odd_prime_factors(q).iter().map(|&p| sl_order(2, p)).product();
        ensure(formula == classical, format!("q = {q}: sl_order disagrees"))?;
    }
    let r2 = verify_strong_approx(&gens, 2, &exp, CAP).map_err(e)?;
    ensure(!r2.holds() && r2.image_order == 1, format!("q = 2: {:?}, order {}", r2.verdict, r2.image_order))?;
    Ok("holds for 3, 5, 7, 15, 35; fails at 2 with image order 1".into())
}

fn c4_ramified() -> Check {
    let gens = sl2_pair();
    let f = poly(2, "tr - 2");
    let sample = ball(&sym(gens.clone()), 3, CAP).map_err(e)?;
    let rep = detect_ramified(&gens, &f, sample.elements(), 50, &PrimeSet::empty(), CAP).map_err(e)?;
    ensure(rep.confirmed.as_slice() == [2], format!("confirmed {:?}", rep.confirmed.as_slice()))?;
    let primes = primes_up_to(13);
    let table = BetaTable::from_images(&gens, &f, &primes, &rep.confirmed, CAP).map_err(e)?;
    ensure(table.beta_prime(2) == Some(Rat::zero()), "beta(2) is not a fiat zero")?;
    let seq = build_sequence(&sym(gens), &f, 4, &rep.confirmed, CAP).map_err(e)?;
    let dec = moduli_decomposition(&seq, &table, 13).map_err(e)?;
    for row in dec.rows.iter().filter(|r| r.d % 2 == 0) {
        ensure(row.ramified && row.beta.is_zero(), format!("d = {}: beta {}", row.d, row.beta))?;
    }
    Ok("ramified set {2}; beta vanishes on even moduli".into())
}

fn c5_chebotarev() -> Check {
    let eqs = vec![poly(2, "det - 1"), poly(2, "x11^2 + 1")];
    let small: Vec<u64> = primes_up_to(29).into_iter().filter(|&p| p > 2).collect();
    let c = splitting_census(&eqs, 2, &small, VarietyStrategy::BruteForce { max_prime: 29 }).map_err(e)?;
    for row in &c.rows {
        let (want_c, want_n) = if row.p % 4 == 1 { (2, 2 * (row.p as u128).pow(2)) } else { (0, 0) };
        ensure(row.c_hat == Some(want_c) && row.count == want_n, format!("p = {}: count {}, c_hat {:?}", row.p, row.count, row.c_hat))?;
    }
    let big: Vec<u64> = primes_up_to(2000).into_iter().filter(|&p| p > 2).collect();
    let c = splitting_census(&eqs, 2, &big, VarietyStrategy::Sliced { max_prime: 2000, node_budget: 20_000_000 }).map_err(e)?;
    let freq = c.frequency_of(2);
    ensure(c.unclassified.is_empty(), format!("unclassified {:?}", c.unclassified))?;
    ensure((freq - 0.5).abs() <= 0.05, format!("frequency of c_hat = 2 is {freq:.4}"))?;
    Ok(format!("exact counts for odd p <= 29; frequency {freq:.4} over {} primes", big.len()))
}

fn c6_sieve_dimension() -> Check {
    let primes = primes_up_to(10_000);
    let mut notes = Vec::new();
    for c in [1i64, 2] {
        let t = BetaTable::from_fn(&primes, &PrimeSet::empty(), |p| Ok(rat(c, p as i64).min(Rat::one())))
            .map_err(e)?;
        let fit = sieve_dimension_fit(&t, 3, 10_000).map_err(e)?;
        ensure((fit.slope - c as f64).abs() <= 0.05 * c as f64, format!("c = {c}: t_hat {:.4}", fit.slope))?;
        notes.push(format!("c = {c}: {:.4}", fit.slope));
    }
    let f = poly(2, "tr - 2");
    let ambient = vec![poly(2, "det - 1")];
    let primes = primes_up_to(2000);
    let t = BetaTable::from_variety_counts(&f, &ambient, &primes, &PrimeSet::new([2]).map_err(e)?, VarietyStrategy::default())
        .map_err(e)?;
    let fit = sieve_dimension_fit(&t, 3, 2000).map_err(e)?;
    ensure((fit.slope - 1.0).abs() <= 0.25, format!("tr - 2: t_hat {:.4}", fit.slope))?;
    notes.push(format!("tr - 2: {:.4}", fit.slope));
    Ok(notes.join(", "))
}

fn rough_oracle(values: &[u64], z: u64) -> u64 {
    let primes: Vec<u64> = (2..=z).filter(|&p| (2..p).all(|q| p % q != 0)).collect();
    values.iter().filter(|&&v| primes.iter().all(|p| v % p != 0)).count() as u64
}

fn c7_brun() -> Check {
    let values: Vec<u64> = (3..=10_000u64).map(|n| n * (n + 2)).collect();
    let seq = SieveSequence::from_values(values.iter().map(|&v| BigInt::from(v)), &PrimeSet::empty()).map_err(e)?;
    let mut notes = Vec::new();
    for z in [7u64, 10, 13] {
        let exact = rough_oracle(&values, z);
        let mut gaps = Vec::new();
        for b in [2u32, 3] {
            let r = brun_bound(&seq, z, b, &PrimeSet::empty(), 1 << 22).map_err(e)?;
            ensure(r.sifted == exact, format!("z = {z}: sifted {} vs oracle {exact}", r.sifted))?;
            ensure(r.lower <= exact as i128 && exact as i128 <= r.upper, format!("z = {z}, b = {b}: [{}, {}] misses {exact}", r.lower, r.upper))?;
            gaps.push(r.upper - r.lower);
        }
        ensure(gaps[1] < gaps[0] || gaps[0] == 0, format!("z = {z}: gap {} at b = 2, {} at b = 3", gaps[0], gaps[1]))?;
        notes.push(format!("z = {z}: gap {} -> {}", gaps[0], gaps[1]));
    }
    Ok(notes.join(", "))
}

fn parse_matrix(text: &str) -> Result<Vec<Rat>, String> {
    text.replace(['[', ']'], "")
        .split(',')
        .map(|t| affine_sieve::arith::parse_rat(t.trim()).map_err(e))
        .collect()
}

fn big_omega_outside(mut n: BigInt, s: &PrimeSet) -> u32 {
    n = n.magnitude().clone().into();
    let mut k = 0;
    let mut p = BigInt::from(2);
    while &p * &p <= n {
        while (&n % &p).is_zero() {
            n /= &p;
            if !s.contains(p.to_u64().unwrap()) {
                k += 1;
            }
        }
        p += 1;
    }
    if n > BigInt::one() && !n.to_u64().is_some_and(|v| s.contains(v)) {
        k += 1;
    }
    k
}

fn c8_unipotent() -> Check {
    let gens = vec![
        MatrixQ::from_ints(&[&[1, 1, 0], &[0, 1, 0], &[0, 0, 1]]),
        MatrixQ::from_ints(&[&[1, 0, 0], &[0, 1, 1], &[0, 0, 1]]),
    ];
    let f = poly(3, "x13");
    let fams = vec![vec![poly(3, "x12"), poly(3, "x23")]];
    let res = unipotent_group_sieve(&gens, &f, &fams, &SieveBudgets::default()).map_err(e)?;
    ensure(res.points.len() >= 100, format!("{} points", res.points.len()))?;
    for p in &res.points {
        let m = parse_matrix(&p.matrix)?;
        let integral_heisenberg = m.len() == 9
            && m.iter().all(|x| x.is_integer())
            && m[0].is_one() && m[4].is_one() && m[8].is_one()
            && m[3].is_zero() && m[6].is_zero() && m[7].is_zero();
        ensure(integral_heisenberg, format!("{} is not in the integer Heisenberg group", p.matrix))?;
        ensure(m[2].to_string() == p.value, format!("{}: x13 = {} vs reported {}", p.matrix, m[2], p.value))?;
        let omega = big_omega_outside(m[2].to_integer(), &res.s);
        ensure(omega <= res.r && omega == p.omega_outside, format!("{}: omega {omega}, r {}", p.matrix, res.r))?;
    }
    ensure(res.all_verified(), "a certificate failed its own check")?;
    ensure(res.inner.bounds_inside_s(), "a bad-prime bound escapes S")?;
    Ok(format!(
        "{} points re-verified, r = {}, S = {:?} covers {} bad-prime bounds",
        res.points.len(),
        res.r,
        res.s.as_slice(),
        res.inner.single_variable_bounds.len()
    ))
}

fn c9_r_formula() -> Check {
    let r = r_formula(1, 1, 3, 0.5, 4, 1.0, 1.0).map_err(e)?;
    ensure(r == 104, format!("worked input gives {r}"))?;
    let grid = |deg: u32, s: u32| r_formula(deg, s, 3, 0.5, 4, 1.0, 1.0).map_err(e);
    for deg in 1..=3 {
        for s in 1..=3 {
            let v = grid(deg, s)?;
            if s < 3 {
                ensure(grid(deg, s + 1)? >= v, format!("not monotone in #S at ({deg}, {s})"))?;
            }
            if deg < 3 {
                ensure(grid(deg + 1, s)? >= v, format!("not monotone in deg at ({deg}, {s})"))?;
            }
        }
    }
    Ok("r = 104; monotone on the 3x3 grid".into())
}

fn c10_two_power_trend() -> Check {
    let two = PrimeSet::new([2]).map_err(e)?;
    let budget = FactorBudget::default();
    let f = factorize(&BigInt::from(930), &budget).map_err(e)?;
    ensure(f.omega_outside(&two, false) == Some(3), "omega-odd(930) != 3")?;
    let table = prime_factor_trend(&two_power_values(120), &two, &budget).map_err(e)?;
    let fixture = include_str!("data/trend_two_power.tsv");
    let ours = table.to_tsv();
    for (i, (a, b)) in ours.lines().zip(fixture.lines()).enumerate() {
        ensure(a == b, format!("row {i}: {a:?} vs oracle {b:?}"))?;
    }
    ensure(ours.lines().count() == fixture.lines().count(), "row counts differ")?;
    let bc = borel_cantelli_sum(1, 2, 1, 1_000_000).map_err(e)?;
    let at = |m: u64| bc.checkpoints.iter().find(|c| c.0 == m).map(|c| c.1);
    let (s5, s6) = (at(100_000).ok_or("no 10^5 checkpoint")?, at(1_000_000).ok_or("no 10^6 checkpoint")?);
    ensure(s6 - s5 >= 0.0 && s6 - s5 < 2e-5, format!("increase {:.3e}", s6 - s5))?;
    ensure(bc.checkpoints.iter().all(|c| c.1 <= bc.bound), format!("partial sum {s6} above bound {}", bc.bound))?;
    Ok(format!("120 rows match; sum increases by {:.2e} from 10^5 to 10^6, bound {:.4}", s6 - s5, bc.bound))
}

fn c11_determinism() -> Check {
    let run = |threads: usize| -> Result<Vec<String>, String> {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().map_err(e)?;
        pool.install(|| {
            let gens = sl2_pair();
            let g = sym(gens.clone());
            let f = poly(2, "tr - 2");
            let two = PrimeSet::new([2]).map_err(e)?;
            let budget = FactorBudget::default();
            let seq = build_sequence(&g, &f, 5, &two, CAP).map_err(e)?;
            let table = BetaTable::from_images(&gens, &f, &primes_up_to(30), &two, CAP).map_err(e)?;
            let dec = moduli_decomposition(&seq, &table, 30).map_err(e)?;
            let census = almost_prime_census(&g, &f, 5, &two, 6, &budget, CAP).map_err(e)?;
            let trend = prime_factor_trend(&two_power_values(60), &two, &budget).map_err(e)?;
            let sieve = unipotent_group_sieve(
                &[MatrixQ::from_ints(&[&[1, 1, 0], &[0, 1, 0], &[0, 0, 1]]), MatrixQ::from_ints(&[&[1, 0, 0], &[0, 1, 1], &[0, 0, 1]])],
                &poly(3, "x13"),
                &[vec![poly(3, "x12"), poly(3, "x23")]],
                &SieveBudgets { points: 30, ..SieveBudgets::default() },
            )
            .map_err(e)?;
            Ok(vec![
                serde_json::to_string(&seq).map_err(e)?,
                serde_json::to_string(&dec).map_err(e)?,
                serde_json::to_string(&census).map_err(e)?,
                serde_json::to_string(&trend).map_err(e)?,
                serde_json::to_string(&sieve).map_err(e)?,
            ])
        })
    };
    let a = run(1)?;
    let b = run(4)?;
    let c = run(4)?;
    ensure(a == b && b == c, "payloads differ across replays")?;
    Ok(format!("{} payloads byte-identical over 3 replays", a.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 11] = [
        ("local density exactness", c1_local_density),
        ("multiplicativity", c2_multiplicativity),
        ("strong approximation", c3_strong_approx),
        ("ramified primes", c4_ramified),
        ("splitting shape", c5_chebotarev),
        ("sieve dimension", c6_sieve_dimension),
        ("Brun bracketing", c7_brun),
        ("unipotent sieve", c8_unipotent),
        ("r formula", c9_r_formula),
        ("two-power trend and Borel-Cantelli", c10_two_power_trend),
        ("determinism", c11_determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("criterion {:2} PASS  {name}: {msg} ({secs:.1} s)", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {:2} FAIL  {name}: {msg} ({secs:.1} s)", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
