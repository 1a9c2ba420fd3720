use std::fmt::Write as _;

use clap::{Subcommand, ValueEnum};
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use affine_sieve::arith::{is_prime_u64, parse_rat, prime_support, primes_in, FactorBudget, PrimeSet, Rat};
use affine_sieve::heuristics::{torus_heuristic, TorusSpec};
use affine_sieve::matgroup::{ball, orbit_from_ball};
use affine_sieve::modp::{detect_ramified, enumerate_variety_mod_p, local_density, splitting_census, verify_strong_approx};
use affine_sieve::orbit_sieve::{
    almost_prime_census, brun_bound, build_sequence, level_distribution_report, moduli_decomposition, r_formula,
    saturation_estimate, sieve_dimension_fit, value_bound_check, BetaTable,
};
use affine_sieve::unipotent::unipotent_group_sieve;
use affine_sieve::Error;

use crate::scenario::Scenario;
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Generate the image modulo p and count.
    Image,
    /// Count points of the ambient equations with and without f.
    Variety,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(untagged)]
pub enum Command {
    /// Word-metric ball: size per word length.
    Ball {
        #[arg(long = "L", default_value_t = 4)]
        l: usize,
    },
    /// Orbit of the scenario vector under the ball.
    Orbit {
        #[arg(long = "L", default_value_t = 4)]
        l: usize,
    },
    /// beta(p) from the image modulo one prime.
    LocalDensity {
        #[arg(long)]
        p: u64,
    },
    /// beta(p) over a range of primes.
    BetaTable {
        #[arg(long, default_value_t = 2)]
        pmin: u64,
        #[arg(long, default_value_t = 31)]
        pmax: u64,
        #[arg(long, value_enum, default_value_t = Method::Image)]
        method: Method,
    },
    /// Compare the image modulo squarefree q with the expected group order.
    StrongApprox {
        #[arg(long)]
        q: u64,
    },
    /// Primes dividing f on the whole group.
    Ramified {
        #[arg(long)]
        pmax: Option<u64>,
        /// Radius of the ball sampled for candidates.
        #[arg(long = "L", default_value_t = 3)]
        l: usize,
    },
    /// Points of the ambient equations and f over F_p.
    VarietyCount {
        #[arg(long)]
        p: u64,
        /// Count the ambient equations alone.
        #[arg(long)]
        without_f: bool,
    },
    /// Leading coefficients of point counts of V(f) over a prime range.
    SplittingCensus {
        #[arg(long, default_value_t = 3)]
        pmin: u64,
        #[arg(long, default_value_t = 200)]
        pmax: u64,
        /// Dimension of V(f); defaults to the group dimension minus one.
        #[arg(long)]
        dim: Option<u32>,
    },
    /// The sequence a_n(L).
    Sequence {
        #[arg(long = "L", default_value_t = 4)]
        l: usize,
    },
    /// A_d = beta(d) X + r_d for squarefree d <= D.
    Decompose {
        #[arg(long = "L", default_value_t = 4)]
        l: usize,
        #[arg(long = "D", default_value_t = 30)]
        d: u64,
        #[arg(long, value_enum, default_value_t = Method::Image)]
        method: Method,
    },
    /// Remainder totals and the least tau on a grid.
    LevelReport {
        #[arg(long = "L", default_value_t = 4)]
        l: usize,
        #[arg(long = "D", default_value_t = 30)]
        d: u64,
        #[arg(long, value_enum, default_value_t = Method::Image)]
        method: Method,
        /// Comma-separated tau values (default 0, 0.05, ..., 1).
        #[arg(long, value_delimiter = ',')]
        tau_grid: Vec<String>,
    },
    /// Fit of sum beta(p) log p against log z.
    SieveDim {
        #[arg(long, default_value_t = 3)]
        w: u64,
        #[arg(long, default_value_t = 2000)]
        z: u64,
        #[arg(long, value_enum, default_value_t = Method::Variety)]
        method: Method,
    },
    /// Truncated inclusion-exclusion bracket on z-rough entries.
    BrunBound {
        #[arg(long = "L", default_value_t = 4)]
        l: usize,
        #[arg(long, default_value_t = 10)]
        z: u64,
        #[arg(long, default_value_t = 2)]
        b: u32,
    },
    /// Elements with at most r prime factors of f outside S.
    Census {
        #[arg(long = "L", default_value_t = 4)]
        l: usize,
        #[arg(long)]
        r_max: Option<u32>,
    },
    /// Least r whose census sample passes the density test.
    Saturate {
        #[arg(long = "D")]
        d: Option<u32>,
        #[arg(long = "Lmax", default_value_t = 6)]
        l_max: usize,
        #[arg(long)]
        r_max: Option<u32>,
    },
    /// Unipotent-group sieve through lattice coordinates.
    UniSieve {
        #[arg(long)]
        points: Option<usize>,
    },
    /// Norm growth, factor trend and comparison sums on a torus.
    TorusHeuristic {
        #[arg(long = "M")]
        m: Option<u32>,
        #[arg(long)]
        nu: Option<u32>,
        #[arg(long, value_delimiter = ',', default_value = "1,2")]
        r: Vec<u32>,
    },
    /// Check the S-integer part of f against the height bound on a ball.
    ValueBound {
        #[arg(long = "L", default_value_t = 6)]
        l: usize,
    },
    /// Evaluate the almost-prime bound formula.
    RFormula {
        #[arg(long)]
        deg: u32,
        #[arg(long)]
        s: u32,
        #[arg(long)]
        dim: u32,
        #[arg(long)]
        tau: String,
        #[arg(long)]
        omega: u32,
        #[arg(long = "T")]
        t: String,
        #[arg(long = "logM0")]
        log_m0: String,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Ball { .. } => "ball",
            Command::Orbit { .. } => "orbit",
            Command::LocalDensity { .. } => "local-density",
            Command::BetaTable { .. } => "beta-table",
            Command::StrongApprox { .. } => "strong-approx",
            Command::Ramified { .. } => "ramified",
            Command::VarietyCount { .. } => "variety-count",
            Command::SplittingCensus { .. } => "splitting-census",
            Command::Sequence { .. } => "sequence",
            Command::Decompose { .. } => "decompose",
            Command::LevelReport { .. } => "level-report",
            Command::SieveDim { .. } => "sieve-dim",
            Command::BrunBound { .. } => "brun-bound",
            Command::Census { .. } => "census",
            Command::Saturate { .. } => "saturate",
            Command::UniSieve { .. } => "uni-sieve",
            Command::TorusHeuristic { .. } => "torus-heuristic",
            Command::ValueBound { .. } => "value-bound",
            Command::RFormula { .. } => "r-formula",
        }
    }
}

pub struct Output {
    pub human: String,
    pub outputs: Value,
    pub tsv: Option<String>,
    pub budgets_hit: Vec<String>,
}

fn value<T: Serialize>(v: &T) -> Result<Value, CliError> {
    serde_json::to_value(v).map_err(|e| CliError::Other(format!("serialization: {e}")))
}

fn need(s: Option<&Scenario>) -> Result<&Scenario, CliError> {
    s.ok_or_else(|| CliError::Invalid("this command needs --scenario".into()))
}

/// Decimal (`0.5`) or rational (`1/2`) literal, read exactly.
fn parse_exact(text: &str) -> Result<Rat, CliError> {
    let t = text.trim();
    match t.split_once('.') {
        Some((int, frac)) if !t.contains('/') => {
            let neg = int.starts_with('-');
            let digits = format!("{}{frac}", int.trim_start_matches('-'));
            let mut q = parse_rat(&format!("{digits}/1{}", "0".repeat(frac.len())))?;
            if neg {
                q = -q;
            }
            Ok(q)
        }
        _ => Ok(parse_rat(t)?),
    }
}

fn to_f64(q: &Rat) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

fn primes_between(lo: u64, hi: u64) -> Vec<u64> {
    if hi < lo {
        return Vec::new();
    }
    primes_in(lo, hi + 1)
}

/// The sieve set: declared S0 and S', denominator primes of the generators
/// and of f, and the ramified primes (declared, or detected on a sample).
fn sieve_set(scn: &Scenario) -> Result<(PrimeSet, Value), CliError> {
    let budget = FactorBudget::default();
    let mut s = scn.s0.union(&scn.s_prime);
    let dens = scn
        .raw_generators
        .iter()
        .map(|g| g.denominator_lcm())
        .chain(scn.f.terms().values().map(|c| c.denom().clone()));
    for d in dens {
        let (ps, large) = prime_support(&d, &budget)?;
        if !large.is_empty() {
            return Err(CliError::Invalid("denominator prime beyond 64 bits".into()));
        }
        s = s.union(&ps);
    }
    let detection = match &scn.file.ramified {
        Some(r) => {
            s = s.union(&PrimeSet::new(r.iter().copied())?);
            json!({ "declared": r })
        }
        None => {
            let sample = ball(&scn.gens, 3, scn.budgets().ball_cap)?;
            match detect_ramified(
                scn.gens.generators(),
                &scn.f,
                sample.elements(),
                scn.file.parameters.ramified_pmax,
                &s,
                scn.budgets().image_cap,
            ) {
                Ok(rep) => {
                    s = s.union(&rep.confirmed);
                    value(&rep)?
                }
                Err(Error::Inconclusive(m)) => json!({ "inconclusive": m }),
                Err(e) => return Err(e.into()),
            }
        }
    };
    Ok((s, detection))
}

fn beta_table(scn: &Scenario, primes: &[u64], method: Method, ram: &PrimeSet) -> Result<BetaTable, CliError> {
    match method {
        Method::Image => Ok(BetaTable::from_images(scn.gens.generators(), &scn.f, primes, ram, scn.budgets().image_cap)?),
        Method::Variety => {
            if scn.ambient.is_empty() {
                return Err(CliError::Invalid("the variety method needs ambient_ideal".into()));
            }
            Ok(BetaTable::from_variety_counts(&scn.f, &scn.ambient, primes, ram, scn.budgets().variety())?)
        }
    }
}

fn out(human: String, outputs: Value, tsv: Option<String>) -> Output {
    Output { human, outputs, tsv, budgets_hit: Vec::new() }
}

pub fn execute(cmd: &Command, scn: Option<&Scenario>) -> Result<Output, CliError> {
    match cmd {
        Command::RFormula { deg, s, dim, tau, omega, t, log_m0 } => {
            let (tau, t, lm) = (parse_exact(tau)?, parse_exact(t)?, parse_exact(log_m0)?);
            let r = r_formula(*deg, *s, *dim, to_f64(&tau), *omega, to_f64(&t), to_f64(&lm))?;
            let outputs = json!({ "r": r, "tau": tau.to_string(), "T": t.to_string(), "logM0": lm.to_string() });
            Ok(out(format!("r = {r}\n"), outputs, Some(format!("r\n{r}\n"))))
        }
        Command::Ball { l } => {
            let scn = need(scn)?;
            let b = ball(&scn.gens, *l, scn.budgets().ball_cap)?;
            let spheres = b.sphere_sizes();
            let mut human = format!("ball radius {l}: {} elements\n", b.len());
            let mut tsv = String::from("length\tcount\n");
            for (k, c) in spheres.iter().enumerate() {
                let _ = writeln!(human, "  |g| = {k}: {c}");
                let _ = writeln!(tsv, "{k}\t{c}");
            }
            Ok(out(human, json!({ "radius": l, "size": b.len(), "sphere_sizes": spheres }), Some(tsv)))
        }
        Command::Orbit { l } => {
            let scn = need(scn)?;
            let v = scn.orbit_vector()?;
            let b = ball(&scn.gens, *l, scn.budgets().ball_cap)?;
            let o = orbit_from_ball(&b, &v)?;
            let mut tsv = String::from("point\tlength\n");
            let points: Vec<Value> = o
                .points
                .iter()
                .map(|(p, len)| {
                    let coords: Vec<String> = p.iter().map(|x| x.to_string()).collect();
                    let _ = writeln!(tsv, "{}\t{len}", coords.join(","));
                    json!({ "point": coords, "length": len })
                })
                .collect();
            let human = format!("orbit slice at radius {l}: {} distinct points from {} group elements\n", o.len(), b.len());
            Ok(out(human, json!({ "radius": l, "ball_size": b.len(), "orbit_size": o.len(), "points": points }), Some(tsv)))
        }
        Command::LocalDensity { p } => {
            let scn = need(scn)?;
            let (s, detection) = sieve_set(scn)?;
            let d = local_density(scn.gens.generators(), &scn.f, *p, &s, scn.budgets().image_cap)?;
            let human = format!("p = {}: N_f = {}, |image| = {}, beta = {}{}\n", d.p, d.n_f, d.order, d.beta, if d.ramified { " (ramified)" } else { "" });
            let tsv = format!("p\tn_f\torder\tbeta\tramified\n{}\t{}\t{}\t{}\t{}\n", d.p, d.n_f, d.order, d.beta, d.ramified);
            Ok(out(human, json!({ "density": value(&d)?, "sieve_set": s, "ramified_detection": detection }), Some(tsv)))
        }
        Command::BetaTable { pmin, pmax, method } => {
            let scn = need(scn)?;
            let (s, detection) = sieve_set(scn)?;
            let primes = primes_between(*pmin, *pmax);
            let mut tsv = String::from("p\tn_f\torder\tbeta\tramified\n");
            let mut human = String::from("p\tbeta\n");
            let rows: Vec<Value> = match method {
                Method::Image => {
                    let ds = primes
                        .par_iter()
                        .map(|&p| local_density(scn.gens.generators(), &scn.f, p, &s, scn.budgets().image_cap))
                        .collect::<Result<Vec<_>, _>>()?;
                    ds.iter()
                        .map(|d| {
                            let _ = writeln!(tsv, "{}\t{}\t{}\t{}\t{}", d.p, d.n_f, d.order, d.beta, d.ramified);
                            let _ = writeln!(human, "{}\t{}{}", d.p, d.beta, if d.ramified { "  (ramified)" } else { "" });
                            value(d)
                        })
                        .collect::<Result<_, _>>()?
                }
                Method::Variety => {
                    let t = beta_table(scn, &primes, Method::Variety, &s)?;
                    t.primes()
                        .map(|(p, b)| {
                            let ram = s.contains(p);
                            let _ = writeln!(tsv, "{p}\t-\t-\t{b}\t{ram}");
                            let _ = writeln!(human, "{p}\t{b}{}", if ram { "  (ramified)" } else { "" });
                            json!({ "p": p, "beta": b.to_string(), "ramified": ram })
                        })
                        .collect()
                }
            };
            Ok(out(human, json!({ "method": method, "sieve_set": s, "ramified_detection": detection, "rows": rows }), Some(tsv)))
        }
        Command::StrongApprox { q } => {
            let scn = need(scn)?;
            let r = verify_strong_approx(scn.gens.generators(), *q, &scn.expected_order(), scn.budgets().image_cap)?;
            let mut human = format!("q = {}: |image| = {}, verdict {:?}\n", r.q, r.image_order, r.verdict);
            for (p, e) in &r.expected {
                let e = e.map(|e| e.to_string()).unwrap_or_else(|| "unknown".into());
                let _ = writeln!(human, "  expected order mod {p}: {e}");
            }
            Ok(out(human, value(&r)?, None))
        }
        Command::Ramified { pmax, l } => {
            let scn = need(scn)?;
            let sample = ball(&scn.gens, *l, scn.budgets().ball_cap)?;
            let pmax = pmax.unwrap_or(scn.file.parameters.ramified_pmax);
            let rep = detect_ramified(scn.gens.generators(), &scn.f, sample.elements(), pmax, &scn.s0, scn.budgets().image_cap)?;
            let human = format!(
                "ramified primes: {:?}\nrejected candidates: {:?}\nunresolved candidates: {:?}\nsample gcd: {}\n",
                rep.confirmed.as_slice(),
                rep.rejected,
                rep.unresolved,
                rep.sample_gcd
            );
            Ok(out(human, value(&rep)?, None))
        }
        Command::VarietyCount { p, without_f } => {
            let scn = need(scn)?;
            if !is_prime_u64(*p) {
                return Err(CliError::Invalid(format!("{p} is not prime")));
            }
            let mut eqs = scn.ambient.clone();
            if !without_f {
                eqs.push(scn.f.clone());
            }
            let count = enumerate_variety_mod_p(&eqs, *p, scn.budgets().variety())?;
            Ok(out(
                format!("#V(F_{p}) = {count}\n"),
                json!({ "p": p, "with_f": !without_f, "count": count.to_string() }),
                Some(format!("p\tcount\n{p}\t{count}\n")),
            ))
        }
        Command::SplittingCensus { pmin, pmax, dim } => {
            let scn = need(scn)?;
            let dim = match dim {
                Some(d) => *d,
                None => scn.group_dim()?.saturating_sub(1),
            };
            let mut eqs = scn.ambient.clone();
            eqs.push(scn.f.clone());
            let primes = primes_between(*pmin, *pmax);
            let c = splitting_census(&eqs, dim, &primes, scn.budgets().variety())?;
            let mut tsv = String::from("p\tcount\tc_hat\tresidual\n");
            for r in &c.rows {
                let ch = r.c_hat.map(|v| v.to_string()).unwrap_or_else(|| "-".into());
                let _ = writeln!(tsv, "{}\t{}\t{ch}\t{}", r.p, r.count, r.residual);
            }
            let mut human = format!("dimension {dim}, {} primes\n", c.rows.len());
            for (k, v) in &c.frequencies {
                let _ = writeln!(human, "  c_hat = {k}: {v} primes ({:.3})", c.frequency_of(*k));
            }
            let _ = writeln!(human, "unclassified: {:?}\nBezout check ok: {}", c.unclassified, c.bezout.ok);
            Ok(out(human, value(&c)?, Some(tsv)))
        }
        Command::Sequence { l } => {
            let scn = need(scn)?;
            let (s, detection) = sieve_set(scn)?;
            let seq = build_sequence(&scn.gens, &scn.f, *l, &s, scn.budgets().ball_cap)?;
            let mut tsv = String::from("n\ta_n\n");
            for (n, c) in &seq.entries {
                let _ = writeln!(tsv, "{n}\t{c}");
            }
            let human = format!(
                "radius {l}, S = {:?}: X = {}, skipped (f = 0) = {}, distinct values = {}\n",
                s.as_slice(),
                seq.x,
                seq.skipped,
                seq.entries.len()
            );
            Ok(out(human, json!({ "sequence": value(&seq)?, "ramified_detection": detection }), Some(tsv)))
        }
        Command::Decompose { l, d, method } | Command::LevelReport { l, d, method, .. } => {
            let scn = need(scn)?;
            let (s, _) = sieve_set(scn)?;
            let seq = build_sequence(&scn.gens, &scn.f, *l, &s, scn.budgets().ball_cap)?;
            let primes = primes_between(2, *d);
            let table = beta_table(scn, &primes, *method, &s)?;
            let dec = moduli_decomposition(&seq, &table, *d)?;
            let mut tsv = String::from("d\tA_d\tbeta\tprediction\tremainder\tramified\n");
            for r in &dec.rows {
                let _ = writeln!(tsv, "{}\t{}\t{}\t{}\t{}\t{}", r.d, r.a_d, r.beta, r.prediction, r.remainder, r.ramified);
            }
            if let Command::LevelReport { tau_grid, .. } = cmd {
                let grid: Vec<f64> = if tau_grid.is_empty() {
                    (0..=20).map(|i| i as f64 / 20.0).collect()
                } else {
                    tau_grid.iter().map(|t| parse_exact(t).map(|q| to_f64(&q))).collect::<Result<_, _>>()?
                };
                let dim = scn.group_dim()? as f64;
                let eps = to_f64(&scn.eps()?);
                let rep = level_distribution_report(&dec, &grid, dim, eps);
                let human = format!(
                    "X = {}, D = {}: sum |r_d| = {}, max |r_d| = {} at d = {}, least tau = {}\n",
                    rep.x,
                    rep.d_max,
                    to_f64(&rep.sum_abs),
                    to_f64(&rep.max_abs),
                    rep.argmax,
                    rep.least_tau.map(|t| t.to_string()).unwrap_or_else(|| "none on grid".into())
                );
                let tau = scn.tau()?;
                return Ok(out(human, json!({ "report": value(&rep)?, "scenario_tau": tau.to_string(), "sieve_set": s }), Some(tsv)));
            }
            let human = format!("X = {}, {} squarefree moduli up to {}\n", dec.x, dec.rows.len(), d);
            Ok(out(human, json!({ "decomposition": value(&dec)?, "sieve_set": s, "method": method }), Some(tsv)))
        }
        Command::SieveDim { w, z, method } => {
            let scn = need(scn)?;
            let (s, _) = sieve_set(scn)?;
            let primes = primes_between(2, *z);
            let table = beta_table(scn, &primes, *method, &s)?;
            let fit = sieve_dimension_fit(&table, *w, *z)?;
            let mut tsv = String::from("p\tbeta\n");
            for (p, b) in table.primes() {
                let _ = writeln!(tsv, "{p}\t{b}");
            }
            let human = format!(
                "window [{}, {}], {} primes: t_hat = {:.4}, intercept = {:.4}, residual = {:.4}\n",
                fit.w, fit.z, fit.primes, fit.slope, fit.intercept, fit.residual
            );
            Ok(out(human, json!({ "fit": value(&fit)?, "method": method, "sieve_set": s }), Some(tsv)))
        }
        Command::BrunBound { l, z, b } => {
            let scn = need(scn)?;
            let (s, _) = sieve_set(scn)?;
            let seq = build_sequence(&scn.gens, &scn.f, *l, &s, scn.budgets().ball_cap)?;
            let r = brun_bound(&seq, *z, *b, &s, scn.budgets().brun_moduli)?;
            let human = format!(
                "z = {}, b = {}: {} <= sifted = {} <= {} ({} moduli)\n",
                r.z, r.b, r.lower, r.sifted, r.upper, r.moduli
            );
            Ok(out(human, json!({ "bound": value(&r)?, "x": seq.x, "sieve_set": s }), None))
        }
        Command::Census { l, r_max } => {
            let scn = need(scn)?;
            let (s, _) = sieve_set(scn)?;
            let r_max = r_max.unwrap_or(scn.file.parameters.r_max);
            let c = almost_prime_census(&scn.gens, &scn.f, *l, &s, r_max, &scn.budgets().factor(), scn.budgets().ball_cap)?;
            let mut tsv = String::from("r\tcount\n");
            let mut human = format!("radius {l}, |ball| = {}, S = {:?}\n", c.ball_size, s.as_slice());
            for (r, n) in c.counts.iter().enumerate() {
                let _ = writeln!(tsv, "{r}\t{n}");
                let _ = writeln!(human, "  r <= {r}: {n}");
            }
            let _ = writeln!(human, "zeros: {}, unfactored: {}", c.zeros, c.unfactored);
            let mut o = out(human, value(&c)?, Some(tsv));
            if c.unfactored > 0 {
                o.budgets_hit.push(format!("factorization: {} values", c.unfactored));
            }
            Ok(o)
        }
        Command::Saturate { d, l_max, r_max } => {
            let scn = need(scn)?;
            let (s, _) = sieve_set(scn)?;
            let degree = d.unwrap_or(scn.file.parameters.density_degree);
            let mut schedule: Vec<usize> = scn.file.parameters.l_schedule.iter().copied().filter(|&l| l < *l_max).collect();
            if schedule.is_empty() && *l_max > 0 {
                schedule.push(l_max - 1);
            }
            schedule.push(*l_max);
            let r_max = r_max.unwrap_or(scn.file.parameters.r_max);
            let est = saturation_estimate(
                &scn.gens,
                &scn.f,
                &s,
                degree,
                &schedule,
                &scn.ambient,
                r_max,
                &scn.budgets().factor(),
                scn.budgets().ball_cap,
            )?;
            let mut tsv = String::from("L\tr_hat\tverdicts\n");
            let mut human = format!("{} (D = {degree}, S = {:?})\n", est.kind, s.as_slice());
            for lv in &est.levels {
                let rh = lv.r_hat.map(|r| r.to_string()).unwrap_or_else(|| "-".into());
                let _ = writeln!(tsv, "{}\t{rh}\t{}", lv.radius, lv.verdicts.join(";"));
                let _ = writeln!(human, "  L = {}: r_hat = {rh}", lv.radius);
            }
            let _ = writeln!(human, "verdict: {:?}, stable: {}", est.verdict, est.stable);
            Ok(out(human, value(&est)?, Some(tsv)))
        }
        Command::UniSieve { points } => {
            let scn = need(scn)?;
            let mut budgets = scn.budgets().sieve();
            if let Some(p) = points {
                budgets.points = *p;
            }
            let res = unipotent_group_sieve(&scn.raw_generators, &scn.f, &scn.families, &budgets)?;
            let mut tsv = String::from("coordinates\tvalue\tomega\tverified\n");
            for p in &res.points {
                let _ = writeln!(tsv, "{}\t{}\t{}\t{}", p.coordinates.join(","), p.value, p.omega_outside, p.verified && p.routes_agree);
            }
            let human = format!(
                "r = {}, S = {:?}, {} points, all verified: {}\n",
                res.r,
                res.s.as_slice(),
                res.points.len(),
                res.all_verified()
            );
            Ok(out(human, value(&res)?, Some(tsv)))
        }
        Command::ValueBound { l } => {
            let scn = need(scn)?;
            let (s, _) = sieve_set(scn)?;
            let f = scn.lift.as_ref().unwrap_or(&scn.f);
            let v = value_bound_check(&scn.gens, f, &s, *l, scn.budgets().ball_cap)?;
            let human = format!(
                "C_f = {}, C = {}, degree {}: {} elements checked, {} violations, worst ratio {:.3e}\n",
                v.c_f, v.c, v.degree, v.checked, v.violations, v.worst_ratio
            );
            Ok(out(human, json!({ "check": value(&v)?, "lift_used": scn.lift.is_some(), "sieve_set": s }), None))
        }
        Command::TorusHeuristic { m, nu, r } => {
            let scn = need(scn)?;
            let m = m.or(scn.file.parameters.box_radius).unwrap_or(10);
            let spec = TorusSpec::new(scn.raw_generators.clone(), m)?;
            let nu = nu.or(scn.file.parameters.nu).unwrap_or(spec.rank() as u32 + 1);
            let rep = torus_heuristic(&spec, nu, r, &scn.s0, &scn.budgets().factor())?;
            let g = &rep.growth;
            let mut human = format!(
                "A1 = {:.4}, A2 = {:.4}, K = {:.4}, envelope ok: {}, degenerate: {}\n",
                g.a1, g.a2, g.k, g.envelope_ok, g.degenerate
            );
            for d in &rep.trend.dyadic {
                let _ = writeln!(human, "  |m| in [{}, {}]: min omega = {:?}", d.lo, d.hi, d.min_omega);
            }
            for bc in &rep.borel_cantelli {
                let _ = writeln!(
                    human,
                    "  r = {}: partial sum {:.6}, last increment {:.3e}, bound {:.6}",
                    bc.r,
                    bc.checkpoints.last().map(|c| c.1).unwrap_or(0.0),
                    bc.last_increment,
                    bc.bound
                );
            }
            Ok(out(human, value(&rep)?, Some(rep.trend.to_tsv())))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use affine_sieve::arith::rat;

    #[test]
    fn exact_decimals() {
        assert_eq!(parse_exact("0.5").unwrap(), rat(1, 2));
        assert_eq!(parse_exact("-1.25").unwrap(), rat(-5, 4));
        assert_eq!(parse_exact("3/4").unwrap(), rat(3, 4));
        assert_eq!(parse_exact("2").unwrap(), rat(2, 1));
        assert!(parse_exact("x").is_err());
    }
}
