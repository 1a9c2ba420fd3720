use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{padic_abs, s_integer_part, PrimeSet, Rat};
use crate::error::{Error, Result};
use crate::matgroup::{ball, generator_norm_constant, GeneratorSet};
use crate::poly::MultiPoly;

/// `floor(9 (s + 1) deg T (dim + 1) log M0 / ((1 - tau) log |Omega|)) + 1`.
pub fn r_formula(deg: u32, s_count: u32, dim: u32, tau: f64, omega_size: u32, t: f64, log_m0: f64) -> Result<u64> {
    if !(tau > 0.0 && tau < 1.0) {
        return Err(Error::invalid(format!("tau must lie in (0, 1), got {tau}")));
    }
    if omega_size < 2 {
        return Err(Error::invalid(format!("the generating set needs at least 2 elements, got {omega_size}")));
    }
    if !(t.is_finite() && t >= 0.0 && log_m0.is_finite() && log_m0 >= 0.0) {
        return Err(Error::invalid("T and log M0 must be finite and non-negative"));
    }
    let num = 9.0 * (s_count as f64 + 1.0) * deg as f64 * t * (dim as f64 + 1.0) * log_m0;
    let v = num / ((1.0 - tau) * (omega_size as f64).ln());
    if !v.is_finite() || v >= u64::MAX as f64 {
        return Err(Error::invalid(format!("r formula overflows: {v}")));
    }
    Ok(v.floor() as u64 + 1)
}

/// `sum |c| * prod_{p in S} max(1, max_c |c|_p)` over the coefficients of `f`.
pub fn coefficient_norm(f: &MultiPoly, s: &PrimeSet) -> Rat {
    let arch: Rat = f.terms().values().map(|c| c.abs()).sum();
    let mut acc = arch;
    for p in s.iter() {
        let m = f
            .terms()
            .values()
            .map(|c| padic_abs(c, p))
            .fold(Rat::one(), |a, b| if b > a { b } else { a });
        acc *= m;
    }
    acc
}

/// Pointwise check of `f_Gamma(gamma) <= C_f C^(deg (#S + 1) l(gamma))`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValueBoundCheck {
    #[serde(serialize_with = "crate::arith::serialize_rat")]
    pub c_f: Rat,
    #[serde(serialize_with = "crate::arith::serialize_rat")]
    pub c: Rat,
    pub degree: u32,
    pub radius: usize,
    pub checked: usize,
    pub violations: usize,
    /// Largest `f_Gamma / bound` seen.
    pub worst_ratio: f64,
}

impl ValueBoundCheck {
    pub fn ok(&self) -> bool {
        self.violations == 0
    }
}

pub fn value_bound_check(gens: &GeneratorSet, f: &MultiPoly, s: &PrimeSet, radius: usize, cap: usize) -> Result<ValueBoundCheck> {
    let n = gens.dim();
    if f.nvars() != n * n {
        return Err(Error::Dimension { expected: n * n, got: f.nvars() });
    }
    let c_f = coefficient_norm(f, s);
    let c = generator_norm_constant(gens, s);
    let degree = f.total_degree();
    let step = degree as usize * (s.len() + 1);
    let b = ball(gens, radius, cap)?;
    let rows = b
        .elements()
        .par_iter()
        .zip(b.iter().map(|(_, l)| l).collect::<Vec<_>>())
        .map(|(g, l)| {
            let v = f.eval(g.entries())?;
            if v.is_zero() {
                return Ok(None);
            }
            let m = Rat::from_integer(s_integer_part(&v, s)?);
            let bound = &c_f * num_traits::pow(c.clone(), step * l);
            Ok(Some((&m / &bound).to_f64().unwrap_or(f64::INFINITY)))
        })
        .collect::<Result<Vec<_>>>()?;
    let ratios: Vec<f64> = rows.into_iter().flatten().collect();
    Ok(ValueBoundCheck {
        c_f,
        c,
        degree,
        radius,
        checked: ratios.len(),
        violations: ratios.iter().filter(|&&r| r > 1.0).count(),
        worst_ratio: ratios.iter().copied().fold(0.0, f64::max),
    })
}
