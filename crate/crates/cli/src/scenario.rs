//! Scenario files: TOML with a closed schema. Every table rejects unknown
//! keys, and rationals are written as integers or quoted `"p/q"` strings.

use std::path::Path;

use affine_sieve::arith::{parse_rat, FactorBudget, PrimeSet, Rat};
use affine_sieve::matgroup::{affine_embed, GeneratorSet, MatrixQ, DEFAULT_BALL_CAP};
use affine_sieve::modp::{ExpectedOrder, VarietyStrategy, DEFAULT_IMAGE_CAP};
use affine_sieve::poly::{matrix_parser, MultiPoly, PolyParser};
use affine_sieve::unipotent::SieveBudgets;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(untagged)]
pub enum Literal {
    Int(i64),
    Text(String),
    Float(f64),
}

impl Literal {
    pub fn to_rat(&self) -> Result<Rat, CliError> {
        match self {
            Literal::Int(v) => Ok(Rat::from_integer((*v).into())),
            Literal::Text(s) => Ok(parse_rat(s)?),
            Literal::Float(v) => Err(CliError::Invalid(format!(
                "floating-point literal {v} is not allowed; write an exact rational such as \"3/4\""
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
pub enum GroupKind {
    #[serde(rename = "SL_n")]
    SpecialLinear,
    #[serde(rename = "affine-embedded")]
    AffineEmbedded,
    #[serde(rename = "unipotent-triangular")]
    UnipotentTriangular,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Ambient {
    pub n: usize,
    pub kind: GroupKind,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Lift {
    pub f: String,
    pub degree: u32,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Parameters {
    #[serde(default = "default_tau")]
    pub tau: Literal,
    #[serde(rename = "T", default = "default_one")]
    pub t: Literal,
    #[serde(default = "default_eps")]
    pub eps: Literal,
    /// Dimension of the ambient group.
    pub dim: Option<u32>,
    #[serde(default = "default_degree")]
    pub density_degree: u32,
    #[serde(default)]
    pub l_schedule: Vec<usize>,
    #[serde(default = "default_r_max")]
    pub r_max: u32,
    pub nu: Option<u32>,
    pub box_radius: Option<u32>,
    #[serde(default = "default_ramified_pmax")]
    pub ramified_pmax: u64,
}

fn default_tau() -> Literal {
    Literal::Text("1/2".into())
}
fn default_one() -> Literal {
    Literal::Int(1)
}
fn default_eps() -> Literal {
    Literal::Text("1/10".into())
}
fn default_degree() -> u32 {
    1
}
fn default_r_max() -> u32 {
    6
}
fn default_ramified_pmax() -> u64 {
    50
}

impl Default for Parameters {
    fn default() -> Self {
        Parameters {
            tau: default_tau(),
            t: default_one(),
            eps: default_eps(),
            dim: None,
            density_degree: default_degree(),
            l_schedule: Vec::new(),
            r_max: default_r_max(),
            nu: None,
            box_radius: None,
            ramified_pmax: default_ramified_pmax(),
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Budgets {
    #[serde(default = "default_ball_cap")]
    pub ball_cap: usize,
    #[serde(default = "default_image_cap")]
    pub image_cap: usize,
    #[serde(default = "default_trial")]
    pub trial_bound: u64,
    #[serde(default = "default_rho")]
    pub rho_iterations: u64,
    #[serde(default = "default_variety_nodes")]
    pub variety_nodes: u64,
    #[serde(default = "default_variety_pmax")]
    pub variety_max_prime: u64,
    #[serde(default = "default_moduli")]
    pub brun_moduli: usize,
    #[serde(default = "default_sieve_points")]
    pub sieve_points: usize,
    #[serde(default = "default_search")]
    pub sieve_search_bound: u64,
}

fn default_ball_cap() -> usize {
    DEFAULT_BALL_CAP
}
fn default_image_cap() -> usize {
    DEFAULT_IMAGE_CAP
}
fn default_trial() -> u64 {
    FactorBudget::default().trial_bound
}
fn default_rho() -> u64 {
    FactorBudget::default().rho_iterations
}
fn default_variety_nodes() -> u64 {
    20_000_000
}
fn default_variety_pmax() -> u64 {
    2000
}
fn default_moduli() -> usize {
    affine_sieve::orbit_sieve::DEFAULT_MODULI_BUDGET
}
fn default_sieve_points() -> usize {
    SieveBudgets::default().points
}
fn default_search() -> u64 {
    SieveBudgets::default().search_bound
}

impl Default for Budgets {
    fn default() -> Self {
        toml::from_str("").expect("all budget fields have defaults")
    }
}

impl Budgets {
    pub fn factor(&self) -> FactorBudget {
        FactorBudget { trial_bound: self.trial_bound, rho_iterations: self.rho_iterations }
    }

    pub fn variety(&self) -> VarietyStrategy {
        VarietyStrategy::Sliced { max_prime: self.variety_max_prime, node_budget: self.variety_nodes }
    }

    pub fn sieve(&self) -> SieveBudgets {
        SieveBudgets { points: self.sieve_points, search_bound: self.sieve_search_bound, factor: self.factor(), ..SieveBudgets::default() }
    }
}

/// Optional perfect-core data, carried into reports verbatim.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Decomposition {
    pub pi: Option<String>,
    pub phi: Option<String>,
    pub notes: Option<String>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub name: String,
    pub description: Option<String>,
    pub ambient: Ambient,
    pub generators: Vec<Vec<Vec<Literal>>>,
    pub orbit_vector: Option<Vec<Literal>>,
    pub f: String,
    pub lift: Option<Lift>,
    #[serde(default)]
    pub s0: Vec<u64>,
    #[serde(default)]
    pub s_prime: Vec<u64>,
    pub ramified: Option<Vec<u64>>,
    #[serde(default)]
    pub ambient_ideal: Vec<String>,
    pub levi_semisimple: Option<bool>,
    #[serde(default)]
    pub families: Vec<Vec<String>>,
    #[serde(default)]
    pub parameters: Parameters,
    #[serde(default)]
    pub budgets: Budgets,
    pub decomposition: Option<Decomposition>,
}

/// A parsed, dimension-checked scenario.
pub struct Scenario {
    pub file: ScenarioFile,
    pub hash: String,
    /// Size of the matrices (after any affine embedding).
    pub n: usize,
    pub raw_generators: Vec<MatrixQ>,
    pub gens: GeneratorSet,
    pub f: MultiPoly,
    pub lift: Option<MultiPoly>,
    pub ambient: Vec<MultiPoly>,
    pub families: Vec<Vec<MultiPoly>>,
    pub s0: PrimeSet,
    pub s_prime: PrimeSet,
}

pub fn hash_bytes(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn parse_matrix(rows: &[Vec<Literal>]) -> Result<MatrixQ, CliError> {
    let rows = rows
        .iter()
        .map(|r| r.iter().map(Literal::to_rat).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    Ok(MatrixQ::from_rows(rows)?)
}

fn parse_affine(rows: &[Vec<Literal>], n: usize) -> Result<MatrixQ, CliError> {
    if rows.len() == n + 1 {
        return parse_matrix(rows);
    }
    if rows.len() != n || rows.iter().any(|r| r.len() != n + 1) {
        return Err(CliError::Invalid(format!(
            "affine generators are written as {n} rows [A | b] of length {} or as {}x{} blocks",
            n + 1,
            n + 1,
            n + 1
        )));
    }
    let a: Vec<Vec<Literal>> = rows.iter().map(|r| r[..n].to_vec()).collect();
    let b: Vec<Rat> = rows.iter().map(|r| r[n].to_rat()).collect::<Result<_, _>>()?;
    Ok(affine_embed(&parse_matrix(&a)?, &b)?)
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Scenario, CliError> {
        let bytes = std::fs::read(path).map_err(|e| CliError::Invalid(format!("cannot read {}: {e}", path.display())))?;
        let text = String::from_utf8(bytes.clone()).map_err(|_| CliError::Invalid("scenario is not UTF-8".into()))?;
        let file: ScenarioFile = toml::from_str(&text).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
        Scenario::from_file(file, hash_bytes(&bytes))
    }

    pub fn from_file(file: ScenarioFile, hash: String) -> Result<Scenario, CliError> {
        let n0 = file.ambient.n;
        if n0 == 0 {
            return Err(CliError::Invalid("ambient.n must be positive".into()));
        }
        if file.generators.is_empty() {
            return Err(CliError::Invalid("at least one generator is required".into()));
        }
        let raw_generators = file
            .generators
            .iter()
            .map(|g| match file.ambient.kind {
                GroupKind::AffineEmbedded => parse_affine(g, n0),
                _ => parse_matrix(g),
            })
            .collect::<Result<Vec<_>, _>>()?;
        let n = match file.ambient.kind {
            GroupKind::AffineEmbedded => n0 + 1,
            _ => n0,
        };
        for g in &raw_generators {
            if g.dim() != n {
                return Err(CliError::Invalid(format!("generator {g} is not {n}x{n}")));
            }
            match file.ambient.kind {
                GroupKind::SpecialLinear if !num_traits::One::is_one(&g.det()) => {
                    return Err(CliError::Invalid(format!("generator {g} does not have determinant 1")));
                }
                GroupKind::UnipotentTriangular if !g.is_upper_unipotent() => {
                    return Err(CliError::Invalid(format!("generator {g} is not upper unipotent")));
                }
                _ => {}
            }
        }
        let gens = GeneratorSet::symmetrized(raw_generators.clone())?;
        let parser: PolyParser = matrix_parser(n);
        let f = parser.parse(&file.f)?;
        let lift = match &file.lift {
            Some(l) => {
                let p = parser.parse(&l.f)?;
                if p.total_degree() > l.degree {
                    return Err(CliError::Invalid(format!(
                        "lift has degree {} above the declared {}",
                        p.total_degree(),
                        l.degree
                    )));
                }
                Some(p)
            }
            None => None,
        };
        let ambient = file.ambient_ideal.iter().map(|e| parser.parse(e)).collect::<Result<Vec<_>, _>>()?;
        let families = file
            .families
            .iter()
            .map(|fam| fam.iter().map(|e| parser.parse(e)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        if let Some(v) = &file.orbit_vector {
            if v.len() != n {
                return Err(CliError::Invalid(format!("orbit vector has length {}, expected {n}", v.len())));
            }
        }
        let s0 = PrimeSet::new(file.s0.iter().copied())?;
        let s_prime = PrimeSet::new(file.s_prime.iter().copied())?;
        Ok(Scenario { file, hash, n, raw_generators, gens, f, lift, ambient, families, s0, s_prime })
    }

    pub fn orbit_vector(&self) -> Result<Vec<Rat>, CliError> {
        match &self.file.orbit_vector {
            Some(v) => v.iter().map(Literal::to_rat).collect(),
            None => Err(CliError::Invalid("scenario has no orbit_vector".into())),
        }
    }

    pub fn expected_order(&self) -> ExpectedOrder {
        match self.file.ambient.kind {
            GroupKind::SpecialLinear => ExpectedOrder::SpecialLinear(self.n),
            _ if !self.ambient.is_empty() => ExpectedOrder::Variety(self.ambient.clone()),
            _ => ExpectedOrder::Unknown,
        }
    }

    /// Dimension of the ambient group: declared, or `n^2 - 1` for SL_n.
    pub fn group_dim(&self) -> Result<u32, CliError> {
        match (self.file.parameters.dim, self.file.ambient.kind) {
            (Some(d), _) => Ok(d),
            (None, GroupKind::SpecialLinear) => Ok((self.n * self.n - 1) as u32),
            _ => Err(CliError::Invalid("parameters.dim is required for this group kind".into())),
        }
    }

    pub fn tau(&self) -> Result<Rat, CliError> {
        self.file.parameters.tau.to_rat()
    }

    pub fn eps(&self) -> Result<Rat, CliError> {
        self.file.parameters.eps.to_rat()
    }

    pub fn budgets(&self) -> &Budgets {
        &self.file.budgets
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
name = "t"
f = "tr - 2"
generators = [[[1, 2], [0, 1]], [[1, 0], ["2", 1]]]
[ambient]
n = 2
kind = "SL_n"
"#;

    #[test]
    fn parses_minimal() {
        let f: ScenarioFile = toml::from_str(MINIMAL).unwrap();
        let s = Scenario::from_file(f, "h".into()).unwrap();
        assert_eq!(s.gens.len(), 4);
        assert_eq!(s.group_dim().unwrap(), 3);
        assert_eq!(s.budgets().ball_cap, DEFAULT_BALL_CAP);
    }

    #[test]
    fn rejects_unknown_keys_and_floats() {
        let bad = MINIMAL.replace("name = \"t\"", "name = \"t\"\nnmae = 1");
        assert!(toml::from_str::<ScenarioFile>(&bad).is_err());
        let bad = format!("{MINIMAL}[parameters]\ntua = \"1/2\"\n");
        assert!(toml::from_str::<ScenarioFile>(&bad).is_err());
        let fl = MINIMAL.replace("[[1, 2], [0, 1]]", "[[1, 2.5], [0, 1]]");
        let f: ScenarioFile = toml::from_str(&fl).unwrap();
        assert!(matches!(Scenario::from_file(f, "h".into()), Err(CliError::Invalid(_))));
    }

    #[test]
    fn affine_rows_embed() {
        let text = r#"
name = "aff"
f = "x13"
generators = [[[1, 0, 1], [0, 1, 0]], [[1, 0, 0], [0, 1, "1/2"]]]
[ambient]
n = 2
kind = "affine-embedded"
"#;
        let s = Scenario::from_file(toml::from_str(text).unwrap(), "h".into()).unwrap();
        assert_eq!(s.n, 3);
        assert_eq!(s.raw_generators[1].get(1, 2), &affine_sieve::arith::rat(1, 2));
    }
}
