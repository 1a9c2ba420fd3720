//! Infix polynomial literals: `x11^2 + 1`, `3/4*x1*x2 - x3`, `2(x_{12} - 1)`.
//!
//! Variable names are matched after dropping `_`, `{` and `}`, so `x_{12}`,
//! `x_12` and `x12` all name the same coordinate. Division is allowed only
//! by nonzero constants. Named macros (for example `tr`, `det`) expand to
//! caller-supplied polynomials.

use std::collections::HashMap;

use num_bigint::BigInt;

use super::MultiPoly;
use crate::arith::Rat;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Op(char),
}

fn normalize(name: &str) -> String {
    name.chars().filter(|c| !matches!(c, '_' | '{' | '}')).collect()
}

fn tokenize(s: &str) -> Result<Vec<Tok>> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            out.push(Tok::Num(text.parse().expect("digits")));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || matches!(chars[i], '_' | '{' | '}')) {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            out.push(Tok::Ident(normalize(&text)));
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(Error::invalid(format!("unexpected character {c:?} in polynomial {s:?}")));
        }
    }
    Ok(out)
}

/// Parser bound to an ordered list of variable names.
pub struct PolyParser {
    names: Vec<String>,
    macros: HashMap<String, MultiPoly>,
}

impl PolyParser {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Self {
        PolyParser {
            names: names.iter().map(|n| normalize(n.as_ref())).collect(),
            macros: HashMap::new(),
        }
    }

    pub fn with_macro(mut self, name: &str, p: MultiPoly) -> Self {
        assert_eq!(p.nvars(), self.names.len());
        self.macros.insert(normalize(name), p);
        self
    }

    pub fn nvars(&self) -> usize {
        self.names.len()
    }

    pub fn parse(&self, text: &str) -> Result<MultiPoly> {
        let toks = tokenize(text)?;
        let mut st = State { toks: &toks, pos: 0, p: self, text };
        let e = st.expr()?;
        if st.pos != toks.len() {
            return Err(st.err("trailing input"));
        }
        Ok(e)
    }
}

struct State<'a> {
    toks: &'a [Tok],
    pos: usize,
    p: &'a PolyParser,
    text: &'a str,
}

impl State<'_> {
    fn err(&self, what: &str) -> Error {
        Error::invalid(format!("{what} at token {} in polynomial {:?}", self.pos, self.text))
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<MultiPoly> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = acc.add(&self.term()?);
            } else if self.eat('-') {
                acc = acc.sub(&self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn starts_factor(&self) -> bool {
        matches!(self.peek(), Some(Tok::Num(_)) | Some(Tok::Ident(_)) | Some(Tok::Op('(')))
    }

    fn term(&mut self) -> Result<MultiPoly> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = acc.mul(&self.unary()?);
            } else if self.eat('/') {
                let d = self.unary()?;
                if !d.is_constant() || d.is_zero() {
                    return Err(self.err("division by a non-constant or zero"));
                }
                acc = acc.scale(&d.constant_term().recip());
            } else if self.starts_factor() {
                acc = acc.mul(&self.power()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<MultiPoly> {
        if self.eat('-') {
            return Ok(self.unary()?.neg());
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<MultiPoly> {
        let base = self.atom()?;
        if self.eat('^') {
            match self.peek().cloned() {
                Some(Tok::Num(n)) => {
                    self.pos += 1;
                    let e: u32 = n.try_into().map_err(|_| self.err("exponent too large"))?;
                    Ok(base.pow(e))
                }
                _ => Err(self.err("expected a non-negative integer exponent")),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<MultiPoly> {
        let n = self.p.nvars();
        match self.peek().cloned() {
            Some(Tok::Num(v)) => {
                self.pos += 1;
                Ok(MultiPoly::constant(n, Rat::from_integer(v)))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if let Some(i) = self.p.names.iter().position(|x| *x == name) {
                    Ok(MultiPoly::var(n, i))
                } else if let Some(m) = self.p.macros.get(&name) {
                    Ok(m.clone())
                } else {
                    Err(self.err(&format!("unknown variable {name:?}")))
                }
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(self.err("missing ')'"));
                }
                Ok(e)
            }
            _ => Err(self.err("expected a number, variable or '('")),
        }
    }
}

/// Names `x11, x12, ..., xnn` for the entries of an n x n matrix.
pub fn matrix_entry_names(n: usize) -> Vec<String> {
    let mut v = Vec::with_capacity(n * n);
    for i in 1..=n {
        for j in 1..=n {
            v.push(format!("x{i}{j}"));
        }
    }
    v
}

/// Names `x1, ..., xk`.
pub fn coordinate_names(k: usize) -> Vec<String> {
    (1..=k).map(|i| format!("x{i}")).collect()
}

/// Trace and determinant of the generic n x n matrix, in entry variables.
pub fn trace_poly(n: usize) -> MultiPoly {
    let mut p = MultiPoly::zero(n * n);
    for i in 0..n {
        p = p.add(&MultiPoly::var(n * n, i * n + i));
    }
    p
}

pub fn det_poly(n: usize) -> MultiPoly {
    let nv = n * n;
    let entries: Vec<Vec<MultiPoly>> = (0..n)
        .map(|i| (0..n).map(|j| MultiPoly::var(nv, i * n + j)).collect())
        .collect();
    det_of(&entries, nv)
}

fn det_of(m: &[Vec<MultiPoly>], nv: usize) -> MultiPoly {
    let n = m.len();
    if n == 0 {
        return MultiPoly::one(nv);
    }
    if n == 1 {
        return m[0][0].clone();
    }
    let mut acc = MultiPoly::zero(nv);
    for j in 0..n {
        if m[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<MultiPoly>> = m[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, x)| x.clone()).collect())
            .collect();
        let t = m[0][j].mul(&det_of(&minor, nv));
        acc = if j % 2 == 0 { acc.add(&t) } else { acc.sub(&t) };
    }
    acc
}

/// Parser over matrix-entry names with `tr` and `det` macros.
pub fn matrix_parser(n: usize) -> PolyParser {
    PolyParser::new(&matrix_entry_names(n))
        .with_macro("tr", trace_poly(n))
        .with_macro("det", det_poly(n))
}
