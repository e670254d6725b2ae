//! Text syntax for algebra and module elements.
//!
//! Elements are sums of products: `3/2*x1^2*x2 - x2`, `(x1 + x2)*u - 2*v`.
//! Identifiers resolve to generator names first, then to basis labels; in a
//! DG polynomial algebra `x<k>` is the `k`-th variable.

use crate::algebra::{AlgebraElement, AlgebraKind, BasisLabel, GradedAlgebra};
use crate::error::{DgError, Result};
use crate::module::ModuleElement;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

fn lex(s: &str) -> Result<Vec<(usize, Tok)>> {
    let b = s.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < b.len() {
        let c = b[i] as char;
        let start = i;
        match c {
            ' ' | '\t' | '\n' => i += 1,
            '+' => {
                out.push((start, Tok::Plus));
                i += 1
            }
            '-' => {
                out.push((start, Tok::Minus));
                i += 1
            }
            '*' => {
                out.push((start, Tok::Star));
                i += 1
            }
            '^' => {
                out.push((start, Tok::Caret));
                i += 1
            }
            '(' => {
                out.push((start, Tok::LParen));
                i += 1
            }
            ')' => {
                out.push((start, Tok::RParen));
                i += 1
            }
            '0'..='9' => {
                while i < b.len() && b[i].is_ascii_digit() {
                    i += 1;
                }
                if i + 1 < b.len() && b[i] == b'/' && b[i + 1].is_ascii_digit() {
                    i += 1;
                    while i < b.len() && b[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                out.push((start, Tok::Num(s[start..i].to_string())));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'_' || b[i] == b'\'') {
                    i += 1;
                }
                out.push((start, Tok::Ident(s[start..i].to_string())));
            }
            _ => return Err(DgError::Parse(format!("unexpected character {c:?} at offset {start} in {s:?}"))),
        }
    }
    Ok(out)
}

/// Whether `s` is usable as a name inside expressions.
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

#[derive(Clone, Debug)]
enum Value {
    Alg(AlgebraElement),
    Module(ModuleElement),
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<(usize, Tok)>,
    pos: usize,
    alg: &'a GradedAlgebra,
    gens: &'a [String],
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> DgError {
        let at = self.toks.get(self.pos).map_or(self.src.len(), |t| t.0);
        DgError::Parse(format!("{msg} at offset {at} in {:?}", self.src))
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.1)
    }

    fn add(&self, a: Value, b: Value) -> Result<Value> {
        match (a, b) {
            (Value::Alg(x), Value::Alg(y)) => Ok(Value::Alg(x.add(&y))),
            (Value::Module(x), Value::Module(y)) => Ok(Value::Module(x.add(&y))),
            _ => Err(self.err("cannot add an algebra element to a module element")),
        }
    }

    fn neg(&self, a: Value) -> Value {
        let m1 = self.alg.field().from_i64(-1);
        match a {
            Value::Alg(x) => Value::Alg(x.neg()),
            Value::Module(x) => Value::Module(x.scale(&m1)),
        }
    }

    fn mul(&self, a: Value, b: Value) -> Result<Value> {
        match (a, b) {
            (Value::Alg(x), Value::Alg(y)) => Ok(Value::Alg(self.alg.mul(&x, &y)?)),
            (Value::Alg(x), Value::Module(y)) => Ok(Value::Module(y.left_mul(self.alg, &x)?)),
            _ => Err(self.err("module elements only take coefficients on the left")),
        }
    }

    fn expr(&mut self) -> Result<Value> {
        let mut negate = false;
        match self.peek() {
            Some(Tok::Minus) => {
                negate = true;
                self.pos += 1;
            }
            Some(Tok::Plus) => self.pos += 1,
            _ => {}
        }
        let mut acc = self.term()?;
        if negate {
            acc = self.neg(acc);
        }
        loop {
            let sign = match self.peek() {
                Some(Tok::Plus) => false,
                Some(Tok::Minus) => true,
                _ => return Ok(acc),
            };
            self.pos += 1;
            let mut t = self.term()?;
            if sign {
                t = self.neg(t);
            }
            acc = self.add(acc, t)?;
        }
    }

    fn term(&mut self) -> Result<Value> {
        let mut acc = self.power()?;
        while self.peek() == Some(&Tok::Star) {
            self.pos += 1;
            let f = self.power()?;
            acc = self.mul(acc, f)?;
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<Value> {
        let base = self.atom()?;
        if self.peek() != Some(&Tok::Caret) {
            return Ok(base);
        }
        self.pos += 1;
        let e: u32 = match self.peek() {
            Some(Tok::Num(n)) => n.parse().map_err(|_| self.err("exponent must be a non-negative integer"))?,
            _ => return Err(self.err("expected an exponent")),
        };
        self.pos += 1;
        let Value::Alg(x) = base else { return Err(self.err("cannot raise a module element to a power")) };
        let mut out = self.alg.one();
        for _ in 0..e {
            out = self.alg.mul(&out, &x)?;
        }
        Ok(Value::Alg(out))
    }

    fn atom(&mut self) -> Result<Value> {
        let tok = self.peek().cloned();
        match tok {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(Value::Alg(self.alg.scalar(self.alg.field().parse(&n)?)))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let v = self.expr()?;
                if self.peek() != Some(&Tok::RParen) {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(v)
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if let Some(j) = self.gens.iter().position(|g| *g == name) {
                    return Ok(Value::Module(ModuleElement::generator(self.alg, j)));
                }
                resolve_label(self.alg, &name).map(Value::Alg).ok_or_else(|| {
                    self.pos -= 1;
                    self.err(&format!("unknown name {name:?}"))
                })
            }
            _ => Err(self.err("expected a number, a name or '('")),
        }
    }
}

fn resolve_label(alg: &GradedAlgebra, name: &str) -> Option<AlgebraElement> {
    if let AlgebraKind::DgPolynomial { n, .. } = alg.kind() {
        let k: usize = name.strip_prefix('x')?.parse().ok()?;
        return (1..=*n).contains(&k).then(|| alg.variable(k));
    }
    alg.named(name).map(|r| AlgebraElement::basis(r.degree, r.index, alg.field().one()))
}

fn run(alg: &GradedAlgebra, gens: &[String], s: &str) -> Result<Value> {
    let mut p = Parser { src: s, toks: lex(s)?, pos: 0, alg, gens };
    let v = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(v)
}

pub fn parse_algebra_element(alg: &GradedAlgebra, s: &str) -> Result<AlgebraElement> {
    match run(alg, &[], s)? {
        Value::Alg(a) => Ok(a),
        Value::Module(_) => unreachable!(),
    }
}

/// Parses a module element over generators named `gens`. A bare `0` is the
/// zero element.
pub fn parse_module_element(alg: &GradedAlgebra, gens: &[String], s: &str) -> Result<ModuleElement> {
    match run(alg, gens, s)? {
        Value::Module(m) => Ok(m),
        Value::Alg(a) if a.is_zero() => Ok(ModuleElement::zero()),
        Value::Alg(_) => Err(DgError::Parse(format!("{s:?} has no generator factor"))),
    }
}

/// Canonical rendering: terms in basis order, coefficient first.
pub fn format_algebra_element(alg: &GradedAlgebra, a: &AlgebraElement) -> String {
    if a.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (k, t) in a.terms().iter().enumerate() {
        let label = alg.label(t.degree, t.index);
        let is_unit =
            matches!(label, BasisLabel::Monomial(e) if e.iter().all(|x| *x == 0)) || (t.degree == 0 && t.index == alg.unit_index());
        let (neg, mag) = if t.coeff.is_negative() { (true, -&t.coeff) } else { (false, t.coeff.clone()) };
        let body = if is_unit {
            mag.to_canonical_string()
        } else if mag.is_one() {
            label.to_string()
        } else {
            format!("{}*{}", mag.to_canonical_string(), label)
        };
        match (k, neg) {
            (0, false) => out.push_str(&body),
            (0, true) => {
                out.push('-');
                out.push_str(&body)
            }
            (_, false) => {
                out.push_str(" + ");
                out.push_str(&body)
            }
            (_, true) => {
                out.push_str(" - ");
                out.push_str(&body)
            }
        }
    }
    out
}

/// Canonical rendering of `Σ a_j g_j`.
pub fn format_module_element(alg: &GradedAlgebra, gens: &[String], m: &ModuleElement) -> String {
    if m.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (k, (j, a)) in m.coeffs().iter().enumerate() {
        let g = &gens[*j];
        let (neg, body) = if a.terms().len() == 1 {
            let t = &a.terms()[0];
            let single = AlgebraElement::from_terms([crate::algebra::Term {
                degree: t.degree,
                index: t.index,
                coeff: if t.coeff.is_negative() { -&t.coeff } else { t.coeff.clone() },
            }]);
            let c = format_algebra_element(alg, &single);
            let body = if c == "1" { g.clone() } else { format!("{c}*{g}") };
            (t.coeff.is_negative(), body)
        } else {
            (false, format!("({})*{g}", format_algebra_element(alg, a)))
        };
        let sep = match (k, neg) {
            (0, false) => "",
            (0, true) => "-",
            (_, false) => " + ",
            (_, true) => " - ",
        };
        out.push_str(sep);
        out.push_str(&body);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Field;

    #[test]
    fn polynomial_round_trip() {
        let q = Field::Rational;
        let a = GradedAlgebra::dg_polynomial(q, vec![q.zero(), q.zero()], 6).unwrap();
        let e = parse_algebra_element(&a, "3/2*x1^2*x2 - x2^3 + 2*x1*x1*x2").unwrap();
        let s = format_algebra_element(&a, &e);
        assert_eq!(s, "7/2*x1^2*x2 - x2^3");
        assert_eq!(parse_algebra_element(&a, &s).unwrap(), e);
        assert_eq!(format_algebra_element(&a, &parse_algebra_element(&a, "-1 + x1").unwrap()), "-1 + x1");
        assert!(parse_algebra_element(&a, "x3").is_err());
        assert!(parse_algebra_element(&a, "x1 +").is_err());
    }

    #[test]
    fn module_round_trip() {
        let p = Field::prime(5).unwrap();
        let a = GradedAlgebra::dg_polynomial(p, vec![p.zero()], 6).unwrap();
        let gens = vec!["u".to_string(), "v".to_string()];
        let m = parse_module_element(&a, &gens, "(x1 + x1^2)*u - 2*x1*v").unwrap();
        let s = format_module_element(&a, &gens, &m);
        assert_eq!(s, "(x1 + x1^2)*u + 3*x1*v");
        assert_eq!(parse_module_element(&a, &gens, &s).unwrap(), m);
        assert!(parse_module_element(&a, &gens, "u*x1").is_err());
        assert_eq!(parse_module_element(&a, &gens, "0").unwrap(), ModuleElement::zero());
    }
}
