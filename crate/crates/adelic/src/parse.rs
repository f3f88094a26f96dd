//! Textual syntax for the values the CLI and instance files exchange:
//! field elements, rational functions, places, Laurent jets, adeles,
//! adelic polynomials, algebra elements, and cover elements.
//!
//! The expression grammar is integers, the context's variables, `g` for
//! the extension-field generator, `+ - * / ^` and parentheses. Places are
//! written `@a` or `@inf`. Adele literals are
//! `generic: <expr in u>; at @a: <expr in t>; ...`, and may appear
//! parenthesized as coefficients inside polynomials in `T`.

use std::collections::BTreeMap;

use crate::adele::Adele;
use crate::algebra::{AdelicPoly, AlgebraElement};
use crate::cover::{Cover, CoverElement};
use crate::error::{Error, Result};
use crate::field::{Field, FieldElem};
use crate::place::Place;
use crate::poly::Poly;
use crate::ratfn::RatFn;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(i64),
    Ident(String),
    AdeleLit(usize),
    Op(char),
    LParen,
    RParen,
}

#[derive(Debug, Clone)]
enum Expr {
    Num(i64),
    Ident(String),
    AdeleLit(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i64),
}

fn err(detail: impl Into<String>) -> Error {
    Error::Parse {
        detail: detail.into(),
    }
}

/// Extract parenthesized `(generic: ...)` blocks so the expression
/// tokenizer never sees their colons and semicolons.
fn extract_adele_blocks(s: &str) -> Result<(String, Vec<String>)> {
    let mut out = String::new();
    let mut blocks = Vec::new();
    let bytes = s.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'(' {
            let rest = s[i + 1..].trim_start();
            if rest.starts_with("generic") {
                let mut depth = 1;
                let mut j = i + 1;
                while j < bytes.len() && depth > 0 {
                    match bytes[j] {
                        b'(' => depth += 1,
                        b')' => depth -= 1,
                        _ => {}
                    }
                    j += 1;
                }
                if depth != 0 {
                    return Err(err("unbalanced parentheses in adele block"));
                }
                blocks.push(s[i + 1..j - 1].to_string());
                out.push_str(&format!(" #{} ", blocks.len() - 1));
                i = j;
                continue;
            }
        }
        out.push(bytes[i] as char);
        i += 1;
    }
    Ok((out, blocks))
}

fn tokenize(s: &str) -> Result<Vec<Tok>> {
    let mut toks = Vec::new();
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' | '\n' => i += 1,
            '0'..='9' => {
                let mut n = 0i64;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    n = n
                        .checked_mul(10)
                        .and_then(|n| n.checked_add(chars[i] as i64 - '0' as i64))
                        .ok_or_else(|| err("integer literal too large"))?;
                    i += 1;
                }
                toks.push(Tok::Num(n));
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                toks.push(Tok::Ident(chars[start..i].iter().collect()));
            }
            '#' => {
                i += 1;
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let idx: usize = chars[start..i]
                    .iter()
                    .collect::<String>()
                    .parse()
                    .map_err(|_| err("bad adele block reference"))?;
                toks.push(Tok::AdeleLit(idx));
            }
            '+' | '-' | '*' | '/' | '^' => {
                toks.push(Tok::Op(c));
                i += 1;
            }
            '(' => {
                toks.push(Tok::LParen);
                i += 1;
            }
            ')' => {
                toks.push(Tok::RParen);
                i += 1;
            }
            _ => return Err(err(format!("unexpected character '{c}'"))),
        }
    }
    Ok(toks)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        while let Some(Tok::Op(op @ ('+' | '-'))) = self.peek().cloned() {
            self.next();
            let rhs = self.term()?;
            lhs = if op == '+' {
                Expr::Add(Box::new(lhs), Box::new(rhs))
            } else {
                Expr::Sub(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        while let Some(Tok::Op(op @ ('*' | '/'))) = self.peek().cloned() {
            self.next();
            let rhs = self.factor()?;
            lhs = if op == '*' {
                Expr::Mul(Box::new(lhs), Box::new(rhs))
            } else {
                Expr::Div(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Expr> {
        if let Some(Tok::Op('-')) = self.peek() {
            self.next();
            return Ok(Expr::Neg(Box::new(self.factor()?)));
        }
        if let Some(Tok::Op('+')) = self.peek() {
            self.next();
            return self.factor();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if let Some(Tok::Op('^')) = self.peek() {
            self.next();
            let mut sign = 1i64;
            if let Some(Tok::Op('-')) = self.peek() {
                self.next();
                sign = -1;
            }
            match self.next() {
                Some(Tok::Num(n)) => return Ok(Expr::Pow(Box::new(base), sign * n)),
                _ => return Err(err("exponent must be an integer")),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.next() {
            Some(Tok::Num(n)) => Ok(Expr::Num(n)),
            Some(Tok::Ident(id)) => Ok(Expr::Ident(id)),
            Some(Tok::AdeleLit(i)) => Ok(Expr::AdeleLit(i)),
            Some(Tok::LParen) => {
                let e = self.expr()?;
                match self.next() {
                    Some(Tok::RParen) => Ok(e),
                    _ => Err(err("missing closing parenthesis")),
                }
            }
            other => Err(err(format!("unexpected token {other:?}"))),
        }
    }
}

fn parse_expr_str(s: &str) -> Result<(Expr, Vec<String>)> {
    let (replaced, blocks) = extract_adele_blocks(s)?;
    let toks = tokenize(&replaced)?;
    if toks.is_empty() {
        return Err(err("empty expression"));
    }
    let mut p = Parser { toks, pos: 0 };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(err(format!("trailing input after expression in '{s}'")));
    }
    Ok((e, blocks))
}

/// Evaluate an expression as a rational function in the given variable.
fn eval_scalar(e: &Expr, field: &Field, var: char) -> Result<RatFn> {
    match e {
        Expr::Num(n) => Ok(RatFn::constant(field, var, field.from_int(*n))),
        Expr::Ident(id) => {
            if id.len() == 1 && id.chars().next() == Some(var) {
                Ok(RatFn::variable(field, var))
            } else if id == "g" {
                Ok(RatFn::constant(field, var, field.generator()?))
            } else {
                Err(err(format!("unknown symbol '{id}' (expected '{var}')")))
            }
        }
        Expr::AdeleLit(_) => Err(err("adele literal not allowed here")),
        Expr::Neg(a) => Ok(eval_scalar(a, field, var)?.neg()),
        Expr::Add(a, b) => Ok(eval_scalar(a, field, var)?.add(&eval_scalar(b, field, var)?)),
        Expr::Sub(a, b) => Ok(eval_scalar(a, field, var)?.sub(&eval_scalar(b, field, var)?)),
        Expr::Mul(a, b) => Ok(eval_scalar(a, field, var)?.mul(&eval_scalar(b, field, var)?)),
        Expr::Div(a, b) => eval_scalar(a, field, var)?.div(&eval_scalar(b, field, var)?),
        Expr::Pow(a, n) => {
            let base = eval_scalar(a, field, var)?;
            let n32: i32 = (*n).try_into().map_err(|_| err("exponent out of range"))?;
            base.pow(n32)
        }
    }
}

/// Parse a rational function of one variable.
pub fn parse_ratfn(field: &Field, var: char, s: &str) -> Result<RatFn> {
    let (e, blocks) = parse_expr_str(s)?;
    if !blocks.is_empty() {
        return Err(err("adele blocks not allowed in a rational function"));
    }
    eval_scalar(&e, field, var)
}

/// Parse a constant of the base field.
pub fn parse_field_elem(field: &Field, s: &str) -> Result<FieldElem> {
    let f = parse_ratfn(field, 'u', s)?;
    if !f.is_constant() {
        return Err(err(format!("'{s}' is not a constant")));
    }
    f.eval(&field.zero())
}

/// Parse a place: `@a` with `a` a constant expression, or `@inf`.
pub fn parse_place(field: &Field, s: &str) -> Result<Place> {
    let s = s.trim();
    let body = s
        .strip_prefix('@')
        .ok_or_else(|| err(format!("place '{s}' must start with '@'")))?;
    if body == "inf" || body == "infinity" {
        return Ok(Place::Infinity);
    }
    Ok(Place::Finite(parse_field_elem(field, body)?))
}

/// Parse an adele: either a bare rational function of `u`, or
/// `generic: <expr>; at @a: <expr in t>; at @inf: <expr in t>; ...`.
pub fn parse_adele(field: &Field, s: &str) -> Result<Adele> {
    let s = s.trim();
    if !s.contains("generic") {
        return Ok(Adele::from_ratfn(parse_ratfn(field, 'u', s)?));
    }
    let mut generic: Option<RatFn> = None;
    let mut overrides: BTreeMap<Place, RatFn> = BTreeMap::new();
    for part in s.split(';') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        if let Some(rest) = part.strip_prefix("generic") {
            let rest = rest.trim_start();
            let rest = rest
                .strip_prefix(':')
                .ok_or_else(|| err("expected ':' after 'generic'"))?;
            generic = Some(parse_ratfn(field, 'u', rest)?);
        } else if let Some(rest) = part.strip_prefix("at ") {
            let (place_str, val_str) = rest
                .split_once(':')
                .ok_or_else(|| err("expected 'at @place: value'"))?;
            let place = parse_place(field, place_str)?;
            let local = parse_ratfn(field, 't', val_str)?;
            overrides.insert(place.clone(), local.globalize_at(&place, 'u'));
        } else {
            return Err(err(format!("unknown adele clause '{part}'")));
        }
    }
    let generic = generic.ok_or_else(|| err("adele literal needs a 'generic:' clause"))?;
    Ok(Adele::new(generic, overrides))
}

/// Evaluate an expression as a polynomial in the distinguished variable
/// with adele coefficients.
fn eval_adele_poly(
    e: &Expr,
    field: &Field,
    blocks: &[String],
    poly_var: char,
) -> Result<Vec<Adele>> {
    let scalar = |a: Adele| vec![a];
    match e {
        Expr::Num(n) => Ok(scalar(Adele::from_ratfn(RatFn::constant(
            field,
            'u',
            field.from_int(*n),
        )))),
        Expr::Ident(id) => {
            if id.len() == 1 && id.chars().next() == Some(poly_var) {
                Ok(vec![Adele::zero(field), Adele::one(field)])
            } else if id == "u" {
                Ok(scalar(Adele::from_ratfn(RatFn::variable(field, 'u'))))
            } else if id == "g" {
                Ok(scalar(Adele::from_ratfn(RatFn::constant(
                    field,
                    'u',
                    field.generator()?,
                ))))
            } else {
                Err(err(format!("unknown symbol '{id}'")))
            }
        }
        Expr::AdeleLit(i) => Ok(scalar(parse_adele(field, &blocks[*i])?)),
        Expr::Neg(a) => Ok(eval_adele_poly(a, field, blocks, poly_var)?
            .into_iter()
            .map(|c| c.neg())
            .collect()),
        Expr::Add(a, b) => Ok(crate::algebra::vec_add(
            &eval_adele_poly(a, field, blocks, poly_var)?,
            &eval_adele_poly(b, field, blocks, poly_var)?,
        )),
        Expr::Sub(a, b) => {
            let bb: Vec<Adele> = eval_adele_poly(b, field, blocks, poly_var)?
                .into_iter()
                .map(|c| c.neg())
                .collect();
            Ok(crate::algebra::vec_add(
                &eval_adele_poly(a, field, blocks, poly_var)?,
                &bb,
            ))
        }
        Expr::Mul(a, b) => Ok(crate::algebra::vec_mul(
            &eval_adele_poly(a, field, blocks, poly_var)?,
            &eval_adele_poly(b, field, blocks, poly_var)?,
        )),
        Expr::Div(a, b) => {
            let num = eval_adele_poly(a, field, blocks, poly_var)?;
            let den = eval_adele_poly(b, field, blocks, poly_var)?;
            if den.len() != 1 || !den[0].overrides().is_empty() {
                return Err(err("division only by coefficient-level rational functions"));
            }
            let inv = Adele::from_ratfn(den[0].generic().inv()?);
            Ok(num.into_iter().map(|c| c.mul(&inv)).collect())
        }
        Expr::Pow(a, n) => {
            if *n < 0 {
                return Err(err("negative powers not allowed in polynomials"));
            }
            let base = eval_adele_poly(a, field, blocks, poly_var)?;
            let mut acc = scalar(Adele::one(field));
            for _ in 0..*n {
                acc = crate::algebra::vec_mul(&acc, &base);
            }
            Ok(acc)
        }
    }
}

fn trim_adele_vec(mut v: Vec<Adele>) -> Vec<Adele> {
    while v.last().map(|c| c.is_zero()).unwrap_or(false) {
        v.pop();
    }
    v
}

/// Parse a monic adelic polynomial in `T`, e.g. `T^2 - (generic: u)`.
pub fn parse_adelic_poly(field: &Field, s: &str) -> Result<AdelicPoly> {
    let (e, blocks) = parse_expr_str(s)?;
    let v = trim_adele_vec(eval_adele_poly(&e, field, &blocks, 'T')?);
    if v.len() < 2 {
        return Err(err("adelic polynomial must have degree at least 1"));
    }
    let lead = v.last().unwrap();
    if lead != &Adele::one(field) {
        return Err(err("adelic polynomial must be monic"));
    }
    Ok(AdelicPoly::new(v[..v.len() - 1].to_vec()))
}

/// Parse an algebra element of `A[T]/(p)` as a polynomial in `T` of degree
/// below `n` with adele coefficients.
pub fn parse_algebra_element(field: &Field, n: usize, s: &str) -> Result<AlgebraElement> {
    let (e, blocks) = parse_expr_str(s)?;
    let mut v = trim_adele_vec(eval_adele_poly(&e, field, &blocks, 'T')?);
    if v.len() > n {
        return Err(err(format!(
            "element degree {} is not below the algebra degree {n}",
            v.len() - 1
        )));
    }
    v.resize(n, Adele::zero(field));
    Ok(AlgebraElement::new(v))
}

/// Parse a monic cover polynomial in `U` (or `w`) over the function field.
pub fn parse_cover_poly(field: &Field, s: &str) -> Result<Poly<RatFn>> {
    let var = if s.contains('U') { 'U' } else { 'w' };
    let (e, blocks) = parse_expr_str(s)?;
    if !blocks.is_empty() {
        return Err(err("cover polynomials take plain function-field coefficients"));
    }
    let v = trim_adele_vec(eval_adele_poly(&e, field, &[], var)?);
    if v.len() < 2 {
        return Err(err("cover polynomial must have degree at least 1"));
    }
    let coeffs: Vec<RatFn> = v
        .iter()
        .map(|a| {
            if a.overrides().is_empty() {
                Ok(a.generic().clone())
            } else {
                Err(err("cover coefficients cannot carry overrides"))
            }
        })
        .collect::<Result<_>>()?;
    let p = Poly::new('U', coeffs);
    if !p.is_monic() {
        return Err(err("cover polynomial must be monic"));
    }
    Ok(p)
}

/// Evaluate an expression as an element of the cover's function field
/// (variables `w` for the generator and `u`; division is field division).
fn eval_omega(e: &Expr, cover: &Cover) -> Result<CoverElement> {
    let field = cover.field();
    let d = cover.degree();
    match e {
        Expr::Num(n) => Ok(CoverElement::scalar(
            RatFn::constant(&field, 'u', field.from_int(*n)),
            d,
        )),
        Expr::Ident(id) => match id.as_str() {
            "w" | "U" => {
                if d == 1 {
                    Ok(CoverElement::scalar(cover.poly().coeff(0).neg(), 1))
                } else {
                    Ok(CoverElement::generator(&field, d))
                }
            }
            "u" => Ok(CoverElement::scalar(RatFn::variable(&field, 'u'), d)),
            "g" => Ok(CoverElement::scalar(
                RatFn::constant(&field, 'u', field.generator()?),
                d,
            )),
            _ => Err(err(format!("unknown symbol '{id}'"))),
        },
        Expr::AdeleLit(_) => Err(err("adele literal not allowed in a cover element")),
        Expr::Neg(a) => {
            let v = eval_omega(a, cover)?;
            Ok(CoverElement::new(
                v.coeffs().iter().map(|c| c.neg()).collect(),
            ))
        }
        Expr::Add(a, b) => Ok(eval_omega(a, cover)?.add(&eval_omega(b, cover)?)),
        Expr::Sub(a, b) => {
            let bv = eval_omega(b, cover)?;
            let neg = CoverElement::new(bv.coeffs().iter().map(|c| c.neg()).collect());
            Ok(eval_omega(a, cover)?.add(&neg))
        }
        Expr::Mul(a, b) => eval_omega(a, cover)?.mul(&eval_omega(b, cover)?, cover),
        Expr::Div(a, b) => {
            let bv = eval_omega(b, cover)?;
            let inv = bv.inv(cover)?;
            eval_omega(a, cover)?.mul(&inv, cover)
        }
        Expr::Pow(a, n) => {
            let base = eval_omega(a, cover)?;
            let base = if *n < 0 { base.inv(cover)? } else { base };
            let mut acc = CoverElement::scalar(RatFn::constant(&field, 'u', field.one()), d);
            for _ in 0..n.unsigned_abs() {
                acc = acc.mul(&base, cover)?;
            }
            Ok(acc)
        }
    }
}

/// Parse an element of the cover's function field, e.g. `(w+1)/(u-1)`.
pub fn parse_cover_element(cover: &Cover, s: &str) -> Result<CoverElement> {
    let (e, blocks) = parse_expr_str(s)?;
    if !blocks.is_empty() {
        return Err(err("adele literal not allowed in a cover element"));
    }
    eval_omega(&e, cover)
}

/// Parse a field declaration: `F_5`, `F_5^2`, or `Q`.
pub fn parse_field(s: &str) -> Result<Field> {
    let s = s.trim();
    if s == "Q" || s == "rationals" {
        return Ok(Field::rationals());
    }
    let body = s
        .strip_prefix("F_")
        .or_else(|| s.strip_prefix('F'))
        .ok_or_else(|| err(format!("unknown field '{s}' (use F_p, F_p^m, or Q)")))?;
    let (p_str, m_str) = match body.split_once('^') {
        Some((p, m)) => (p, m),
        None => (body, "1"),
    };
    let p: u64 = p_str
        .trim()
        .parse()
        .map_err(|_| err(format!("bad characteristic '{p_str}'")))?;
    let m: u32 = m_str
        .trim()
        .parse()
        .map_err(|_| err(format!("bad extension degree '{m_str}'")))?;
    Field::finite(p, m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f5() -> Field {
        Field::prime(5).unwrap()
    }

    #[test]
    fn ratfn_expressions() {
        let k = f5();
        let f = parse_ratfn(&k, 'u', "(u-1)^2 / u^3").unwrap();
        assert_eq!(f.valuation(&Place::Finite(k.from_int(1))).unwrap(), 2);
        assert_eq!(f.valuation(&Place::Finite(k.from_int(0))).unwrap(), -3);
        let g = parse_ratfn(&k, 't', "t^-2 * (1 + 3*t)").unwrap();
        assert_eq!(crate::local::t_valuation(&g), Some(-2));
    }

    #[test]
    fn places() {
        let k = f5();
        assert_eq!(parse_place(&k, "@3").unwrap(), Place::Finite(k.from_int(3)));
        assert_eq!(parse_place(&k, "@-1").unwrap(), Place::Finite(k.from_int(4)));
        assert_eq!(parse_place(&k, "@inf").unwrap(), Place::Infinity);
        assert!(parse_place(&k, "3").is_err());
    }

    #[test]
    fn adele_literals() {
        let k = f5();
        let a = parse_adele(&k, "generic: u; at @0: t^3").unwrap();
        assert_eq!(a.generic(), &RatFn::variable(&k, 'u'));
        assert_eq!(a.content().unwrap(), 2); // v_0 = 3, v_inf = -1
        let plain = parse_adele(&k, "u^2 - 1").unwrap();
        assert!(plain.overrides().is_empty());
    }

    #[test]
    fn adelic_poly_literals() {
        let k = f5();
        let p = parse_adelic_poly(&k, "T^2 - (generic: u)").unwrap();
        assert_eq!(p.degree(), 2);
        assert_eq!(p.coeff(0).generic(), &RatFn::variable(&k, 'u').neg());
        assert!(p.coeff(1).is_zero());

        let q = parse_adelic_poly(&k, "T^2 - (generic: u; at @0: 0)").unwrap();
        assert!(!q.coeff(0).overrides().is_empty());

        assert!(parse_adelic_poly(&k, "2*T^2 - u").is_err()); // not monic
    }

    #[test]
    fn algebra_element_literals() {
        let k = f5();
        let a = parse_algebra_element(&k, 2, "u*T + 1").unwrap();
        assert_eq!(a.coeff(1).generic(), &RatFn::variable(&k, 'u'));
        assert_eq!(a.coeff(0), &Adele::one(&k));
        assert!(parse_algebra_element(&k, 2, "T^2").is_err());
    }

    #[test]
    fn cover_and_elements() {
        let k = f5();
        let p = parse_cover_poly(&k, "U^2 - u").unwrap();
        let cover = Cover::new(p).unwrap();
        let f = parse_cover_element(&cover, "(w+1)/(u-1)").unwrap();
        // (w+1)/(u-1) = 1/(w-1): multiplying by (w-1) gives 1
        let wm1 = parse_cover_element(&cover, "w-1").unwrap();
        let prod = f.mul(&wm1, &cover).unwrap();
        let one = parse_cover_element(&cover, "1").unwrap();
        assert_eq!(prod, one);
    }

    #[test]
    fn field_declarations() {
        assert_eq!(parse_field("F_5").unwrap().order(), Some(5));
        assert_eq!(parse_field("F_5^2").unwrap().order(), Some(25));
        assert!(parse_field("Q").unwrap().is_rationals());
        assert!(parse_field("F_6").is_err());
    }
}
