//! Dense univariate polynomials over an exact coefficient field.
//!
//! The coefficient type is abstracted by [`Coeff`] so the same division,
//! gcd, extended-Euclid and resultant code serves polynomials over the
//! base field, over the function field `k(u)`, and over local fields
//! presented as `k(t)`.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::FieldElem;

/// Exact field operations required of polynomial coefficients.
///
/// `zero_like`/`one_like` derive constants from an existing element, since
/// elements carry their own field context.
pub trait Coeff: Clone + PartialEq + fmt::Debug + fmt::Display {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn inv(&self) -> Result<Self>;
}

impl Coeff for FieldElem {
    fn zero_like(&self) -> Self {
        self.field().zero()
    }
    fn one_like(&self) -> Self {
        self.field().one()
    }
    fn is_zero(&self) -> bool {
        FieldElem::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        FieldElem::add(self, other)
    }
    fn sub(&self, other: &Self) -> Self {
        FieldElem::sub(self, other)
    }
    fn mul(&self, other: &Self) -> Self {
        FieldElem::mul(self, other)
    }
    fn neg(&self) -> Self {
        FieldElem::neg(self)
    }
    fn inv(&self) -> Result<Self> {
        FieldElem::inv(self)
    }
}

/// Polynomial with ascending coefficients; the leading coefficient is
/// nonzero unless the polynomial is zero (empty coefficient vector).
#[derive(Clone, PartialEq)]
pub struct Poly<C: Coeff> {
    var: char,
    coeffs: Vec<C>,
}

impl<C: Coeff> fmt::Debug for Poly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl<C: Coeff> Poly<C> {
    pub fn new(var: char, mut coeffs: Vec<C>) -> Poly<C> {
        while coeffs.last().map(|c| c.is_zero()).unwrap_or(false) {
            coeffs.pop();
        }
        Poly { var, coeffs }
    }

    pub fn zero(var: char) -> Poly<C> {
        Poly {
            var,
            coeffs: Vec::new(),
        }
    }

    pub fn constant(var: char, c: C) -> Poly<C> {
        Poly::new(var, vec![c])
    }

    pub fn monomial(var: char, c: C, deg: usize) -> Poly<C> {
        let mut coeffs = vec![c.zero_like(); deg];
        coeffs.push(c);
        Poly::new(var, coeffs)
    }

    pub fn var(&self) -> char {
        self.var
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    /// Coefficient of the degree-`i` term (zero beyond the stored range).
    pub fn coeff(&self, i: usize) -> C {
        match self.coeffs.get(i) {
            Some(c) => c.clone(),
            None => self
                .coeffs
                .first()
                .map(|c| c.zero_like())
                .expect("coeff() on the zero polynomial lacks context"),
        }
    }

    /// Substitute another polynomial for the variable (Horner).
    pub fn compose(&self, g: &Poly<C>) -> Poly<C> {
        let mut acc = match self.coeffs.last() {
            None => return Poly::zero(g.var()),
            Some(c) => Poly::constant(g.var(), c.clone()),
        };
        for c in self.coeffs.iter().rev().skip(1) {
            acc = acc.mul(g).add(&Poly::constant(g.var(), c.clone()));
        }
        acc
    }

    pub fn lead(&self) -> Option<&C> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.lead().map(|c| {
            let one = c.one_like();
            *c == one
        }) == Some(true)
    }

    fn check_var(&self, other: &Poly<C>) {
        assert_eq!(self.var, other.var, "mixed polynomial variables");
    }

    pub fn add(&self, other: &Poly<C>) -> Poly<C> {
        self.check_var(other);
        let mut coeffs = self.coeffs.clone();
        if coeffs.len() < other.coeffs.len() {
            let zero = other.coeffs[0].zero_like();
            coeffs.resize(other.coeffs.len(), zero);
        }
        for (i, c) in other.coeffs.iter().enumerate() {
            coeffs[i] = coeffs[i].add(c);
        }
        Poly::new(self.var, coeffs)
    }

    pub fn neg(&self) -> Poly<C> {
        Poly::new(self.var, self.coeffs.iter().map(|c| c.neg()).collect())
    }

    pub fn sub(&self, other: &Poly<C>) -> Poly<C> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Poly<C>) -> Poly<C> {
        self.check_var(other);
        if self.is_zero() || other.is_zero() {
            return Poly::zero(self.var);
        }
        let zero = self.coeffs[0].zero_like();
        let mut coeffs = vec![zero; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = coeffs[i + j].add(&a.mul(b));
            }
        }
        Poly::new(self.var, coeffs)
    }

    pub fn scale(&self, c: &C) -> Poly<C> {
        Poly::new(self.var, self.coeffs.iter().map(|x| x.mul(c)).collect())
    }

    pub fn pow(&self, mut e: u32) -> Poly<C> {
        if e == 0 {
            let one = self
                .coeffs
                .first()
                .map(|c| c.one_like())
                .expect("pow of zero polynomial needs context");
            return Poly::constant(self.var, one);
        }
        let mut base = self.clone();
        let mut acc: Option<Poly<C>> = None;
        loop {
            if e & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => a.mul(&base),
                });
            }
            e >>= 1;
            if e == 0 {
                break;
            }
            base = base.mul(&base);
        }
        acc.unwrap()
    }

    /// Division with remainder; the divisor's leading coefficient must be
    /// invertible (always true over a field for nonzero divisors).
    pub fn divrem(&self, divisor: &Poly<C>) -> Result<(Poly<C>, Poly<C>)> {
        self.check_var(divisor);
        if divisor.is_zero() {
            return Err(Error::ZeroInput);
        }
        let dd = divisor.degree().unwrap();
        let lead_inv = divisor.lead().unwrap().inv()?;
        let mut rem = self.coeffs.clone();
        let zero = divisor.coeffs[0].zero_like();
        if rem.len() <= dd {
            return Ok((Poly::zero(self.var), self.clone()));
        }
        let mut quot = vec![zero.clone(); rem.len() - dd];
        while rem.len() > dd {
            let lead = rem.last().unwrap().clone();
            let shift = rem.len() - 1 - dd;
            if !lead.is_zero() {
                let q = lead.mul(&lead_inv);
                for (i, c) in divisor.coeffs.iter().enumerate() {
                    rem[shift + i] = rem[shift + i].sub(&q.mul(c));
                }
                quot[shift] = q;
            }
            rem.pop();
        }
        Ok((Poly::new(self.var, quot), Poly::new(self.var, rem)))
    }

    pub fn rem(&self, divisor: &Poly<C>) -> Result<Poly<C>> {
        Ok(self.divrem(divisor)?.1)
    }

    /// Monic gcd.
    pub fn gcd(&self, other: &Poly<C>) -> Result<Poly<C>> {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b)?;
            a = b;
            b = r;
        }
        a.make_monic()
    }

    /// Extended Euclid: returns `(g, s, t)` with `s*self + t*other = g` and
    /// `g` the monic gcd. When the gcd is 1 the cofactors are the unique
    /// minimal-degree pair.
    pub fn ext_gcd(&self, other: &Poly<C>) -> Result<(Poly<C>, Poly<C>, Poly<C>)> {
        self.check_var(other);
        let one = self
            .coeffs
            .first()
            .or(other.coeffs.first())
            .map(|c| c.one_like())
            .ok_or(Error::ZeroInput)?;
        let mut r0 = self.clone();
        let mut r1 = other.clone();
        let mut s0 = Poly::constant(self.var, one.clone());
        let mut s1 = Poly::zero(self.var);
        let mut t0 = Poly::zero(self.var);
        let mut t1 = Poly::constant(self.var, one);
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1)?;
            let s = s0.sub(&q.mul(&s1));
            let t = t0.sub(&q.mul(&t1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
            t0 = t1;
            t1 = t;
        }
        // normalize to monic gcd
        let lead_inv = r0.lead().ok_or(Error::ZeroInput)?.inv()?;
        let c = Poly::constant(self.var, lead_inv);
        Ok((r0.mul(&c), s0.mul(&c), t0.mul(&c)))
    }

    fn make_monic(&self) -> Result<Poly<C>> {
        match self.lead() {
            None => Ok(self.clone()),
            Some(l) => {
                let inv = l.inv()?;
                Ok(self.scale(&inv))
            }
        }
    }

    pub fn derivative(&self) -> Poly<C> {
        if self.coeffs.len() <= 1 {
            return Poly::zero(self.var);
        }
        let mut coeffs = Vec::with_capacity(self.coeffs.len() - 1);
        for (i, c) in self.coeffs.iter().enumerate().skip(1) {
            // c * i computed by repeated addition: exact in any characteristic
            let mut acc = c.zero_like();
            for _ in 0..i {
                acc = acc.add(c);
            }
            coeffs.push(acc);
        }
        Poly::new(self.var, coeffs)
    }

    pub fn eval(&self, x: &C) -> C {
        let mut acc = match self.coeffs.last() {
            None => return x.zero_like(),
            Some(c) => c.clone(),
        };
        for c in self.coeffs.iter().rev().skip(1) {
            acc = acc.mul(x).add(c);
        }
        acc
    }

    /// Resultant via the Euclidean chain.
    pub fn resultant(&self, other: &Poly<C>) -> Result<C> {
        self.check_var(other);
        let one = self
            .coeffs
            .first()
            .or(other.coeffs.first())
            .map(|c| c.one_like())
            .ok_or(Error::ZeroInput)?;
        let zero = one.zero_like();
        if self.is_zero() || other.is_zero() {
            return Ok(zero);
        }
        let mut a = self.clone();
        let mut b = other.clone();
        let mut acc = one;
        loop {
            let da = a.degree().unwrap();
            let db = b.degree().unwrap();
            if db == 0 {
                let mut l = acc.one_like();
                for _ in 0..da {
                    l = l.mul(&b.coeffs[0]);
                }
                return Ok(acc.mul(&l));
            }
            let r = a.rem(&b)?;
            if r.is_zero() {
                return Ok(zero);
            }
            let dr = r.degree().unwrap();
            // Res(a,b) = (-1)^(da db) lc(b)^(da-dr) Res(b,r)
            if (da * db) % 2 == 1 {
                acc = acc.neg();
            }
            let mut l = acc.one_like();
            for _ in 0..(da - dr) {
                l = l.mul(b.lead().unwrap());
            }
            acc = acc.mul(&l);
            a = b;
            b = r;
        }
    }

    /// Discriminant of a monic polynomial: `(-1)^(n(n-1)/2) Res(P, P')`.
    pub fn discriminant(&self) -> Result<C> {
        assert!(self.is_monic(), "discriminant defined for monic input");
        let n = self.degree().unwrap();
        if n == 1 {
            return Ok(self.coeffs[0].one_like());
        }
        let d = self.derivative();
        let r = self.resultant(&d)?;
        if (n * (n - 1) / 2) % 2 == 1 {
            Ok(r.neg())
        } else {
            Ok(r)
        }
    }

    /// `p(x) -> p(x^e)`.
    pub fn substitute_power(&self, e: usize) -> Poly<C> {
        assert!(e >= 1);
        if self.is_zero() || e == 1 {
            return self.clone();
        }
        let zero = self.coeffs[0].zero_like();
        let mut coeffs = vec![zero; (self.coeffs.len() - 1) * e + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i * e] = c.clone();
        }
        Poly::new(self.var, coeffs)
    }

    /// Coefficient reversal: `x^deg * p(1/x)`.
    pub fn reverse(&self) -> Poly<C> {
        let mut coeffs = self.coeffs.clone();
        coeffs.reverse();
        Poly::new(self.var, coeffs)
    }

    pub fn map<D: Coeff>(&self, var: char, f: impl Fn(&C) -> D) -> Poly<D> {
        Poly::new(var, self.coeffs.iter().map(f).collect())
    }
}

impl<C: Coeff> fmt::Display for Poly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let cs = format!("{c}");
            let needs_parens = cs.contains('+') || cs.contains('-') || cs.contains('/');
            match i {
                0 => write!(f, "{cs}")?,
                _ => {
                    if cs == "1" {
                        // suppress unit coefficient
                    } else if needs_parens {
                        write!(f, "({cs})*")?;
                    } else {
                        write!(f, "{cs}*")?;
                    }
                    if i == 1 {
                        write!(f, "{}", self.var)?;
                    } else {
                        write!(f, "{}^{}", self.var, i)?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// Roots of a polynomial found in its base field, with multiplicity, plus
/// the cofactor left after dividing all of them out.
#[derive(Debug, Clone)]
pub struct SplitRoots {
    /// Roots with multiplicity, in canonical field order.
    pub roots: Vec<FieldElem>,
    /// The (monic-times-leading-constant) part with no roots in the field.
    pub cofactor: Poly<FieldElem>,
}

impl Poly<FieldElem> {
    /// All roots in the base field with multiplicity. A full split leaves a
    /// constant cofactor. Over the rationals the candidates come from the
    /// rational root theorem; over a finite field from exhaustive search.
    pub fn split_roots(&self) -> Result<SplitRoots> {
        if self.is_zero() {
            return Err(Error::ZeroInput);
        }
        let field = self.coeffs[0].field().clone();
        let candidates: Vec<FieldElem> = if field.is_rationals() {
            rational_root_candidates(self)
        } else {
            field.elems().collect()
        };
        let mut rest = self.clone();
        let mut roots = Vec::new();
        for cand in candidates {
            loop {
                if rest.degree() == Some(0) || rest.is_zero() {
                    break;
                }
                if !rest.eval(&cand).is_zero() {
                    break;
                }
                let lin = Poly::new(self.var(), vec![cand.neg(), field.one()]);
                let (q, r) = rest.divrem(&lin)?;
                debug_assert!(r.is_zero());
                rest = q;
                roots.push(cand.clone());
            }
        }
        roots.sort();
        Ok(SplitRoots {
            roots,
            cofactor: rest,
        })
    }

    /// Roots when the polynomial must split completely; otherwise reports
    /// the cofactor that refused to split.
    pub fn split_roots_full(&self) -> Result<Vec<FieldElem>> {
        let s = self.split_roots()?;
        if s.cofactor.degree().unwrap_or(0) > 0 {
            return Err(Error::NeedsLargerField {
                factor: format!("{}", s.cofactor),
            });
        }
        Ok(s.roots)
    }

    /// Is the squarefree part equal to the polynomial (gcd with derivative
    /// constant)?
    pub fn is_squarefree(&self) -> Result<bool> {
        if self.is_zero() {
            return Ok(false);
        }
        let g = self.gcd(&self.derivative())?;
        Ok(g.degree() == Some(0))
    }
}

/// Candidate rational roots p/q with p | constant, q | leading coefficient
/// (after clearing denominators).
fn rational_root_candidates(poly: &Poly<FieldElem>) -> Vec<FieldElem> {
    use num_bigint::BigInt;
    use num_traits::{Signed, Zero};

    let field = poly.coeffs()[0].field().clone();
    // clear denominators: scale by lcm of denominators; roots unchanged
    let mut nums: Vec<BigInt> = Vec::new();
    let mut dens: Vec<BigInt> = Vec::new();
    for c in poly.coeffs() {
        let (n, d) = c.as_ratio().expect("rational coefficients");
        nums.push(n);
        dens.push(d);
    }
    let mut lcm = BigInt::from(1);
    for d in &dens {
        lcm = num_integer_lcm(&lcm, d);
    }
    let ints: Vec<BigInt> = nums
        .iter()
        .zip(&dens)
        .map(|(n, d)| n * (&lcm / d))
        .collect();
    let a0 = ints.iter().find(|c| !c.is_zero()).cloned().unwrap();
    let an = ints.last().unwrap().clone();
    let mut out = vec![field.zero()];
    for p in divisors(&a0.abs()) {
        for q in divisors(&an.abs()) {
            for sign in [1i64, -1] {
                let cand_n = &p * BigInt::from(sign);
                let num_i: i64 = match (&cand_n).try_into() {
                    Ok(v) => v,
                    Err(_) => continue,
                };
                let den_i: i64 = match (&q).try_into() {
                    Ok(v) => v,
                    Err(_) => continue,
                };
                if let Ok(e) = field.from_ratio(num_i, den_i) {
                    if !out.contains(&e) {
                        out.push(e);
                    }
                }
            }
        }
    }
    out
}

fn num_integer_lcm(a: &num_bigint::BigInt, b: &num_bigint::BigInt) -> num_bigint::BigInt {
    use num_traits::Zero;
    if a.is_zero() || b.is_zero() {
        return num_bigint::BigInt::from(0);
    }
    let g = num_integer_gcd(a, b);
    (a / &g) * b
}

fn num_integer_gcd(a: &num_bigint::BigInt, b: &num_bigint::BigInt) -> num_bigint::BigInt {
    use num_traits::{Signed, Zero};
    let mut a = a.abs();
    let mut b = b.abs();
    while !b.is_zero() {
        let r = &a % &b;
        a = b;
        b = r;
    }
    a
}

fn divisors(n: &num_bigint::BigInt) -> Vec<num_bigint::BigInt> {
    use num_bigint::BigInt;
    use num_traits::Zero;
    let mut out = Vec::new();
    if n.is_zero() {
        return vec![BigInt::from(1)];
    }
    let mut d = BigInt::from(1);
    while &d * &d <= *n {
        if (n % &d).is_zero() {
            out.push(d.clone());
            out.push(n / &d);
        }
        d += 1;
    }
    out.sort();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;

    fn fp_poly(field: &Field, coeffs: &[i64]) -> Poly<FieldElem> {
        Poly::new('T', coeffs.iter().map(|c| field.from_int(*c)).collect())
    }

    #[test]
    fn divrem_reconstructs() {
        let f5 = Field::prime(5).unwrap();
        let a = fp_poly(&f5, &[1, 2, 3, 4, 1]);
        let b = fp_poly(&f5, &[2, 0, 1]);
        let (q, r) = a.divrem(&b).unwrap();
        assert_eq!(b.mul(&q).add(&r), a);
        assert!(r.degree().unwrap_or(0) < b.degree().unwrap());
    }

    #[test]
    fn ext_gcd_identity() {
        let f7 = Field::prime(7).unwrap();
        let a = fp_poly(&f7, &[1, 0, 1]); // T^2+1
        let b = fp_poly(&f7, &[3, 1]); // T+3
        let (g, s, t) = a.ext_gcd(&b).unwrap();
        assert_eq!(s.mul(&a).add(&t.mul(&b)), g);
    }

    #[test]
    fn split_roots_t2_minus_1_over_f5() {
        let f5 = Field::prime(5).unwrap();
        let p = fp_poly(&f5, &[-1, 0, 1]);
        let roots = p.split_roots_full().unwrap();
        assert_eq!(roots, vec![f5.from_int(1), f5.from_int(4)]);
    }

    #[test]
    fn split_roots_t2_minus_2_over_f5_fails() {
        // oracle: exhaustive search over F_5 finds no square root of 2
        let f5 = Field::prime(5).unwrap();
        for x in f5.elems() {
            assert!(!x.mul(&x).eq(&f5.from_int(2)));
        }
        let p = fp_poly(&f5, &[-2, 0, 1]);
        assert!(matches!(
            p.split_roots_full(),
            Err(Error::NeedsLargerField { .. })
        ));
    }

    #[test]
    fn split_roots_t3_triple_zero() {
        let f5 = Field::prime(5).unwrap();
        let p = fp_poly(&f5, &[0, 0, 0, 1]);
        let roots = p.split_roots_full().unwrap();
        assert_eq!(roots, vec![f5.zero(), f5.zero(), f5.zero()]);
    }

    #[test]
    fn split_roots_product_reconstructs() {
        let f5 = Field::prime(5).unwrap();
        let p = fp_poly(&f5, &[0, 3, 1, 1]); // T(T^2+T+3), T^2+T+3 irreducible? disc=1-12=-11=4, sqrt(4)=2 exists -> splits
        let s = p.split_roots().unwrap();
        let mut prod = Poly::constant('T', f5.one());
        for r in &s.roots {
            prod = prod.mul(&Poly::new('T', vec![r.neg(), f5.one()]));
        }
        assert_eq!(prod.mul(&s.cofactor), p);
    }

    #[test]
    fn rational_roots() {
        let q = Field::rationals();
        // (2u - 1)(u + 3) = 2u^2 + 5u - 3
        let p = Poly::new(
            'u',
            vec![q.from_int(-3), q.from_int(5), q.from_int(2)],
        );
        let roots = p.split_roots_full().unwrap();
        assert!(roots.contains(&q.from_ratio(1, 2).unwrap()));
        assert!(roots.contains(&q.from_int(-3)));
    }

    #[test]
    fn resultant_matches_root_product() {
        // Res(f,g) = lc(f)^dg * prod g(roots of f) for monic f
        let f5 = Field::prime(5).unwrap();
        let f = fp_poly(&f5, &[-1, 0, 1]); // roots 1, 4
        let g = fp_poly(&f5, &[2, 1]); // T+2
        let expect = g.eval(&f5.from_int(1)).mul(&g.eval(&f5.from_int(4)));
        assert_eq!(f.resultant(&g).unwrap(), expect);
    }

    #[test]
    fn discriminant_quadratic() {
        // disc(T^2 + bT + c) = b^2 - 4c
        let f7 = Field::prime(7).unwrap();
        let p = fp_poly(&f7, &[3, 2, 1]);
        let b = f7.from_int(2);
        let c = f7.from_int(3);
        let expect = b.mul(&b).sub(&f7.from_int(4).mul(&c));
        assert_eq!(p.discriminant().unwrap(), expect);
    }
}
