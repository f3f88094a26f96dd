//! Base fields for the session: a finite field `F_{p^m}` or the rationals.
//!
//! The base field plays the role of the (algebraically closed) constant
//! field of the curve. Working over a finite field keeps every operation
//! decidable; whenever an algorithm would need a root that does not exist
//! in the current field it fails loudly with [`Error::NeedsLargerField`]
//! rather than silently enlarging the field.
//!
//! Elements are immutable and carry a cheap handle to their field, so all
//! arithmetic is context-free at the call site. Canonical forms are unique:
//! reduced fractions for the rationals, residue polynomials (ascending
//! coefficients, trailing zeros trimmed) for `F_{p^m}`.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

#[derive(Debug, PartialEq, Eq)]
enum FieldRepr {
    /// The rational numbers (characteristic 0).
    Rationals,
    /// `F_{p^m}` presented as `F_p[g]/(modulus(g))`.
    Finite {
        p: u64,
        m: u32,
        /// Monic irreducible of degree m over F_p, ascending coefficients.
        modulus: Vec<u64>,
    },
}

/// Handle to a base field. Clones are cheap and share the definition.
#[derive(Clone, Debug)]
pub struct Field(Arc<FieldRepr>);

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}
impl Eq for Field {}

impl Field {
    /// The field of rational numbers.
    pub fn rationals() -> Field {
        Field(Arc::new(FieldRepr::Rationals))
    }

    /// The prime field `F_p`.
    pub fn prime(p: u64) -> Result<Field> {
        Field::finite(p, 1)
    }

    /// `F_{p^m}` with an automatically chosen modulus: the first monic
    /// irreducible of degree `m` in the lexicographic order of coefficient
    /// vectors. Deterministic, so element enumeration is reproducible.
    pub fn finite(p: u64, m: u32) -> Result<Field> {
        if !is_prime(p) {
            return Err(Error::Unsupported {
                detail: format!("{p} is not prime"),
            });
        }
        if m == 0 {
            return Err(Error::Unsupported {
                detail: "extension degree must be positive".into(),
            });
        }
        if (p as f64).powi(m as i32) > 1e9 {
            return Err(Error::Unsupported {
                detail: format!("field F_{p}^{m} too large for exhaustive arithmetic"),
            });
        }
        let modulus = if m == 1 {
            vec![0, 1] // g itself; unused in degree-1 arithmetic
        } else {
            first_irreducible(p, m)
        };
        Ok(Field(Arc::new(FieldRepr::Finite { p, m, modulus })))
    }

    /// Characteristic: `p`, or 0 for the rationals.
    pub fn characteristic(&self) -> u64 {
        match &*self.0 {
            FieldRepr::Rationals => 0,
            FieldRepr::Finite { p, .. } => *p,
        }
    }

    /// Number of elements, `None` for the rationals.
    pub fn order(&self) -> Option<u64> {
        match &*self.0 {
            FieldRepr::Rationals => None,
            FieldRepr::Finite { p, m, .. } => Some(p.pow(*m)),
        }
    }

    pub fn extension_degree(&self) -> u32 {
        match &*self.0 {
            FieldRepr::Rationals => 1,
            FieldRepr::Finite { m, .. } => *m,
        }
    }

    pub fn is_rationals(&self) -> bool {
        matches!(&*self.0, FieldRepr::Rationals)
    }

    pub fn zero(&self) -> FieldElem {
        match &*self.0 {
            FieldRepr::Rationals => FieldElem {
                field: self.clone(),
                repr: ElemRepr::Rat(BigRational::zero()),
            },
            FieldRepr::Finite { .. } => FieldElem {
                field: self.clone(),
                repr: ElemRepr::Fin(Vec::new()),
            },
        }
    }

    pub fn one(&self) -> FieldElem {
        self.from_int(1)
    }

    pub fn from_int(&self, n: i64) -> FieldElem {
        match &*self.0 {
            FieldRepr::Rationals => FieldElem {
                field: self.clone(),
                repr: ElemRepr::Rat(BigRational::from_integer(BigInt::from(n))),
            },
            FieldRepr::Finite { p, .. } => {
                let r = n.rem_euclid(*p as i64) as u64;
                FieldElem {
                    field: self.clone(),
                    repr: ElemRepr::Fin(if r == 0 { Vec::new() } else { vec![r] }),
                }
            }
        }
    }

    /// Exact rational `n/d` (characteristic 0 only).
    pub fn from_ratio(&self, n: i64, d: i64) -> Result<FieldElem> {
        match &*self.0 {
            FieldRepr::Rationals => {
                if d == 0 {
                    return Err(Error::ZeroInput);
                }
                Ok(FieldElem {
                    field: self.clone(),
                    repr: ElemRepr::Rat(BigRational::new(BigInt::from(n), BigInt::from(d))),
                })
            }
            FieldRepr::Finite { .. } => {
                let den = self.from_int(d);
                if den.is_zero() {
                    return Err(Error::ZeroInput);
                }
                Ok(self.from_int(n).mul(&den.inv()?))
            }
        }
    }

    /// The generator `g` of `F_{p^m}` over `F_p` (the class of the modulus
    /// variable). Errors for prime fields and the rationals.
    pub fn generator(&self) -> Result<FieldElem> {
        match &*self.0 {
            FieldRepr::Finite { m, .. } if *m > 1 => Ok(FieldElem {
                field: self.clone(),
                repr: ElemRepr::Fin(vec![0, 1]),
            }),
            _ => Err(Error::Unsupported {
                detail: "generator only exists in proper extension fields".into(),
            }),
        }
    }

    /// Element with enumeration index `i` (finite fields only): the base-p
    /// digits of `i` are the coefficients of the residue polynomial. This
    /// fixes the canonical ordering of finite places.
    pub fn elem_by_index(&self, mut i: u64) -> Result<FieldElem> {
        match &*self.0 {
            FieldRepr::Rationals => Err(Error::Unsupported {
                detail: "cannot enumerate the rationals".into(),
            }),
            FieldRepr::Finite { p, m, .. } => {
                if i >= p.pow(*m) {
                    return Err(Error::Unsupported {
                        detail: format!("index {i} out of range"),
                    });
                }
                let mut digits = Vec::new();
                while i > 0 {
                    digits.push(i % p);
                    i /= p;
                }
                Ok(FieldElem {
                    field: self.clone(),
                    repr: ElemRepr::Fin(digits),
                })
            }
        }
    }

    /// Iterator over all field elements in canonical order (finite only).
    pub fn elems(&self) -> impl Iterator<Item = FieldElem> + '_ {
        let n = self.order().expect("elems() needs a finite field");
        (0..n).map(move |i| self.elem_by_index(i).unwrap())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum ElemRepr {
    Rat(BigRational),
    /// Residue polynomial in the generator, ascending, trailing zeros
    /// trimmed; empty = zero.
    Fin(Vec<u64>),
}

/// An element of the session base field, in canonical form.
#[derive(Clone)]
pub struct FieldElem {
    field: Field,
    repr: ElemRepr,
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl PartialEq for FieldElem {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.repr == other.repr
    }
}
impl Eq for FieldElem {}

impl PartialOrd for FieldElem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FieldElem {
    /// Canonical order: enumeration index for finite fields, numeric order
    /// for rationals. Used for deterministic place and root orderings.
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.repr, &other.repr) {
            (ElemRepr::Rat(a), ElemRepr::Rat(b)) => a.cmp(b),
            (ElemRepr::Fin(a), ElemRepr::Fin(b)) => {
                // little-endian digit comparison = index comparison
                match a.len().cmp(&b.len()) {
                    Ordering::Equal => a.iter().rev().cmp(b.iter().rev()),
                    o => o,
                }
            }
            _ => panic!("cannot order elements of different fields"),
        }
    }
}

impl FieldElem {
    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        match &self.repr {
            ElemRepr::Rat(r) => r.is_zero(),
            ElemRepr::Fin(v) => v.is_empty(),
        }
    }

    pub fn is_one(&self) -> bool {
        match &self.repr {
            ElemRepr::Rat(r) => r.is_one(),
            ElemRepr::Fin(v) => v == &[1],
        }
    }

    fn check(&self, other: &FieldElem) {
        assert!(
            self.field == other.field,
            "field mismatch in element arithmetic"
        );
    }

    pub fn add(&self, other: &FieldElem) -> FieldElem {
        self.check(other);
        match (&self.repr, &other.repr) {
            (ElemRepr::Rat(a), ElemRepr::Rat(b)) => FieldElem {
                field: self.field.clone(),
                repr: ElemRepr::Rat(a + b),
            },
            (ElemRepr::Fin(a), ElemRepr::Fin(b)) => {
                let p = self.field.characteristic();
                let mut v = vec![0u64; a.len().max(b.len())];
                for (i, c) in a.iter().enumerate() {
                    v[i] = (v[i] + c) % p;
                }
                for (i, c) in b.iter().enumerate() {
                    v[i] = (v[i] + c) % p;
                }
                trim(&mut v);
                FieldElem {
                    field: self.field.clone(),
                    repr: ElemRepr::Fin(v),
                }
            }
            _ => unreachable!(),
        }
    }

    pub fn neg(&self) -> FieldElem {
        match &self.repr {
            ElemRepr::Rat(a) => FieldElem {
                field: self.field.clone(),
                repr: ElemRepr::Rat(-a),
            },
            ElemRepr::Fin(a) => {
                let p = self.field.characteristic();
                let v: Vec<u64> = a.iter().map(|c| (p - c) % p).collect();
                FieldElem {
                    field: self.field.clone(),
                    repr: ElemRepr::Fin(v),
                }
            }
        }
    }

    pub fn sub(&self, other: &FieldElem) -> FieldElem {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &FieldElem) -> FieldElem {
        self.check(other);
        match (&self.repr, &other.repr) {
            (ElemRepr::Rat(a), ElemRepr::Rat(b)) => FieldElem {
                field: self.field.clone(),
                repr: ElemRepr::Rat(a * b),
            },
            (ElemRepr::Fin(a), ElemRepr::Fin(b)) => {
                if a.is_empty() || b.is_empty() {
                    return self.field.zero();
                }
                let (p, modulus) = match &*self.field.0 {
                    FieldRepr::Finite { p, modulus, .. } => (*p, modulus),
                    _ => unreachable!(),
                };
                let mut prod = vec![0u64; a.len() + b.len() - 1];
                for (i, x) in a.iter().enumerate() {
                    for (j, y) in b.iter().enumerate() {
                        prod[i + j] = (prod[i + j] + ((x * y) as u128 % p as u128) as u64) % p;
                    }
                }
                let mut v = fp_rem(&prod, modulus, p);
                trim(&mut v);
                FieldElem {
                    field: self.field.clone(),
                    repr: ElemRepr::Fin(v),
                }
            }
            _ => unreachable!(),
        }
    }

    /// Multiplicative inverse; errors on zero.
    pub fn inv(&self) -> Result<FieldElem> {
        if self.is_zero() {
            return Err(Error::ZeroInput);
        }
        match &self.repr {
            ElemRepr::Rat(a) => Ok(FieldElem {
                field: self.field.clone(),
                repr: ElemRepr::Rat(a.recip()),
            }),
            ElemRepr::Fin(_) => {
                // a^(q-2) in F_q*; the fields are small by construction.
                let q = self.field.order().unwrap();
                Ok(self.pow_u64(q - 2))
            }
        }
    }

    pub fn div(&self, other: &FieldElem) -> Result<FieldElem> {
        Ok(self.mul(&other.inv()?))
    }

    fn pow_u64(&self, mut e: u64) -> FieldElem {
        let mut base = self.clone();
        let mut acc = self.field.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    pub fn pow(&self, e: u32) -> FieldElem {
        self.pow_u64(e as u64)
    }

    /// First `e`-th root of `self` in canonical enumeration order, if one
    /// exists in the field. Exact over the rationals.
    pub fn nth_root(&self, e: u32) -> Option<FieldElem> {
        assert!(e > 0);
        if self.is_zero() {
            return Some(self.field.zero());
        }
        match &self.repr {
            ElemRepr::Fin(_) => self.field.elems().find(|c| &c.pow(e) == self),
            ElemRepr::Rat(r) => {
                if r.is_negative() && e % 2 == 0 {
                    return None;
                }
                let sign = if r.is_negative() { -1 } else { 1 };
                let num = r.numer().abs();
                let den = r.denom().abs();
                let rn = num.nth_root(e);
                let rd = den.nth_root(e);
                if num_traits::pow(rn.clone(), e as usize) == num
                    && num_traits::pow(rd.clone(), e as usize) == den
                {
                    Some(FieldElem {
                        field: self.field.clone(),
                        repr: ElemRepr::Rat(BigRational::new(rn * BigInt::from(sign), rd)),
                    })
                } else {
                    None
                }
            }
        }
    }

    /// Numerator/denominator view (rationals only).
    pub fn as_ratio(&self) -> Option<(BigInt, BigInt)> {
        match &self.repr {
            ElemRepr::Rat(r) => Some((r.numer().clone(), r.denom().clone())),
            ElemRepr::Fin(_) => None,
        }
    }

    /// Enumeration index (finite fields only).
    pub fn index(&self) -> Option<u64> {
        match &self.repr {
            ElemRepr::Fin(v) => {
                let p = self.field.characteristic();
                let mut idx = 0u64;
                for c in v.iter().rev() {
                    idx = idx * p + c;
                }
                Some(idx)
            }
            ElemRepr::Rat(_) => None,
        }
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            ElemRepr::Rat(r) => {
                if r.denom().is_one() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            ElemRepr::Fin(v) => {
                if v.is_empty() {
                    return write!(f, "0");
                }
                if v.len() == 1 {
                    return write!(f, "{}", v[0]);
                }
                let mut first = true;
                for (i, c) in v.iter().enumerate() {
                    if *c == 0 {
                        continue;
                    }
                    if !first {
                        write!(f, "+")?;
                    }
                    first = false;
                    match (i, c) {
                        (0, c) => write!(f, "{c}")?,
                        (1, 1) => write!(f, "g")?,
                        (1, c) => write!(f, "{c}*g")?,
                        (i, 1) => write!(f, "g^{i}")?,
                        (i, c) => write!(f, "{c}*g^{i}")?,
                    }
                }
                Ok(())
            }
        }
    }
}

fn trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

/// Remainder of `a` modulo the monic `modulus`, coefficients in F_p.
fn fp_rem(a: &[u64], modulus: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    let d = modulus.len() - 1;
    while r.len() > d {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - d;
        if lead != 0 {
            for (i, m) in modulus.iter().enumerate() {
                let idx = shift + i;
                let sub = (lead as u128 * *m as u128 % p as u128) as u64;
                r[idx] = (r[idx] + p - sub % p) % p;
            }
        }
        r.pop();
    }
    r
}

fn fp_poly_mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + (*x as u128 * *y as u128 % p as u128) as u64) % p;
        }
    }
    out
}

/// Does the monic polynomial `f` (ascending, over F_p) have a monic divisor
/// of degree in `1..f.degree()`? Brute force; fields here are tiny.
fn fp_has_proper_divisor(f: &[u64], p: u64) -> bool {
    let deg = f.len() - 1;
    for d in 1..=deg / 2 {
        // enumerate monic polynomials of degree d
        let count = p.pow(d as u32);
        for mut idx in 0..count {
            let mut cand = Vec::with_capacity(d + 1);
            for _ in 0..d {
                cand.push(idx % p);
                idx /= p;
            }
            cand.push(1);
            let mut rem = f.to_vec();
            // long division remainder
            while rem.len() >= cand.len() && rem.iter().any(|c| *c != 0) {
                let lead = *rem.last().unwrap();
                if lead == 0 {
                    rem.pop();
                    continue;
                }
                let shift = rem.len() - cand.len();
                for (i, m) in cand.iter().enumerate() {
                    let sub = (lead as u128 * *m as u128 % p as u128) as u64;
                    rem[shift + i] = (rem[shift + i] + p - sub) % p;
                }
                while rem.last() == Some(&0) {
                    rem.pop();
                }
            }
            if rem.iter().all(|c| *c == 0) {
                return true;
            }
        }
    }
    false
}

fn first_irreducible(p: u64, m: u32) -> Vec<u64> {
    let d = m as usize;
    let count = p.pow(m);
    for mut idx in 0..count {
        let mut cand = Vec::with_capacity(d + 1);
        for _ in 0..d {
            cand.push(idx % p);
            idx /= p;
        }
        cand.push(1);
        if !fp_has_proper_divisor(&cand, p) {
            return cand;
        }
    }
    unreachable!("irreducible polynomials exist in every degree");
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

// fp_poly_mul is used by tests to cross-check field multiplication.
#[allow(dead_code)]
fn _keep(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    fp_poly_mul(a, b, p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_arithmetic() {
        let f5 = Field::prime(5).unwrap();
        let a = f5.from_int(3);
        let b = f5.from_int(4);
        assert_eq!(a.add(&b), f5.from_int(2));
        assert_eq!(a.mul(&b), f5.from_int(2));
        assert_eq!(a.inv().unwrap(), f5.from_int(2)); // 3*2 = 6 = 1
        assert!(f5.zero().inv().is_err());
    }

    #[test]
    fn extension_field_closure() {
        let f9 = Field::finite(3, 2).unwrap();
        // every nonzero element has an inverse and x * x^-1 = 1
        for x in f9.elems().skip(1) {
            let y = x.inv().unwrap();
            assert!(x.mul(&y).is_one());
        }
        // Frobenius: x^9 = x
        for x in f9.elems() {
            assert_eq!(x.pow(9), x);
        }
    }

    #[test]
    fn enumeration_round_trip() {
        let f25 = Field::finite(5, 2).unwrap();
        for i in 0..25 {
            let x = f25.elem_by_index(i).unwrap();
            assert_eq!(x.index(), Some(i));
        }
        // ordering agrees with index ordering
        let a = f25.elem_by_index(7).unwrap();
        let b = f25.elem_by_index(12).unwrap();
        assert!(a < b);
    }

    #[test]
    fn rational_arithmetic() {
        let q = Field::rationals();
        let half = q.from_ratio(1, 2).unwrap();
        let third = q.from_ratio(1, 3).unwrap();
        let sum = half.add(&third);
        assert_eq!(sum, q.from_ratio(5, 6).unwrap());
        assert_eq!(half.mul(&half), q.from_ratio(1, 4).unwrap());
        assert_eq!(q.from_ratio(4, 9).unwrap().nth_root(2), q.from_ratio(2, 3).ok());
        assert_eq!(q.from_ratio(2, 1).unwrap().nth_root(2), None);
    }

    #[test]
    fn nth_roots_in_f5() {
        let f5 = Field::prime(5).unwrap();
        // squares mod 5 are {0,1,4}
        assert_eq!(f5.from_int(4).nth_root(2), Some(f5.from_int(2)));
        assert_eq!(f5.from_int(1).nth_root(2), Some(f5.from_int(1)));
        assert_eq!(f5.from_int(2).nth_root(2), None);
        assert_eq!(f5.from_int(3).nth_root(2), None);
    }

    #[test]
    fn cube_roots_in_f7() {
        let f7 = Field::prime(7).unwrap();
        // first cube root of -1 = 6 in enumeration order is 3 (27 = 6 mod 7)
        assert_eq!(f7.from_int(-1).nth_root(3), Some(f7.from_int(3)));
    }
}
