//! The function field of the projective line: rational functions in `u`.
//!
//! Canonical form: numerator and denominator coprime, denominator monic.
//! The same type doubles as the exact coefficient field `k(t)` of local
//! computations (rational functions in a local uniformizer), which is why
//! the variable is carried explicitly.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::{Field, FieldElem};
use crate::place::{Divisor, Place};
use crate::poly::{Coeff, Poly};

/// A rational function `num/den` in canonical form.
#[derive(Clone, PartialEq)]
pub struct RatFn {
    num: Poly<FieldElem>,
    den: Poly<FieldElem>,
}

impl fmt::Debug for RatFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl RatFn {
    /// Build and normalize. Errors if the denominator is zero.
    pub fn new(num: Poly<FieldElem>, den: Poly<FieldElem>) -> Result<RatFn> {
        if den.is_zero() {
            return Err(Error::ZeroInput);
        }
        assert_eq!(num.var(), den.var(), "mixed variables in rational function");
        if num.is_zero() {
            let one = den.lead().unwrap().field().one();
            return Ok(RatFn {
                num,
                den: Poly::constant(den.var(), one),
            });
        }
        let g = num.gcd(&den)?;
        let (num, _) = num.divrem(&g)?;
        let (den, _) = den.divrem(&g)?;
        // make the denominator monic
        let lead_inv = den.lead().unwrap().inv()?;
        let num = num.scale(&lead_inv);
        let den = den.scale(&lead_inv);
        Ok(RatFn { num, den })
    }

    pub fn from_poly(p: Poly<FieldElem>) -> RatFn {
        let one = match p.lead() {
            Some(c) => c.field().one(),
            None => panic!("from_poly(zero) lacks field context; use RatFn::zero"),
        };
        let den = Poly::constant(p.var(), one);
        RatFn { num: p, den }
    }

    pub fn zero(field: &Field, var: char) -> RatFn {
        RatFn {
            num: Poly::zero(var),
            den: Poly::constant(var, field.one()),
        }
    }

    pub fn constant(field: &Field, var: char, c: FieldElem) -> RatFn {
        let _ = field;
        if c.is_zero() {
            return RatFn::zero(c.field(), var);
        }
        let one = c.field().one();
        RatFn {
            num: Poly::constant(var, c),
            den: Poly::constant(var, one),
        }
    }

    /// The identity function `u` (or whatever the variable is called).
    pub fn variable(field: &Field, var: char) -> RatFn {
        RatFn {
            num: Poly::new(var, vec![field.zero(), field.one()]),
            den: Poly::constant(var, field.one()),
        }
    }

    pub fn numerator(&self) -> &Poly<FieldElem> {
        &self.num
    }

    pub fn denominator(&self) -> &Poly<FieldElem> {
        &self.den
    }

    pub fn var_symbol(&self) -> char {
        self.den.var()
    }

    pub fn field(&self) -> &Field {
        self.den.lead().unwrap().field()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Is this a constant function (degree-0 numerator and denominator)?
    pub fn is_constant(&self) -> bool {
        self.num.degree().unwrap_or(0) == 0 && self.den.degree().unwrap() == 0
    }

    pub fn add(&self, other: &RatFn) -> RatFn {
        let num = self.num.mul(&other.den).add(&other.num.mul(&self.den));
        let den = self.den.mul(&other.den);
        RatFn::new(num, den).expect("nonzero denominators")
    }

    pub fn neg(&self) -> RatFn {
        RatFn {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, other: &RatFn) -> RatFn {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &RatFn) -> RatFn {
        let num = self.num.mul(&other.num);
        let den = self.den.mul(&other.den);
        RatFn::new(num, den).expect("nonzero denominators")
    }

    pub fn inv(&self) -> Result<RatFn> {
        if self.is_zero() {
            return Err(Error::ZeroInput);
        }
        RatFn::new(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, other: &RatFn) -> Result<RatFn> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, e: i32) -> Result<RatFn> {
        if e == 0 {
            return Ok(RatFn::constant(self.field(), self.var_symbol(), self.field().one()));
        }
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut acc = base.clone();
        for _ in 1..e.unsigned_abs() {
            acc = acc.mul(&base);
        }
        Ok(acc)
    }

    /// Order of vanishing at a place; poles are negative. At infinity this
    /// is `deg(den) - deg(num)`.
    pub fn valuation(&self, x: &Place) -> Result<i64> {
        if self.is_zero() {
            return Err(Error::ZeroInput);
        }
        match x {
            Place::Infinity => {
                Ok(self.den.degree().unwrap() as i64 - self.num.degree().unwrap() as i64)
            }
            Place::Finite(a) => {
                Ok(root_multiplicity(&self.num, a)? as i64
                    - root_multiplicity(&self.den, a)? as i64)
            }
        }
    }

    /// The full divisor of zeros and poles, including infinity. Requires
    /// numerator and denominator to split into linear factors over the base
    /// field; the unsplit factor is reported otherwise. The resulting
    /// divisor always has degree zero.
    pub fn divisor(&self) -> Result<Divisor> {
        if self.is_zero() {
            return Err(Error::ZeroInput);
        }
        let mut d = Divisor::zero();
        for root in self.num.split_roots_full()? {
            d.add_at(Place::Finite(root), 1);
        }
        for root in self.den.split_roots_full()? {
            d.add_at(Place::Finite(root), -1);
        }
        d.add_at(Place::Infinity, self.valuation(&Place::Infinity)?);
        Ok(d)
    }

    pub fn eval(&self, x: &FieldElem) -> Result<FieldElem> {
        let den = self.den.eval(x);
        if den.is_zero() {
            return Err(Error::ZeroInput);
        }
        self.num.eval(x).div(&den)
    }

    /// The exact germ at a place, as a rational function of the local
    /// uniformizer `t` (`t = u - a` at a finite point, `t = 1/u` at
    /// infinity). Exactness is preserved: no series truncation happens here.
    pub fn germ_at(&self, x: &Place) -> RatFn {
        match x {
            Place::Finite(a) => {
                let field = self.field();
                let shift = Poly::new('t', vec![a.clone(), field.one()]);
                let num = self.num.map('t', |c| c.clone()).compose(&shift);
                let den = self.den.map('t', |c| c.clone()).compose(&shift);
                RatFn::new(num, den).expect("nonzero denominator survives composition")
            }
            Place::Infinity => {
                let dn = self.num.degree().unwrap_or(0);
                let dd = self.den.degree().unwrap();
                let mut num = self.num.map('t', |c| c.clone()).reverse();
                let mut den = self.den.map('t', |c| c.clone()).reverse();
                let one = self.field().one();
                if dd > dn {
                    num = num.mul(&Poly::monomial('t', one, dd - dn));
                } else if dn > dd {
                    den = den.mul(&Poly::monomial('t', one.clone(), dn - dd));
                }
                RatFn::new(num, den).expect("nonzero denominator")
            }
        }
    }

    /// Reinterpret a germ in `t` at a finite place back as a global
    /// rational function of `u` (`t = u - a`), or of `u` via `t = 1/u` at
    /// infinity. Inverse of [`RatFn::germ_at`].
    pub fn globalize_at(&self, x: &Place, var: char) -> RatFn {
        match x {
            Place::Finite(a) => {
                let field = self.field();
                let shift = Poly::new(var, vec![a.neg(), field.one()]);
                let num = self.num.map(var, |c| c.clone()).compose(&shift);
                let den = self.den.map(var, |c| c.clone()).compose(&shift);
                RatFn::new(num, den).expect("nonzero denominator")
            }
            Place::Infinity => {
                let dn = self.num.degree().unwrap_or(0);
                let dd = self.den.degree().unwrap();
                let mut num = self.num.map(var, |c| c.clone()).reverse();
                let mut den = self.den.map(var, |c| c.clone()).reverse();
                let one = self.field().one();
                if dd > dn {
                    num = num.mul(&Poly::monomial(var, one, dd - dn));
                } else if dn > dd {
                    den = den.mul(&Poly::monomial(var, one.clone(), dn - dd));
                }
                RatFn::new(num, den).expect("nonzero denominator")
            }
        }
    }
}

fn root_multiplicity(p: &Poly<FieldElem>, a: &FieldElem) -> Result<usize> {
    let mut mult = 0;
    let lin = Poly::new(p.var(), vec![a.neg(), a.field().one()]);
    let mut rest = p.clone();
    while !rest.is_zero() && rest.eval(a).is_zero() {
        let (q, r) = rest.divrem(&lin)?;
        debug_assert!(r.is_zero());
        rest = q;
        mult += 1;
    }
    Ok(mult)
}

impl Coeff for RatFn {
    fn zero_like(&self) -> Self {
        RatFn::zero(self.field(), self.var_symbol())
    }
    fn one_like(&self) -> Self {
        RatFn::constant(self.field(), self.var_symbol(), self.field().one())
    }
    fn is_zero(&self) -> bool {
        RatFn::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        RatFn::add(self, other)
    }
    fn sub(&self, other: &Self) -> Self {
        RatFn::sub(self, other)
    }
    fn mul(&self, other: &Self) -> Self {
        RatFn::mul(self, other)
    }
    fn neg(&self) -> Self {
        RatFn::neg(self)
    }
    fn inv(&self) -> Result<Self> {
        RatFn::inv(self)
    }
}

impl fmt::Display for RatFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.degree() == Some(0) {
            return write!(f, "{}", self.num);
        }
        let n = format!("{}", self.num);
        let d = format!("{}", self.den);
        let wrap = |s: &str| {
            if s.contains('+') || s.contains(' ') {
                format!("({s})")
            } else {
                s.to_string()
            }
        };
        write!(f, "{}/{}", wrap(&n), wrap(&d))
    }
}
