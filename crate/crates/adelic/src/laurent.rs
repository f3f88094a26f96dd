//! Exact Laurent polynomials and precision-tracking truncated series.
//!
//! A [`Jet`] is an exact finite Laurent polynomial `c0 t^v + c1 t^(v+1) + ...`
//! in a local uniformizer. A [`TruncSeries`] is a jet together with the
//! precision `N` up to which it is known (`known modulo t^N`); arithmetic
//! propagates the weakest valid precision and inversion refuses to invent
//! coefficients it cannot know.
//!
//! Exact germs of rational functions are expanded into truncated series by
//! [`expand`]; the expansion is exact to any requested length because the
//! input is an exact rational function of the uniformizer.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::{Field, FieldElem};
use crate::place::Place;
use crate::ratfn::RatFn;

/// An exact Laurent polynomial in a local uniformizer.
///
/// Invariant: the first stored coefficient is nonzero unless the jet is
/// zero (empty coefficient vector), and the last stored coefficient is
/// nonzero as well.
#[derive(Clone, PartialEq)]
pub struct Jet {
    field: Field,
    var: char,
    ord: i64,
    coeffs: Vec<FieldElem>,
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Jet {
    pub fn zero(field: &Field, var: char) -> Jet {
        Jet {
            field: field.clone(),
            var,
            ord: 0,
            coeffs: Vec::new(),
        }
    }

    /// `c * t^e`.
    pub fn monomial(var: char, c: FieldElem, e: i64) -> Jet {
        let field = c.field().clone();
        Jet::new(&field, var, e, vec![c])
    }

    pub fn constant(var: char, c: FieldElem) -> Jet {
        Jet::monomial(var, c, 0)
    }

    /// Normalizing constructor: trims zero coefficients at both ends.
    pub fn new(field: &Field, var: char, mut ord: i64, mut coeffs: Vec<FieldElem>) -> Jet {
        while coeffs.first().map(|c| c.is_zero()).unwrap_or(false) {
            coeffs.remove(0);
            ord += 1;
        }
        while coeffs.last().map(|c| c.is_zero()).unwrap_or(false) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            ord = 0;
        }
        Jet {
            field: field.clone(),
            var,
            ord,
            coeffs,
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn var(&self) -> char {
        self.var
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Valuation (order of the leading term); `None` for the zero jet.
    pub fn valuation(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            Some(self.ord)
        }
    }

    /// Exponent just past the last stored term.
    pub fn end(&self) -> i64 {
        self.ord + self.coeffs.len() as i64
    }

    pub fn coeff_at(&self, e: i64) -> FieldElem {
        if e < self.ord || e >= self.end() {
            self.field.zero()
        } else {
            self.coeffs[(e - self.ord) as usize].clone()
        }
    }

    pub fn add(&self, other: &Jet) -> Jet {
        assert_eq!(self.var, other.var, "mixed uniformizers");
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let ord = self.ord.min(other.ord);
        let end = self.end().max(other.end());
        let mut coeffs = Vec::with_capacity((end - ord) as usize);
        for e in ord..end {
            coeffs.push(self.coeff_at(e).add(&other.coeff_at(e)));
        }
        Jet::new(&self.field, self.var, ord, coeffs)
    }

    pub fn neg(&self) -> Jet {
        Jet {
            field: self.field.clone(),
            var: self.var,
            ord: self.ord,
            coeffs: self.coeffs.iter().map(|c| c.neg()).collect(),
        }
    }

    pub fn sub(&self, other: &Jet) -> Jet {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Jet) -> Jet {
        assert_eq!(self.var, other.var, "mixed uniformizers");
        if self.is_zero() || other.is_zero() {
            return Jet::zero(&self.field, self.var);
        }
        let mut coeffs = vec![self.field.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = coeffs[i + j].add(&a.mul(b));
            }
        }
        Jet::new(&self.field, self.var, self.ord + other.ord, coeffs)
    }

    pub fn scale(&self, c: &FieldElem) -> Jet {
        Jet::new(
            &self.field,
            self.var,
            self.ord,
            self.coeffs.iter().map(|x| x.mul(c)).collect(),
        )
    }

    /// Reinterpret in a new uniformizer with `t = s^e` (exponent scaling).
    pub fn substitute_power(&self, new_var: char, e: i64) -> Jet {
        assert!(e >= 1);
        if self.is_zero() {
            return Jet::zero(&self.field, new_var);
        }
        let mut coeffs = Vec::with_capacity(((self.coeffs.len() as i64 - 1) * e + 1) as usize);
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                for _ in 0..(e - 1) {
                    coeffs.push(self.field.zero());
                }
            }
            coeffs.push(c.clone());
        }
        Jet::new(&self.field, new_var, self.ord * e, coeffs)
    }

    /// Truncate to exponents `< prec`.
    pub fn truncated(&self, prec: i64) -> Jet {
        if self.is_zero() || self.end() <= prec {
            return self.clone();
        }
        if prec <= self.ord {
            return Jet::zero(&self.field, self.var);
        }
        let keep = (prec - self.ord) as usize;
        Jet::new(
            &self.field,
            self.var,
            self.ord,
            self.coeffs[..keep].to_vec(),
        )
    }

    /// The jet as an exact rational function of its uniformizer.
    pub fn to_ratfn(&self) -> RatFn {
        use crate::poly::Poly;
        if self.is_zero() {
            return RatFn::zero(&self.field, self.var);
        }
        let shift = self.ord.min(0).unsigned_abs() as usize;
        let mut num = vec![self.field.zero(); (self.ord + shift as i64) as usize];
        num.extend(self.coeffs.iter().cloned());
        let num = Poly::new(self.var, num);
        let den = Poly::monomial(self.var, self.field.one(), shift);
        RatFn::new(num, den).expect("nonzero denominator")
    }

    /// Recover a jet from a rational function whose denominator is a pure
    /// power of the uniformizer; `None` otherwise.
    pub fn try_from_ratfn(f: &RatFn) -> Option<Jet> {
        let den = f.denominator();
        let dd = den.degree()?;
        // denominator must be exactly t^dd (monic, all lower coefficients 0)
        for i in 0..dd {
            if !den.coeff(i).is_zero() {
                return None;
            }
        }
        let field = f.field().clone();
        let coeffs = f.numerator().coeffs().to_vec();
        Some(Jet::new(&field, f.var_symbol(), -(dd as i64), coeffs))
    }

    /// The germ of this jet at a place of the line: reinterpret the local
    /// uniformizer as `u - a` (or `1/u` at infinity) and return the global
    /// rational function it denotes.
    pub fn as_global(&self, x: &Place, var: char) -> RatFn {
        self.to_ratfn().globalize_at(x, var)
    }
}

impl fmt::Display for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let v = self.var;
        if self.ord != 0 {
            write!(f, "{v}^{}*(", self.ord)?;
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let cs = format!("{c}");
            match i {
                0 => write!(f, "{cs}")?,
                1 if cs == "1" => write!(f, "{v}")?,
                1 => write!(f, "{cs}*{v}")?,
                _ if cs == "1" => write!(f, "{v}^{i}")?,
                _ => write!(f, "{cs}*{v}^{i}")?,
            }
        }
        if self.ord != 0 {
            write!(f, ")")?;
        }
        Ok(())
    }
}

/// A Laurent series known modulo `t^prec`: the stored jet holds every
/// coefficient with exponent below `prec` and nothing beyond.
#[derive(Clone, PartialEq)]
pub struct TruncSeries {
    jet: Jet,
    prec: i64,
}

impl fmt::Debug for TruncSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for TruncSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + O({}^{})", self.jet, self.jet.var(), self.prec)
    }
}

impl TruncSeries {
    pub fn new(jet: Jet, prec: i64) -> TruncSeries {
        TruncSeries {
            jet: jet.truncated(prec),
            prec,
        }
    }

    pub fn zero_to(field: &Field, var: char, prec: i64) -> TruncSeries {
        TruncSeries {
            jet: Jet::zero(field, var),
            prec,
        }
    }

    pub fn jet(&self) -> &Jet {
        &self.jet
    }

    pub fn prec(&self) -> i64 {
        self.prec
    }

    pub fn var(&self) -> char {
        self.jet.var()
    }

    pub fn field(&self) -> &Field {
        self.jet.field()
    }

    /// Known to be zero modulo the precision? (Says nothing beyond it.)
    pub fn is_zero_to_prec(&self) -> bool {
        self.jet.is_zero()
    }

    /// Valuation if visible within the precision window.
    pub fn valuation(&self) -> Option<i64> {
        self.jet.valuation()
    }

    pub fn coeff_at(&self, e: i64) -> Result<FieldElem> {
        if e >= self.prec {
            return Err(Error::PrecisionExhausted {
                detail: format!(
                    "coefficient of {}^{e} requested, known only modulo {}^{}",
                    self.var(),
                    self.var(),
                    self.prec
                ),
            });
        }
        Ok(self.jet.coeff_at(e))
    }

    pub fn add(&self, other: &TruncSeries) -> TruncSeries {
        let prec = self.prec.min(other.prec);
        TruncSeries::new(self.jet.add(&other.jet), prec)
    }

    pub fn neg(&self) -> TruncSeries {
        TruncSeries {
            jet: self.jet.neg(),
            prec: self.prec,
        }
    }

    pub fn sub(&self, other: &TruncSeries) -> TruncSeries {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &TruncSeries) -> TruncSeries {
        // the product of a (known mod t^Na, val va) and b (mod t^Nb, val vb)
        // is known mod t^min(Na+vb, Nb+va)
        let va = self.jet.valuation().unwrap_or(self.prec);
        let vb = other.jet.valuation().unwrap_or(other.prec);
        let prec = (self.prec + vb).min(other.prec + va);
        TruncSeries::new(self.jet.mul(&other.jet), prec)
    }

    pub fn scale(&self, c: &FieldElem) -> TruncSeries {
        TruncSeries {
            jet: self.jet.scale(c),
            prec: self.prec,
        }
    }

    /// Multiplicative inverse. The relative precision is preserved: a series
    /// of valuation `v` known modulo `t^N` has inverse known modulo
    /// `t^(N - 2v)`.
    pub fn inv(&self) -> Result<TruncSeries> {
        let v = self.jet.valuation().ok_or_else(|| Error::PrecisionExhausted {
            detail: format!(
                "cannot invert a series that vanishes modulo {}^{}",
                self.var(),
                self.prec
            ),
        })?;
        let terms = (self.prec - v) as usize; // relative precision
        let lead_inv = self.jet.coeff_at(v).inv()?;
        // u = self / (lead * t^v) = 1 + w with val w >= 1; invert by recurrence
        let mut inv_coeffs = vec![self.field().zero(); terms];
        inv_coeffs[0] = self.field().one();
        let unit: Vec<FieldElem> = (0..terms as i64)
            .map(|i| self.jet.coeff_at(v + i).mul(&lead_inv))
            .collect();
        for i in 1..terms {
            let mut acc = self.field().zero();
            for j in 1..=i {
                acc = acc.add(&unit[j].mul(&inv_coeffs[i - j]));
            }
            inv_coeffs[i] = acc.neg();
        }
        let jet = Jet::new(self.field(), self.var(), -v, inv_coeffs).scale(&lead_inv);
        Ok(TruncSeries::new(jet, self.prec - 2 * v))
    }

    pub fn truncated(&self, prec: i64) -> TruncSeries {
        TruncSeries::new(self.jet.clone(), self.prec.min(prec))
    }

    /// Reinterpret with `t = s^e`; precision scales accordingly.
    pub fn substitute_power(&self, new_var: char, e: i64) -> TruncSeries {
        TruncSeries {
            jet: self.jet.substitute_power(new_var, e),
            prec: self.prec * e,
        }
    }

    pub fn pow(&self, e: u32) -> TruncSeries {
        if e == 0 {
            return TruncSeries::new(
                Jet::constant(self.var(), self.field().one()),
                // 1 is exact; cap by a generous window so products behave
                i64::MAX / 4,
            );
        }
        let mut acc = self.clone();
        for _ in 1..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Do the two series agree on every coefficient both of them know?
    pub fn agrees(&self, other: &TruncSeries) -> bool {
        let prec = self.prec.min(other.prec);
        self.jet.truncated(prec) == other.jet.truncated(prec)
    }
}

/// Exact expansion of a rational function of the uniformizer into a series
/// known modulo `t^prec`.
pub fn expand(f: &RatFn, prec: i64) -> TruncSeries {
    let field = f.field().clone();
    let var = f.var_symbol();
    if f.is_zero() {
        return TruncSeries::zero_to(&field, var, prec);
    }
    let num = f.numerator();
    let den = f.denominator();
    let vn = (0..).find(|i| !num.coeff(*i).is_zero()).unwrap() as i64;
    let vd = (0..).find(|i| !den.coeff(*i).is_zero()).unwrap() as i64;
    let shift = vn - vd;
    let terms = (prec - shift).max(0) as usize;
    if terms == 0 {
        return TruncSeries::zero_to(&field, var, prec);
    }
    let d0 = den.coeff(vd as usize);
    let d0_inv = d0.inv().expect("leading denominator coefficient nonzero");
    // series of (num/t^vn) / (den/t^vd) by the standard division recurrence
    let mut out = vec![field.zero(); terms];
    for i in 0..terms {
        let mut acc = num.coeff((vn as usize) + i);
        for j in 1..=i {
            acc = acc.sub(&den.coeff(vd as usize + j).mul(&out[i - j]));
        }
        out[i] = acc.mul(&d0_inv);
    }
    TruncSeries::new(Jet::new(&field, var, shift, out), prec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Poly;

    fn f5() -> Field {
        Field::prime(5).unwrap()
    }

    fn jet(field: &Field, ord: i64, coeffs: &[i64]) -> Jet {
        Jet::new(
            field,
            't',
            ord,
            coeffs.iter().map(|c| field.from_int(*c)).collect(),
        )
    }

    #[test]
    fn jet_normal_form() {
        let k = f5();
        let j = jet(&k, -1, &[0, 1, 2, 0]);
        assert_eq!(j.valuation(), Some(0));
        assert_eq!(j.end(), 2);
        let z = jet(&k, 3, &[0, 0]);
        assert!(z.is_zero());
    }

    #[test]
    fn jet_ratfn_round_trip() {
        let k = f5();
        let j = jet(&k, -2, &[3, 0, 1, 4]);
        let f = j.to_ratfn();
        assert_eq!(Jet::try_from_ratfn(&f), Some(j));
    }

    #[test]
    fn jet_not_from_general_ratfn() {
        let k = f5();
        // 1/(1+t) has infinite expansion: not a jet
        let num = Poly::constant('t', k.one());
        let den = Poly::new('t', vec![k.one(), k.one()]);
        let f = RatFn::new(num, den).unwrap();
        assert_eq!(Jet::try_from_ratfn(&f), None);
    }

    #[test]
    fn expansion_of_geometric_series() {
        let k = f5();
        // 1/(1 - t) = 1 + t + t^2 + ...
        let num = Poly::constant('t', k.one());
        let den = Poly::new('t', vec![k.one(), k.from_int(-1)]);
        let f = RatFn::new(num, den).unwrap();
        let s = expand(&f, 4);
        for e in 0..4 {
            assert_eq!(s.coeff_at(e).unwrap(), k.one());
        }
        assert!(s.coeff_at(4).is_err());
    }

    #[test]
    fn series_inverse_round_trip() {
        let k = f5();
        let s = TruncSeries::new(jet(&k, 1, &[2, 1, 0, 3]), 8);
        let inv = s.inv().unwrap();
        assert_eq!(inv.valuation(), Some(-1));
        let prod = s.mul(&inv);
        assert_eq!(prod.valuation(), Some(0));
        assert_eq!(prod.coeff_at(0).unwrap(), k.one());
        for e in 1..prod.prec() {
            assert!(prod.coeff_at(e).unwrap().is_zero());
        }
    }

    #[test]
    fn precision_propagates_through_mul() {
        let k = f5();
        let a = TruncSeries::new(jet(&k, 2, &[1]), 5); // t^2 + O(t^5)
        let b = TruncSeries::new(jet(&k, -1, &[1]), 3); // t^-1 + O(t^3)
        let prod = a.mul(&b);
        // known mod min(5 + (-1), 3 + 2) = 4
        assert_eq!(prod.prec(), 4);
        assert_eq!(prod.valuation(), Some(1));
    }

    #[test]
    fn substitute_power_scales() {
        let k = f5();
        let s = TruncSeries::new(jet(&k, 1, &[1, 2]), 4);
        let t = s.substitute_power('s', 2);
        assert_eq!(t.valuation(), Some(2));
        assert_eq!(t.prec(), 8);
        assert_eq!(t.coeff_at(4).unwrap(), k.from_int(2));
        assert!(t.coeff_at(3).unwrap().is_zero());
    }
}
