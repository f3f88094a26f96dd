//! Closed points of the projective line and divisors supported on them.
//!
//! With the base field standing in for an algebraically closed constant
//! field, the closed points are the elements of the field (finite points)
//! together with the point at infinity. Places of higher residue degree
//! are deliberately rejected upstream via `NeedsLargerField`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use crate::field::FieldElem;

/// A closed point of the projective line over the session base field.
#[derive(Clone, PartialEq, Eq)]
pub enum Place {
    Finite(FieldElem),
    Infinity,
}

impl Place {
    pub fn is_infinity(&self) -> bool {
        matches!(self, Place::Infinity)
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Finite(a) => write!(f, "@{a}"),
            Place::Infinity => write!(f, "@inf"),
        }
    }
}

impl fmt::Debug for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl PartialOrd for Place {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Canonical place ordering: finite points by the field enumeration,
/// infinity last. Reports and factor labels rely on this being stable.
impl Ord for Place {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Place::Finite(a), Place::Finite(b)) => a.cmp(b),
            (Place::Finite(_), Place::Infinity) => Ordering::Less,
            (Place::Infinity, Place::Finite(_)) => Ordering::Greater,
            (Place::Infinity, Place::Infinity) => Ordering::Equal,
        }
    }
}

/// A divisor on the projective line: a finite formal sum of places with
/// integer coefficients. Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Divisor {
    coeffs: BTreeMap<Place, i64>,
}

impl Divisor {
    pub fn zero() -> Divisor {
        Divisor::default()
    }

    pub fn coefficient(&self, x: &Place) -> i64 {
        self.coeffs.get(x).copied().unwrap_or(0)
    }

    pub fn set(&mut self, x: Place, k: i64) {
        if k == 0 {
            self.coeffs.remove(&x);
        } else {
            self.coeffs.insert(x, k);
        }
    }

    pub fn add_at(&mut self, x: Place, k: i64) {
        let v = self.coefficient(&x) + k;
        self.set(x, v);
    }

    pub fn support(&self) -> impl Iterator<Item = (&Place, i64)> {
        self.coeffs.iter().map(|(p, k)| (p, *k))
    }

    pub fn places(&self) -> impl Iterator<Item = &Place> {
        self.coeffs.keys()
    }

    pub fn degree(&self) -> i64 {
        self.coeffs.values().sum()
    }

    pub fn is_effective(&self) -> bool {
        self.coeffs.values().all(|k| *k >= 0)
    }

    /// Pointwise `self >= other`.
    pub fn dominates(&self, other: &Divisor) -> bool {
        let mut places: Vec<&Place> = self.coeffs.keys().collect();
        places.extend(other.coeffs.keys());
        places
            .into_iter()
            .all(|x| self.coefficient(x) >= other.coefficient(x))
    }

    pub fn add(&self, other: &Divisor) -> Divisor {
        let mut out = self.clone();
        for (x, k) in other.support() {
            out.add_at(x.clone(), k);
        }
        out
    }

    pub fn neg(&self) -> Divisor {
        let mut out = Divisor::zero();
        for (x, k) in self.support() {
            out.set(x.clone(), -k);
        }
        out
    }
}

impl fmt::Display for Divisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (x, k) in &self.coeffs {
            if !first {
                write!(f, " ")?;
            }
            if *k >= 0 && !first {
                write!(f, "+ ")?;
            } else if *k < 0 {
                write!(f, "- ")?;
            }
            first = false;
            let a = k.abs();
            if a == 1 {
                write!(f, "({x})")?;
            } else {
                write!(f, "{a}*({x})")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;

    #[test]
    fn place_ordering() {
        let f5 = Field::prime(5).unwrap();
        let p0 = Place::Finite(f5.from_int(0));
        let p3 = Place::Finite(f5.from_int(3));
        assert!(p0 < p3);
        assert!(p3 < Place::Infinity);
    }

    #[test]
    fn divisor_bookkeeping() {
        let f5 = Field::prime(5).unwrap();
        let mut d = Divisor::zero();
        d.add_at(Place::Finite(f5.from_int(0)), 2);
        d.add_at(Place::Infinity, -2);
        assert_eq!(d.degree(), 0);
        assert!(!d.is_effective());
        d.add_at(Place::Finite(f5.from_int(0)), -2);
        assert_eq!(d.coefficient(&Place::Finite(f5.from_int(0))), 0);
        assert_eq!(d.support().count(), 1);
    }

    #[test]
    fn dominance() {
        let f5 = Field::prime(5).unwrap();
        let mut d1 = Divisor::zero();
        d1.add_at(Place::Finite(f5.from_int(1)), 3);
        let mut d2 = Divisor::zero();
        d2.add_at(Place::Finite(f5.from_int(1)), 1);
        assert!(d1.dominates(&d2));
        assert!(!d2.dominates(&d1));
    }
}
