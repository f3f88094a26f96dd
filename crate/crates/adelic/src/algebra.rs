//! The adelic algebra `A_X[T]/(p(T))` for a monic separable `p` with adele
//! coefficients: separability certificates, classification of places,
//! local étale decompositions, element arithmetic in the free-module
//! presentation, localization, and integrality.
//!
//! The decisive computations are all componentwise: projecting a
//! coefficient adele to a place is exact, and determinants, resultants and
//! Bézout certificates commute with the projections, so global answers are
//! assembled from one generic computation over the function field plus one
//! local computation per override place.

use std::collections::BTreeSet;
use std::fmt;

use crate::adele::Adele;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::laurent::TruncSeries;
use crate::local::{self, LocalFactor};
use crate::place::Place;
use crate::poly::{Coeff, Poly};
use crate::ratfn::RatFn;

/// A monic polynomial of degree `n >= 1` with adele coefficients; the
/// leading coefficient is implicitly 1 and `coeffs[i]` multiplies `T^i`.
#[derive(Clone, PartialEq)]
pub struct AdelicPoly {
    coeffs: Vec<Adele>,
}

/// How a place sits relative to `p`: the trichotomy of coefficient poles,
/// non-unit discriminant, and the (cofinite) good case.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlaceClass {
    NonIntegral,
    IntegralNonSeparable,
    IntegralSeparable,
}

impl fmt::Display for PlaceClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            PlaceClass::NonIntegral => "non-integral",
            PlaceClass::IntegralNonSeparable => "integral, not separable",
            PlaceClass::IntegralSeparable => "integral and separable",
        };
        write!(f, "{s}")
    }
}

/// Outcome of the global separability test: either a verified Bézout
/// certificate or a place witnessing pointwise inseparability.
#[derive(Clone)]
pub enum Separability {
    Separable {
        /// `a*p + b*p' = 1` with `deg a, deg b < n`, verified exactly.
        cert_a: AlgebraElement,
        cert_b: AlgebraElement,
    },
    Inseparable { witness: Place },
}

impl Separability {
    pub fn is_separable(&self) -> bool {
        matches!(self, Separability::Separable { .. })
    }
}

/// The local étale decomposition of `p` at one place: the list of factors
/// of the completion, each a copy of `k((s))` with `s^e = t`.
#[derive(Debug, Clone)]
pub struct LocalDecomposition {
    pub place: Place,
    pub factors: Vec<LocalFactor>,
}

impl LocalDecomposition {
    /// Number of local field factors.
    pub fn factor_count(&self) -> usize {
        self.factors.len()
    }
}

impl AdelicPoly {
    /// Monic polynomial `T^n + c_{n-1} T^(n-1) + ... + c_0` from the
    /// non-leading coefficients.
    pub fn new(coeffs: Vec<Adele>) -> AdelicPoly {
        assert!(!coeffs.is_empty(), "degree must be at least 1");
        AdelicPoly { coeffs }
    }

    /// Embed a monic polynomial over the function field coefficientwise.
    pub fn from_sigma(p: &Poly<RatFn>) -> AdelicPoly {
        assert!(p.is_monic());
        let n = p.degree().unwrap();
        assert!(n >= 1);
        let coeffs = (0..n).map(|i| Adele::from_ratfn(p.coeff(i))).collect();
        AdelicPoly { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeff(&self, i: usize) -> &Adele {
        &self.coeffs[i]
    }

    pub fn coeffs(&self) -> &[Adele] {
        &self.coeffs
    }

    pub fn field(&self) -> &Field {
        self.coeffs[0].field()
    }

    /// All places where some coefficient carries an override.
    pub fn override_places(&self) -> BTreeSet<Place> {
        let mut out = BTreeSet::new();
        for c in &self.coeffs {
            out.extend(c.overrides().keys().cloned());
        }
        out
    }

    /// Full coefficient vector including the leading 1.
    pub fn full_vec(&self) -> Vec<Adele> {
        let mut v = self.coeffs.clone();
        v.push(Adele::one(self.field()));
        v
    }

    /// Coefficient vector of the formal derivative (length `n`).
    pub fn derivative_vec(&self) -> Vec<Adele> {
        let field = self.field().clone();
        let mut out = Vec::with_capacity(self.degree());
        for (i, c) in self.full_vec().iter().enumerate().skip(1) {
            let mut acc = Adele::zero(&field);
            for _ in 0..i {
                acc = acc.add(c);
            }
            out.push(acc);
        }
        out
    }

    /// The monic projection `p_x(T)` over the local field at `x`, with
    /// exact germ coefficients.
    pub fn project_at(&self, x: &Place) -> Poly<RatFn> {
        let field = self.field();
        let mut coeffs: Vec<RatFn> = self.coeffs.iter().map(|c| c.local_component(x)).collect();
        coeffs.push(RatFn::constant(field, 't', field.one()));
        Poly::new('T', coeffs)
    }

    /// The projection of `p` to the function field (generic parts only).
    pub fn generic_poly(&self) -> Poly<RatFn> {
        let field = self.field();
        let mut coeffs: Vec<RatFn> = self.coeffs.iter().map(|c| c.generic().clone()).collect();
        coeffs.push(RatFn::constant(field, 'u', field.one()));
        Poly::new('T', coeffs)
    }

    /// The discriminant as one adele (generic discriminant plus local
    /// discriminants at the coefficient override places). Discriminants
    /// commute with the component projections, so this is exact.
    pub fn discriminant_adele(&self) -> Result<Adele> {
        let generic = self.generic_poly().discriminant()?;
        let mut overrides = std::collections::BTreeMap::new();
        for x in self.override_places() {
            let local_disc = self.project_at(&x).discriminant()?;
            overrides.insert(x.clone(), local_disc.globalize_at(&x, 'u'));
        }
        Ok(Adele::new(generic, overrides))
    }

    /// Classify one place by the trichotomy.
    pub fn classify_place(&self, x: &Place) -> PlaceClass {
        let px = self.project_at(x);
        if !px.coeffs().iter().all(local::is_integral) {
            return PlaceClass::NonIntegral;
        }
        let disc = px.discriminant().expect("monic discriminant");
        if local::t_valuation(&disc) == Some(0) {
            PlaceClass::IntegralSeparable
        } else {
            PlaceClass::IntegralNonSeparable
        }
    }

    /// The finite set of places whose class is not `IntegralSeparable`:
    /// coefficient poles and overrides, zeros and poles of the generic
    /// discriminant, and infinity when it misbehaves. Assumes `p` is
    /// separable (run [`AdelicPoly::is_separable`] first), otherwise the
    /// true set need not be finite.
    pub fn bad_set(&self) -> Result<BTreeSet<Place>> {
        let mut candidates = self.override_places();
        candidates.insert(Place::Infinity);
        for c in &self.coeffs {
            let g = c.generic();
            if !g.is_zero() {
                for pole in g.denominator().split_roots_full()? {
                    candidates.insert(Place::Finite(pole));
                }
            }
        }
        let disc = self.generic_poly().discriminant()?;
        if !disc.is_zero() {
            for z in disc.numerator().split_roots_full()? {
                candidates.insert(Place::Finite(z));
            }
            for z in disc.denominator().split_roots_full()? {
                candidates.insert(Place::Finite(z));
            }
        }
        Ok(candidates
            .into_iter()
            .filter(|x| self.classify_place(x) != PlaceClass::IntegralSeparable)
            .collect())
    }

    /// Global separability test with certificate. `p` is separable over
    /// the adele ring iff its discriminant is an idele; the certificate is
    /// a verified Bézout pair assembled from the generic extended Euclid
    /// over the function field and local ones at the override places.
    pub fn is_separable(&self) -> Result<Separability> {
        let disc = self.discriminant_adele()?;
        if !disc.is_idele() {
            // locate a witness place with vanishing local discriminant
            if let Some((x, _)) = disc.overrides().iter().find(|(_, v)| v.is_zero()) {
                return Ok(Separability::Inseparable { witness: x.clone() });
            }
            debug_assert!(disc.generic().is_zero());
            let witness = self.first_non_override_place();
            return Ok(Separability::Inseparable { witness });
        }

        let n = self.degree();
        let field = self.field().clone();
        // generic certificate over the function field
        let p_gen = self.generic_poly();
        let (g, a_gen, b_gen) = p_gen.ext_gcd(&p_gen.derivative())?;
        if g.degree() != Some(0) {
            return Err(Error::Inconsistency {
                detail: "idele discriminant but nontrivial generic gcd".into(),
            });
        }
        let mut cert_a: Vec<Adele> = (0..n)
            .map(|i| {
                if a_gen.degree().map(|d| i <= d).unwrap_or(false) {
                    Adele::from_ratfn(a_gen.coeff(i))
                } else {
                    Adele::zero(&field)
                }
            })
            .collect();
        let mut cert_b: Vec<Adele> = (0..n)
            .map(|i| {
                if b_gen.degree().map(|d| i <= d).unwrap_or(false) {
                    Adele::from_ratfn(b_gen.coeff(i))
                } else {
                    Adele::zero(&field)
                }
            })
            .collect();
        // local corrections at override places
        for x in self.override_places() {
            let px = self.project_at(&x);
            let (gx, ax, bx) = px.ext_gcd(&px.derivative())?;
            if gx.degree() != Some(0) {
                return Err(Error::Inconsistency {
                    detail: format!("idele discriminant but nontrivial gcd at {x}"),
                });
            }
            for i in 0..n {
                let av = if ax.degree().map(|d| i <= d).unwrap_or(false) {
                    ax.coeff(i)
                } else {
                    RatFn::zero(&field, 't')
                };
                let bv = if bx.degree().map(|d| i <= d).unwrap_or(false) {
                    bx.coeff(i)
                } else {
                    RatFn::zero(&field, 't')
                };
                cert_a[i] = cert_a[i].with_override(x.clone(), av.globalize_at(&x, 'u'));
                cert_b[i] = cert_b[i].with_override(x.clone(), bv.globalize_at(&x, 'u'));
            }
        }
        let cert_a = AlgebraElement::new(cert_a);
        let cert_b = AlgebraElement::new(cert_b);

        // verify a*p + b*p' = 1 by exact adelic polynomial arithmetic
        let lhs = vec_add(
            &vec_mul(cert_a.coeffs(), &self.full_vec()),
            &vec_mul(cert_b.coeffs(), &self.derivative_vec()),
        );
        let mut ok = !lhs.is_empty() && lhs[0] == Adele::one(&field);
        for c in lhs.iter().skip(1) {
            ok &= c.is_zero();
        }
        if !ok {
            return Err(Error::Inconsistency {
                detail: "Bézout certificate failed verification".into(),
            });
        }
        Ok(Separability::Separable { cert_a, cert_b })
    }

    fn first_non_override_place(&self) -> Place {
        let field = self.field();
        let overrides = self.override_places();
        if let Some(order) = field.order() {
            for i in 0..order {
                let x = Place::Finite(field.elem_by_index(i).unwrap());
                if !overrides.contains(&x) {
                    return x;
                }
            }
        } else {
            for i in 0..1_000 {
                let x = Place::Finite(field.from_int(i));
                if !overrides.contains(&x) {
                    return x;
                }
            }
        }
        Place::Infinity
    }

    /// The local decomposition at a place: Hensel splitting in the good
    /// case, Newton polygon factorization otherwise. Factor labels are
    /// canonical and `sum of e_j = n` is enforced.
    pub fn decompose_at(&self, x: &Place, prec: i64) -> Result<LocalDecomposition> {
        let px = self.project_at(x);
        let factors = match self.classify_place(x) {
            PlaceClass::IntegralSeparable => local::hensel_split(&px, prec)?
                .into_iter()
                .enumerate()
                .map(|(i, root)| LocalFactor {
                    label: i + 1,
                    e: 1,
                    root: root.substitute_power('s', 1),
                })
                .collect(),
            _ => local::local_factor(&px, prec)?,
        };
        let total: i64 = factors.iter().map(|f| f.e).sum();
        if total != self.degree() as i64 {
            return Err(Error::Inconsistency {
                detail: format!(
                    "ramification indices at {x} sum to {total}, expected {}",
                    self.degree()
                ),
            });
        }
        Ok(LocalDecomposition {
            place: x.clone(),
            factors,
        })
    }
}

impl fmt::Display for AdelicPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "T^{}", self.degree())?;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if i == 0 {
                write!(f, " + ({c})")?;
            } else if i == 1 {
                write!(f, " + ({c})*T")?;
            } else {
                write!(f, " + ({c})*T^{i}")?;
            }
        }
        Ok(())
    }
}

/// An element of the algebra in the free-module presentation: the vector
/// of coefficients of its unique degree `< n` representative.
#[derive(Clone, PartialEq)]
pub struct AlgebraElement {
    coeffs: Vec<Adele>,
}

impl fmt::Debug for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

impl AlgebraElement {
    pub fn new(coeffs: Vec<Adele>) -> AlgebraElement {
        assert!(!coeffs.is_empty());
        AlgebraElement { coeffs }
    }

    pub fn zero(field: &Field, n: usize) -> AlgebraElement {
        AlgebraElement::new(vec![Adele::zero(field); n])
    }

    pub fn one(field: &Field, n: usize) -> AlgebraElement {
        AlgebraElement::scalar(Adele::one(field), n)
    }

    /// The image of an adele under the structure map.
    pub fn scalar(a: Adele, n: usize) -> AlgebraElement {
        let field = a.field().clone();
        let mut coeffs = vec![Adele::zero(&field); n];
        coeffs[0] = a;
        AlgebraElement::new(coeffs)
    }

    /// The class of `T` (requires `n >= 2`; for `n = 1` the class of `T`
    /// is the scalar `-c_0`, which depends on `p`).
    pub fn t_class(field: &Field, n: usize) -> AlgebraElement {
        assert!(n >= 2, "for n = 1 the class of T is determined by p");
        let mut coeffs = vec![Adele::zero(field); n];
        coeffs[1] = Adele::one(field);
        AlgebraElement::new(coeffs)
    }

    pub fn coeffs(&self) -> &[Adele] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> &Adele {
        &self.coeffs[i]
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn field(&self) -> &Field {
        self.coeffs[0].field()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn override_places(&self) -> BTreeSet<Place> {
        let mut out = BTreeSet::new();
        for c in &self.coeffs {
            out.extend(c.overrides().keys().cloned());
        }
        out
    }

    pub fn add(&self, other: &AlgebraElement) -> AlgebraElement {
        assert_eq!(self.dim(), other.dim());
        AlgebraElement::new(
            self.coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a.add(b))
                .collect(),
        )
    }

    pub fn sub(&self, other: &AlgebraElement) -> AlgebraElement {
        assert_eq!(self.dim(), other.dim());
        AlgebraElement::new(
            self.coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a.sub(b))
                .collect(),
        )
    }

    pub fn neg(&self) -> AlgebraElement {
        AlgebraElement::new(self.coeffs.iter().map(|c| c.neg()).collect())
    }

    pub fn scale(&self, a: &Adele) -> AlgebraElement {
        AlgebraElement::new(self.coeffs.iter().map(|c| c.mul(a)).collect())
    }

    /// Product in the algebra: polynomial product reduced modulo `p` by
    /// monic division with remainder.
    pub fn mul(&self, other: &AlgebraElement, p: &AdelicPoly) -> AlgebraElement {
        assert_eq!(self.dim(), p.degree());
        assert_eq!(other.dim(), p.degree());
        let prod = vec_mul(&self.coeffs, &other.coeffs);
        AlgebraElement::new(reduce_mod(prod, p))
    }

    /// `self^e` in the algebra.
    pub fn pow(&self, e: u32, p: &AdelicPoly) -> AlgebraElement {
        let mut acc = AlgebraElement::one(self.field(), p.degree());
        for _ in 0..e {
            acc = acc.mul(self, p);
        }
        acc
    }

    /// The norm: determinant of multiplication by `self` on the free
    /// module. One adele; computed componentwise (generic determinant over
    /// the function field, local determinants at override places), which
    /// agrees globally because determinants commute with projections.
    pub fn norm(&self, p: &AdelicPoly) -> Result<Adele> {
        let n = p.degree();
        let field = self.field().clone();
        // columns: self * T^j mod p
        let mut cols: Vec<AlgebraElement> = Vec::with_capacity(n);
        let mut cur = self.clone();
        cols.push(cur.clone());
        for _ in 1..n {
            cur = shift_mul_t(&cur, p);
            cols.push(cur.clone());
        }
        // generic determinant
        let gen_mat: Vec<Vec<RatFn>> = (0..n)
            .map(|i| (0..n).map(|j| cols[j].coeffs[i].generic().clone()).collect())
            .collect();
        let generic = det(gen_mat)?;
        // local determinants at every override place in sight
        let mut places = self.override_places();
        places.extend(p.override_places());
        let mut overrides = std::collections::BTreeMap::new();
        for x in places {
            let mat: Vec<Vec<RatFn>> = (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| cols[j].coeffs[i].component(&x).clone())
                        .collect()
                })
                .collect();
            overrides.insert(x, det(mat)?);
        }
        let _ = field;
        Ok(Adele::new(generic, overrides))
    }

    /// Is the element invertible? Exactly when its norm is an idele.
    pub fn is_unit(&self, p: &AdelicPoly) -> Result<bool> {
        Ok(self.norm(p)?.is_idele())
    }

    /// The images of the element in the factors of a local decomposition:
    /// evaluate the representative at each factor's root, with coefficient
    /// germs rewritten in the factor's uniformizer (`t = s^e`).
    pub fn localize(&self, decomp: &LocalDecomposition) -> Vec<TruncSeries> {
        let x = &decomp.place;
        decomp
            .factors
            .iter()
            .map(|f| {
                let prec_s = f.root.prec().max(1);
                let mut acc: Option<TruncSeries> = None;
                for c in self.coeffs.iter().rev() {
                    let germ = c.local_component(x);
                    let cs = crate::laurent::expand(&germ, prec_s.div_euclid(f.e) + 2)
                        .substitute_power('s', f.e);
                    acc = Some(match acc {
                        None => cs,
                        Some(a) => a.mul(&f.root).add(&cs),
                    });
                }
                acc.expect("nonempty coefficient vector")
            })
            .collect()
    }

    /// Integrality over the subring of everywhere-integral adeles: every
    /// local component of the element must be integral. Checkable at the
    /// finitely many places where either `p` is bad or the element's
    /// coefficients have poles or overrides; everywhere else the splitting
    /// isomorphism makes integrality automatic.
    pub fn is_integral(&self, p: &AdelicPoly, prec: i64) -> Result<bool> {
        let mut candidates = p.bad_set()?;
        candidates.extend(self.override_places());
        candidates.insert(Place::Infinity);
        for c in &self.coeffs {
            let g = c.generic();
            if !g.is_zero() {
                for pole in g.denominator().split_roots_full()? {
                    candidates.insert(Place::Finite(pole));
                }
            }
        }
        for x in candidates {
            let decomp = p.decompose_at(&x, prec)?;
            for a in self.localize(&decomp) {
                // zero to precision means valuation at least the precision,
                // hence integral
                if let Some(v) = a.valuation() {
                    if v < 0 {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }
}

/// Full polynomial product of coefficient vectors (no reduction).
pub(crate) fn vec_mul(a: &[Adele], b: &[Adele]) -> Vec<Adele> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let field = a[0].field().clone();
    let mut out = vec![Adele::zero(&field); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].add(&x.mul(y));
        }
    }
    out
}

pub(crate) fn vec_add(a: &[Adele], b: &[Adele]) -> Vec<Adele> {
    let field = a
        .first()
        .or(b.first())
        .map(|c| c.field().clone())
        .expect("nonempty");
    let mut out = vec![Adele::zero(&field); a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] = out[i].add(x);
    }
    for (i, x) in b.iter().enumerate() {
        out[i] = out[i].add(x);
    }
    out
}

/// Reduce a coefficient vector modulo the monic `p` (division with
/// remainder in the adele coefficient ring; exact because `p` is monic).
fn reduce_mod(mut v: Vec<Adele>, p: &AdelicPoly) -> Vec<Adele> {
    let n = p.degree();
    let field = p.field().clone();
    while v.len() > n {
        let lead = v.pop().unwrap();
        if lead.is_zero() {
            continue;
        }
        let shift = v.len() - n;
        for (j, pc) in p.coeffs().iter().enumerate() {
            v[shift + j] = v[shift + j].sub(&lead.mul(pc));
        }
    }
    v.resize(n, Adele::zero(&field));
    v
}

/// Multiply an element by the class of `T` (shift and reduce).
fn shift_mul_t(a: &AlgebraElement, p: &AdelicPoly) -> AlgebraElement {
    let field = a.field().clone();
    let mut v = vec![Adele::zero(&field)];
    v.extend(a.coeffs().iter().cloned());
    AlgebraElement::new(reduce_mod(v, p))
}

/// Determinant by fraction-full Gaussian elimination over a coefficient
/// field.
fn det(mut m: Vec<Vec<RatFn>>) -> Result<RatFn> {
    let n = m.len();
    if n == 0 {
        return Err(Error::ZeroInput);
    }
    let one = m[0][0].one_like();
    let mut acc = one.clone();
    for col in 0..n {
        let pivot_row = (col..n).find(|r| !m[*r][col].is_zero());
        let pr = match pivot_row {
            None => return Ok(one.zero_like()),
            Some(r) => r,
        };
        if pr != col {
            m.swap(pr, col);
            acc = acc.neg();
        }
        let pivot = m[col][col].clone();
        acc = acc.mul(&pivot);
        let inv = pivot.inv()?;
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = m[r][col].mul(&inv);
            for c in col..n {
                let sub = factor.mul(&m[col][c]);
                m[r][c] = m[r][c].sub(&sub);
            }
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::Jet;

    fn f5() -> Field {
        Field::prime(5).unwrap()
    }

    fn u_adele(field: &Field) -> Adele {
        Adele::from_ratfn(RatFn::variable(field, 'u'))
    }

    /// p = T^2 - u with plain coefficients.
    fn t2_minus_u(field: &Field) -> AdelicPoly {
        AdelicPoly::new(vec![u_adele(field).neg(), Adele::zero(field)])
    }

    fn at(field: &Field, a: i64) -> Place {
        Place::Finite(field.from_int(a))
    }

    #[test]
    fn projections_of_t2_minus_u() {
        let k = f5();
        let p = t2_minus_u(&k);
        // at 0: T^2 - t
        let p0 = p.project_at(&at(&k, 0));
        assert_eq!(format!("{}", p0.coeff(0)), "-1*t".replace("-1*", "4*"));
        // at 1: T^2 - (1+t)
        let p1 = p.project_at(&at(&k, 1));
        assert_eq!(local::residue(&p1.coeff(0)), k.from_int(-1));
        assert_eq!(local::t_valuation(&p1.coeff(0).add(&RatFn::from_poly(
            Poly::new('t', vec![k.one(), k.one()])
        ))), None); // c_0 = -(1+t) exactly
        // at infinity: T^2 - 1/t
        let pi = p.project_at(&Place::Infinity);
        assert_eq!(local::t_valuation(&pi.coeff(0)), Some(-1));
    }

    #[test]
    fn classification_of_t2_minus_u() {
        let k = f5();
        let p = t2_minus_u(&k);
        // disc = 4u: valuation 1 at @0, 0 at @1, pole at @inf where the
        // coefficient itself is already non-integral
        assert_eq!(p.classify_place(&at(&k, 0)), PlaceClass::IntegralNonSeparable);
        assert_eq!(p.classify_place(&at(&k, 1)), PlaceClass::IntegralSeparable);
        assert_eq!(p.classify_place(&Place::Infinity), PlaceClass::NonIntegral);
    }

    #[test]
    fn bad_sets() {
        let k = f5();
        let p = t2_minus_u(&k);
        let bad: Vec<Place> = p.bad_set().unwrap().into_iter().collect();
        assert_eq!(bad, vec![at(&k, 0), Place::Infinity]);

        // T - u: degree 1, disc 1; only the coefficient pole at infinity
        let lin = AdelicPoly::new(vec![u_adele(&k).neg()]);
        let bad: Vec<Place> = lin.bad_set().unwrap().into_iter().collect();
        assert_eq!(bad, vec![Place::Infinity]);

        // T^2 - 1: nothing bad
        let c = AdelicPoly::new(vec![
            Adele::from_ratfn(RatFn::constant(&k, 'u', k.from_int(-1))),
            Adele::zero(&k),
        ]);
        assert!(c.bad_set().unwrap().is_empty());
    }

    #[test]
    fn separability_with_certificate() {
        let k = f5();
        let p = t2_minus_u(&k);
        match p.is_separable().unwrap() {
            Separability::Separable { cert_a, cert_b } => {
                // identity already verified inside; sanity-check shapes
                assert_eq!(cert_a.dim(), 2);
                assert_eq!(cert_b.dim(), 2);
                // the classical certificate: -1/u * p + T/(2u) * p' = 1
                let inv_u = RatFn::variable(&k, 'u').inv().unwrap();
                assert_eq!(cert_a.coeff(0).generic(), &inv_u.neg());
            }
            Separability::Inseparable { .. } => panic!("T^2 - u is separable"),
        }
    }

    #[test]
    fn degree_one_certificate() {
        let k = f5();
        let lin = AdelicPoly::new(vec![u_adele(&k).neg()]);
        match lin.is_separable().unwrap() {
            Separability::Separable { cert_a, cert_b } => {
                assert!(cert_a.is_zero());
                assert_eq!(cert_b.coeff(0), &Adele::one(&k));
            }
            _ => panic!("linear polynomials are separable"),
        }
    }

    #[test]
    fn kummer_separability_iff_idele() {
        let k = f5();
        // T^2 - t with t an idele: separable
        let t_idele = u_adele(&k).with_jet_override(at(&k, 2), &Jet::constant('t', k.one()));
        assert!(t_idele.is_idele());
        let p = AdelicPoly::new(vec![t_idele.neg(), Adele::zero(&k)]);
        assert!(p.is_separable().unwrap().is_separable());

        // zero override kills separability exactly at that place
        let broken = u_adele(&k).with_override(at(&k, 3), RatFn::zero(&k, 'u'));
        let q = AdelicPoly::new(vec![broken.neg(), Adele::zero(&k)]);
        match q.is_separable().unwrap() {
            Separability::Inseparable { witness } => assert_eq!(witness, at(&k, 3)),
            _ => panic!("zero override must break separability"),
        }
    }

    #[test]
    fn decomposition_shapes_for_t2_minus_u() {
        let k = f5();
        let p = t2_minus_u(&k);
        // @1: two unramified factors with Hensel roots 1+3t..., 4+2t...
        let d1 = p.decompose_at(&at(&k, 1), 8).unwrap();
        assert_eq!(d1.factor_count(), 2);
        assert!(d1.factors.iter().all(|f| f.e == 1));
        assert_eq!(d1.factors[0].leading_residue(), k.from_int(1));
        assert_eq!(d1.factors[1].leading_residue(), k.from_int(4));
        assert_eq!(d1.factors[0].root.coeff_at(1).unwrap(), k.from_int(3));

        // @0: one factor e=2, root s
        let d0 = p.decompose_at(&at(&k, 0), 8).unwrap();
        assert_eq!(d0.factor_count(), 1);
        assert_eq!(d0.factors[0].e, 2);
        assert_eq!(d0.factors[0].root.valuation(), Some(1));

        // @inf: one factor e=2, root s^-1
        let di = p.decompose_at(&Place::Infinity, 8).unwrap();
        assert_eq!(di.factor_count(), 1);
        assert_eq!(di.factors[0].e, 2);
        assert_eq!(di.factors[0].root.valuation(), Some(-1));
    }

    #[test]
    fn algebra_multiplication_reduces() {
        let k = f5();
        let p = t2_minus_u(&k);
        let t = AlgebraElement::t_class(&k, 2);
        let t2 = t.mul(&t, &p);
        // T * T = u in the algebra
        assert_eq!(t2.coeff(0), &u_adele(&k));
        assert!(t2.coeff(1).is_zero());
    }

    #[test]
    fn norm_and_units() {
        let k = f5();
        let p = t2_minus_u(&k);
        let t = AlgebraElement::t_class(&k, 2);
        // norm(T) = -u up to sign: an idele, so T is a unit
        let nt = t.norm(&p).unwrap();
        assert!(nt.is_idele());
        assert_eq!(nt.generic(), &RatFn::variable(&k, 'u').neg());
        assert!(t.is_unit(&p).unwrap());

        // an override zeroing exactly one local slot kills unit-ness.
        // Use q = T^2 - 1, whose local roots are the constants 1 and 4:
        // a = T - c with c = (generic 2, override @1 -> 1) has slot values
        // (1-1, 4-1) = (0, 3) at @1 and (-1, 2) elsewhere, so its norm is
        // an adele with a zero override jet at @1.
        let q = AdelicPoly::new(vec![
            Adele::from_ratfn(RatFn::constant(&k, 'u', k.from_int(-1))),
            Adele::zero(&k),
        ]);
        let c = Adele::from_ratfn(RatFn::constant(&k, 'u', k.from_int(2)))
            .with_override(at(&k, 1), RatFn::constant(&k, 'u', k.one()));
        let a = t.sub(&AlgebraElement::scalar(c, 2));
        let norm = a.norm(&q).unwrap();
        assert!(!norm.generic().is_zero());
        assert!(norm.overrides().get(&at(&k, 1)).unwrap().is_zero());
        assert!(!a.is_unit(&q).unwrap());
        // the localized slot value vanishes exactly
        let d1 = q.decompose_at(&at(&k, 1), 8).unwrap();
        let vals = a.localize(&d1);
        assert!(vals[0].is_zero_to_prec());
        assert_eq!(vals[1].valuation(), Some(0));
    }

    #[test]
    fn localization_examples() {
        let k = f5();
        let p = t2_minus_u(&k);
        let d0 = p.decompose_at(&at(&k, 0), 8).unwrap();

        // T localizes to the root itself: s
        let t = AlgebraElement::t_class(&k, 2);
        let loc = t.localize(&d0);
        assert_eq!(loc[0].valuation(), Some(1));
        assert_eq!(loc[0].coeff_at(1).unwrap(), k.one());

        // u * 1 localizes to s^2
        let ue = AlgebraElement::scalar(u_adele(&k), 2);
        let loc = ue.localize(&d0);
        assert_eq!(loc[0].valuation(), Some(2));

        // 1 localizes to 1 in every factor
        let one = AlgebraElement::one(&k, 2);
        for v in one.localize(&d0) {
            assert_eq!(v.valuation(), Some(0));
        }
    }

    #[test]
    fn integrality_checks() {
        let k = f5();
        let p = t2_minus_u(&k);
        let t = AlgebraElement::t_class(&k, 2);
        // v_{inf,1}(T) = -1: not integral
        assert!(!t.is_integral(&p, 8).unwrap());
        assert!(AlgebraElement::one(&k, 2).is_integral(&p, 8).unwrap());

        // u*T has v_{inf} = -3; overriding the coefficient at infinity by
        // something deep enough repairs it
        let ut = t.scale(&u_adele(&k));
        assert!(!ut.is_integral(&p, 8).unwrap());
        let deep = Jet::monomial('t', k.one(), 2);
        let fixed_coeff = u_adele(&k).with_jet_override(Place::Infinity, &deep);
        let fixed = AlgebraElement::new(vec![Adele::zero(&k), fixed_coeff]);
        assert!(fixed.is_integral(&p, 8).unwrap());
    }
}
