//! Covers of the projective line, embeddings of their function fields
//! into adelic algebras, fiber routing, and the discreteness verdict.
//!
//! A cover is a monic separable irreducible polynomial over the function
//! field. Its fibers over a place are the local factors of the projected
//! polynomial — the places of the covering curve over that point. An
//! embedding of the cover's function field into `A_X[T]/(p)` is stored as
//! an exact algebra element (the image of the cover generator) plus a
//! finite routing table twisting finitely many split places; slot values
//! at twisted places are produced from the routed fiber expansions at
//! working precision, since such components are genuinely irrational.
//!
//! Discreteness is decided by the finite routing check: the embedding is
//! discrete iff at every place each fiber is hit by some slot. A missed
//! fiber yields an explicit nonconstant function, regular away from the
//! missed place, whose content through the embedding is positive — the
//! failure of the additive product formula, witnessed.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::adele::Adele;
use crate::algebra::{AdelicPoly, AlgebraElement, LocalDecomposition};
use crate::content::{content_index, ContentEntry, ContentReport, Cutoffs};
use crate::error::{Error, Result};
use crate::field::{Field, FieldElem};
use crate::laurent::{expand, Jet, TruncSeries};
use crate::local;
use crate::place::Place;
use crate::poly::Poly;
use crate::ratfn::RatFn;

/// A cover of the line: a monic separable irreducible polynomial `P(U)`
/// over the function field, of degree `d`.
#[derive(Clone)]
pub struct Cover {
    poly: Poly<RatFn>,
}

impl Cover {
    /// Validate and build. Separability is the gcd test; irreducibility is
    /// certified by the absence of roots in the function field (complete
    /// for degree up to 3) or by a totally ramified fiber (a Newton
    /// polygon segment of denominator `d` at some probe place).
    pub fn new(poly: Poly<RatFn>) -> Result<Cover> {
        if !poly.is_monic() || poly.degree().unwrap_or(0) < 1 {
            return Err(Error::Unsupported {
                detail: "cover polynomial must be monic of degree >= 1".into(),
            });
        }
        let d = poly.degree().unwrap();
        if d > 1 {
            let dp = poly.derivative();
            if dp.is_zero() || poly.gcd(&dp)?.degree() != Some(0) {
                return Err(Error::Unsupported {
                    detail: "cover polynomial is not separable".into(),
                });
            }
            let cover = Cover { poly };
            cover.certify_irreducible()?;
            return Ok(cover);
        }
        Ok(Cover { poly })
    }

    pub fn degree(&self) -> usize {
        self.poly.degree().unwrap()
    }

    pub fn poly(&self) -> &Poly<RatFn> {
        &self.poly
    }

    pub fn field(&self) -> Field {
        self.poly.coeffs()[0].field().clone()
    }

    fn certify_irreducible(&self) -> Result<()> {
        let d = self.degree();
        let field = self.field();
        if d <= 3 {
            if field.order().is_some() {
                if let Some(root) = self.sigma_root()? {
                    return Err(Error::Unsupported {
                        detail: format!("cover polynomial has the root {root}, so it is reducible"),
                    });
                }
                return Ok(());
            }
        }
        // totally ramified fiber certificate: a polygon segment with
        // denominator d at some probe place forces irreducibility
        for x in self.probe_places() {
            let germ = self.project_at(&x);
            let polygon = local::newton_polygon(&germ);
            if polygon.segments.len() == 1 && polygon.segments[0].e == d as i64 {
                return Ok(());
            }
        }
        Err(Error::Unsupported {
            detail: "cannot certify irreducibility of the cover polynomial".into(),
        })
    }

    fn probe_places(&self) -> Vec<Place> {
        let field = self.field();
        let mut out = Vec::new();
        match field.order() {
            Some(q) => {
                for i in 0..q.min(64) {
                    out.push(Place::Finite(field.elem_by_index(i).unwrap()));
                }
            }
            None => {
                for i in -4..=4 {
                    out.push(Place::Finite(field.from_int(i)));
                }
            }
        }
        out.push(Place::Infinity);
        out
    }

    /// A root of the cover polynomial in the function field, if any
    /// (rational-root test after clearing denominators; finite fields).
    fn sigma_root(&self) -> Result<Option<RatFn>> {
        let field = self.field();
        let d = self.degree();
        // clear denominators: multiply by the lcm of coefficient denominators
        let mut lcm = Poly::constant('u', field.one());
        for c in self.poly.coeffs() {
            let den = c.denominator();
            let g = lcm.gcd(den)?;
            let (q, _) = den.divrem(&g)?;
            lcm = lcm.mul(&q);
        }
        let cleared: Vec<Poly<FieldElem>> = self
            .poly
            .coeffs()
            .iter()
            .map(|c| {
                let f = c.mul(&RatFn::from_poly(lcm.clone()));
                debug_assert_eq!(f.denominator().degree(), Some(0));
                f.numerator().clone()
            })
            .collect();
        let b0 = &cleared[0];
        let bd = &cleared[d];
        if b0.is_zero() {
            return Ok(Some(RatFn::zero(&field, 'u')));
        }
        let nums = monic_divisors(b0)?;
        let dens = monic_divisors(bd)?;
        let units: Vec<FieldElem> = field.elems().skip(1).collect();
        for n in &nums {
            for dd in &dens {
                for c in &units {
                    let cand = RatFn::new(n.scale(c), dd.clone())?;
                    if self.poly.eval(&cand).is_zero() {
                        return Ok(Some(cand));
                    }
                }
            }
        }
        Ok(None)
    }

    /// The germ of the cover polynomial at a place, monic over `k((t))`.
    pub fn project_at(&self, x: &Place) -> Poly<RatFn> {
        self.poly.map('T', |c| c.germ_at(x))
    }

    /// The fiber places over `x`: local factors of the projected
    /// polynomial, computed through the same decomposition path as the
    /// adelic algebra so labels and roots match the canonical target.
    pub fn fibers(&self, x: &Place, prec: i64) -> Result<Vec<FiberPlace>> {
        let p = AdelicPoly::from_sigma(&self.poly.map('T', |c| c.clone()));
        let decomp = p.decompose_at(x, prec)?;
        Ok(decomp
            .factors
            .into_iter()
            .map(|f| FiberPlace {
                base: x.clone(),
                label: f.label,
                e: f.e,
                root: f.root,
            })
            .collect())
    }

    /// Branch and bad places of the cover: support of the discriminant
    /// divisor, coefficient poles, and infinity.
    pub fn bad_places(&self) -> Result<BTreeSet<Place>> {
        let p = AdelicPoly::from_sigma(&self.poly.map('T', |c| c.clone()));
        p.bad_set()
    }
}

impl fmt::Display for Cover {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.poly.map('U', |c| c.clone()))
    }
}

fn monic_divisors(p: &Poly<FieldElem>) -> Result<Vec<Poly<FieldElem>>> {
    let field = p.coeffs()[0].field().clone();
    let one = Poly::constant('u', field.one());
    if p.degree() == Some(0) {
        return Ok(vec![one]);
    }
    let factors = factor_monic(p)?;
    let mut divisors = vec![one];
    for (f, mult) in factors {
        let mut next = Vec::new();
        for d in &divisors {
            let mut acc = d.clone();
            next.push(acc.clone());
            for _ in 0..mult {
                acc = acc.mul(&f);
                next.push(acc.clone());
            }
        }
        divisors = next;
    }
    Ok(divisors)
}

/// Complete factorization of a polynomial over a finite field into monic
/// irreducibles, by trial division in increasing degree.
fn factor_monic(p: &Poly<FieldElem>) -> Result<Vec<(Poly<FieldElem>, usize)>> {
    let field = p.coeffs()[0].field().clone();
    let q = field.order().ok_or_else(|| Error::Unsupported {
        detail: "polynomial factorization needs a finite base field".into(),
    })?;
    let mut rest = {
        let inv = p.lead().unwrap().inv()?;
        p.scale(&inv)
    };
    let mut out: Vec<(Poly<FieldElem>, usize)> = Vec::new();
    let mut deg = 1usize;
    while rest.degree().unwrap_or(0) > 0 {
        if deg > rest.degree().unwrap() / 2 {
            out.push((rest.clone(), 1));
            break;
        }
        let count = q.pow(deg as u32);
        for mut idx in 0..count {
            let mut coeffs = Vec::with_capacity(deg + 1);
            for _ in 0..deg {
                coeffs.push(field.elem_by_index(idx % q).unwrap());
                idx /= q;
            }
            coeffs.push(field.one());
            let cand = Poly::new(p.var(), coeffs);
            let mut mult = 0;
            loop {
                let (qq, r) = rest.divrem(&cand)?;
                if !r.is_zero() {
                    break;
                }
                rest = qq;
                mult += 1;
            }
            if mult > 0 {
                out.push((cand, mult));
            }
            if rest.degree().unwrap_or(0) == 0 {
                break;
            }
        }
        deg += 1;
    }
    Ok(out)
}

/// An element of the cover's function field, as the coefficient vector of
/// its representative of degree `< d` in the cover generator.
#[derive(Clone, PartialEq)]
pub struct CoverElement {
    coeffs: Vec<RatFn>,
}

impl CoverElement {
    pub fn new(coeffs: Vec<RatFn>) -> CoverElement {
        assert!(!coeffs.is_empty());
        CoverElement { coeffs }
    }

    pub fn zero(field: &Field, d: usize) -> CoverElement {
        CoverElement::new(vec![RatFn::zero(field, 'u'); d])
    }

    pub fn scalar(f: RatFn, d: usize) -> CoverElement {
        let field = f.field().clone();
        let mut coeffs = vec![RatFn::zero(&field, 'u'); d];
        coeffs[0] = f;
        CoverElement::new(coeffs)
    }

    /// The cover generator itself (degree >= 2).
    pub fn generator(field: &Field, d: usize) -> CoverElement {
        assert!(d >= 2);
        let mut coeffs = vec![RatFn::zero(field, 'u'); d];
        coeffs[1] = RatFn::constant(field, 'u', field.one());
        CoverElement::new(coeffs)
    }

    /// Reduce a polynomial in the generator modulo the cover polynomial.
    pub fn from_poly(p: &Poly<RatFn>, cover: &Cover) -> Result<CoverElement> {
        let d = cover.degree();
        let field = cover.field();
        let reduced = p.rem(cover.poly())?;
        let coeffs = (0..d)
            .map(|i| {
                if reduced.degree().map(|dd| i <= dd).unwrap_or(false) {
                    reduced.coeff(i)
                } else {
                    RatFn::zero(&field, 'u')
                }
            })
            .collect();
        Ok(CoverElement::new(coeffs))
    }

    pub fn coeffs(&self) -> &[RatFn] {
        &self.coeffs
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn field(&self) -> &Field {
        self.coeffs[0].field()
    }

    pub fn add(&self, other: &CoverElement) -> CoverElement {
        CoverElement::new(
            self.coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a.add(b))
                .collect(),
        )
    }

    pub fn mul(&self, other: &CoverElement, cover: &Cover) -> Result<CoverElement> {
        let a = Poly::new('U', self.coeffs.clone());
        let b = Poly::new('U', other.coeffs.clone());
        CoverElement::from_poly(&a.mul(&b).map('U', |c| c.clone()), cover)
    }

    /// The norm down to the function field: the resultant of the cover
    /// polynomial with the representative (as the product of the values at
    /// all roots).
    pub fn norm(&self, cover: &Cover) -> Result<RatFn> {
        let rep = Poly::new('U', self.coeffs.clone());
        if rep.is_zero() {
            return Ok(RatFn::zero(self.field(), 'u'));
        }
        cover.poly().resultant(&rep)
    }

    /// The expansion of the element at a fiber place: coefficients become
    /// germs in `t = s^e` and the generator becomes the fiber root.
    pub fn expand_at(&self, y: &FiberPlace, _prec: i64) -> TruncSeries {
        let prec_s = y.root.prec().max(1);
        let mut acc: Option<TruncSeries> = None;
        for c in self.coeffs.iter().rev() {
            let germ = c.germ_at(&y.base);
            let cs = expand(&germ, prec_s.div_euclid(y.e) + 2).substitute_power('s', y.e);
            acc = Some(match acc {
                None => cs,
                Some(a) => a.mul(&y.root).add(&cs),
            });
        }
        acc.expect("nonempty coefficients")
    }
}

impl fmt::Display for CoverElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = Poly::new('w', self.coeffs.clone());
        write!(f, "{p}")
    }
}

/// A place of the covering curve over a known base place: the local factor
/// of the cover polynomial it corresponds to.
#[derive(Clone)]
pub struct FiberPlace {
    pub base: Place,
    /// Canonical fiber label at the base place (1-based).
    pub label: usize,
    /// Ramification index over the base.
    pub e: i64,
    /// Expansion of the cover generator at this place.
    pub root: TruncSeries,
}

impl fmt::Display for FiberPlace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(x={}, j={}, e={}, w={})",
            self.base,
            self.label,
            self.e,
            self.root.jet().truncated(self.root.valuation().unwrap_or(0) + 3)
        )
    }
}

impl FiberPlace {
    pub fn same_place(&self, other: &FiberPlace) -> bool {
        self.base == other.base && self.label == other.label
    }
}

/// An embedding of the cover's function field into an adelic algebra:
/// the exact image of the generator plus finitely many routed places.
#[derive(Clone)]
pub struct Embedding {
    cover: Cover,
    target: AdelicPoly,
    base_image: AlgebraElement,
    /// Explicit routing: place -> (slot j, 0-based) -> fiber index.
    routing: BTreeMap<Place, Vec<usize>>,
}

impl Embedding {
    /// The canonical embedding of a cover into its own adelic algebra:
    /// the target is the cover polynomial read with adele coefficients and
    /// the generator maps to the class of `T`.
    pub fn canonical(cover: Cover) -> Result<Embedding> {
        let d = cover.degree();
        let field = cover.field();
        let target = AdelicPoly::from_sigma(&cover.poly().map('T', |c| c.clone()));
        let base_image = if d == 1 {
            // the class of T in A[T]/(T - c) is the scalar c
            AlgebraElement::scalar(Adele::from_ratfn(cover.poly().coeff(0).neg()), 1)
        } else {
            AlgebraElement::t_class(&field, d)
        };
        Embedding::with_parts(cover, target, base_image)
    }

    /// An embedding with an explicitly chosen target and generator image.
    /// Verifies `P(image) = 0` exactly in the algebra.
    pub fn with_parts(
        cover: Cover,
        target: AdelicPoly,
        base_image: AlgebraElement,
    ) -> Result<Embedding> {
        assert_eq!(base_image.dim(), target.degree());
        let emb = Embedding {
            cover,
            target,
            base_image,
            routing: BTreeMap::new(),
        };
        emb.verify_root()?;
        Ok(emb)
    }

    fn verify_root(&self) -> Result<()> {
        let field = self.cover.field();
        let n = self.target.degree();
        let d = self.cover.degree();
        let mut acc = AlgebraElement::zero(&field, n);
        let mut power = AlgebraElement::one(&field, n);
        for i in 0..=d {
            let coeff = if i == d {
                Adele::one(&field)
            } else {
                Adele::from_ratfn(self.cover.poly().coeff(i))
            };
            acc = acc.add(&power.scale(&coeff));
            if i < d {
                power = power.mul(&self.base_image, &self.target);
            }
        }
        if !acc.is_zero() {
            return Err(Error::Unsupported {
                detail: "the generator image is not a root of the cover polynomial".into(),
            });
        }
        Ok(())
    }

    /// Twist the routing at one place: `routes[j]` is the fiber index
    /// (0-based) receiving slot `j`. Only split places (all slots and all
    /// fibers unramified) can be routed explicitly.
    pub fn with_routing(mut self, x: Place, routes: Vec<usize>, prec: i64) -> Result<Embedding> {
        let decomp = self.target.decompose_at(&x, prec)?;
        if decomp.factors.iter().any(|f| f.e != 1) {
            return Err(Error::Unsupported {
                detail: format!("routing overrides need a split place; {x} is ramified"),
            });
        }
        let fibers = self.cover.fibers(&x, prec)?;
        if fibers.iter().any(|f| f.e != 1) {
            return Err(Error::Unsupported {
                detail: format!("routing overrides need unramified fibers at {x}"),
            });
        }
        if routes.len() != decomp.factors.len() {
            return Err(Error::Unsupported {
                detail: format!(
                    "routing table at {x} must assign all {} slots",
                    decomp.factors.len()
                ),
            });
        }
        if routes.iter().any(|r| *r >= fibers.len()) {
            return Err(Error::Unsupported {
                detail: format!("fiber index out of range at {x}"),
            });
        }
        self.routing.insert(x, routes);
        Ok(self)
    }

    pub fn cover(&self) -> &Cover {
        &self.cover
    }

    pub fn target(&self) -> &AdelicPoly {
        &self.target
    }

    pub fn base_image(&self) -> &AlgebraElement {
        &self.base_image
    }

    pub fn routing(&self) -> &BTreeMap<Place, Vec<usize>> {
        &self.routing
    }

    /// The value the cover generator takes in each slot of the local
    /// decomposition at `x` (routed places read the routed fiber root).
    pub fn slot_values(
        &self,
        x: &Place,
        decomp: &LocalDecomposition,
        prec: i64,
    ) -> Result<Vec<TruncSeries>> {
        if let Some(routes) = self.routing.get(x) {
            let fibers = self.cover.fibers(x, prec)?;
            return Ok(routes
                .iter()
                .map(|r| fibers[*r].root.clone())
                .collect());
        }
        Ok(self.base_image.localize(decomp))
    }

    /// The image of a function-field element in each slot at `x`.
    pub fn localize_function(
        &self,
        f: &CoverElement,
        x: &Place,
        decomp: &LocalDecomposition,
        prec: i64,
    ) -> Result<Vec<TruncSeries>> {
        let values = self.slot_values(x, decomp, prec)?;
        let out = decomp
            .factors
            .iter()
            .zip(values)
            .map(|(fac, u_val)| {
                let prec_s = fac.root.prec().max(u_val.prec()).max(1);
                let mut acc: Option<TruncSeries> = None;
                for c in f.coeffs().iter().rev() {
                    let germ = c.germ_at(x);
                    let cs = expand(&germ, prec_s.div_euclid(fac.e) + 2)
                        .substitute_power('s', fac.e);
                    acc = Some(match acc {
                        None => cs,
                        Some(a) => a.mul(&u_val).add(&cs),
                    });
                }
                acc.expect("nonempty coefficients")
            })
            .collect();
        Ok(out)
    }

    /// The routing map at a place, recomputed honestly: each slot is
    /// matched to the unique fiber whose expansion of the generator agrees
    /// with the slot value (after reparametrizing the fiber uniformizer
    /// when its ramification divides the slot's). Never guesses: an
    /// ambiguous or empty match is an error.
    pub fn compute_routing(&self, x: &Place, prec: i64) -> Result<Vec<usize>> {
        // matching must see past the discriminant depth to separate roots
        let pd = self.target.project_at(x).discriminant()?;
        let cd = self.cover.project_at(x).discriminant()?;
        let depth = local::t_valuation(&pd)
            .unwrap_or(0)
            .max(local::t_valuation(&cd).unwrap_or(0));
        let work_prec = prec.max(depth + 4);

        let decomp = self.target.decompose_at(x, work_prec)?;
        let fibers = self.cover.fibers(x, work_prec)?;
        let values = self.slot_values(x, &decomp, work_prec)?;
        let field = self.cover.field();
        let mut out = Vec::with_capacity(values.len());
        for (j, (slot, value)) in decomp.factors.iter().zip(&values).enumerate() {
            let mut matches: Vec<usize> = Vec::new();
            for (fi, fib) in fibers.iter().enumerate() {
                if slot.e % fib.e != 0 {
                    continue;
                }
                let m = slot.e / fib.e;
                // candidate reparametrizations r -> zeta * s^m
                for zeta in field.elems() {
                    if zeta.is_zero() || !zeta.pow(fib.e as u32).is_one() {
                        continue;
                    }
                    let reparam = reparametrize(&fib.root, m, &zeta);
                    if reparam.agrees(value) {
                        matches.push(fi);
                        break;
                    }
                }
            }
            matches.dedup();
            if matches.len() != 1 {
                return Err(Error::RoutingAmbiguous {
                    place: format!("{x}"),
                    slot: j + 1,
                });
            }
            out.push(matches[0]);
        }
        Ok(out)
    }

    /// The finite set of places where routing must be checked explicitly:
    /// bad places of the target, branch places of the cover, poles and
    /// overrides of the image coefficients, and the routed places.
    pub fn checked_places(&self) -> Result<BTreeSet<Place>> {
        let mut out = self.target.bad_set()?;
        out.extend(self.cover.bad_places()?);
        out.extend(self.routing.keys().cloned());
        out.extend(self.base_image.override_places());
        for c in self.base_image.coeffs() {
            let g = c.generic();
            if !g.is_zero() {
                for pole in g.denominator().split_roots_full()? {
                    out.insert(Place::Finite(pole));
                }
            }
        }
        out.insert(Place::Infinity);
        Ok(out)
    }

    /// Surjectivity of slot routing onto the fibers at every checked
    /// place. Returns the fiber places that no slot routes to.
    pub fn check_injectivity(&self, prec: i64) -> Result<Vec<FiberPlace>> {
        let mut missed = Vec::new();
        for x in self.checked_places()? {
            let routes = self.compute_routing(&x, prec)?;
            let fibers = self.cover.fibers(&x, prec)?;
            let hit: BTreeSet<usize> = routes.iter().copied().collect();
            for (fi, fib) in fibers.into_iter().enumerate() {
                if !hit.contains(&fi) {
                    missed.push(fib);
                }
            }
        }
        Ok(missed)
    }

    /// The content of a nonzero function-field element through the
    /// embedding, with per-slot breakdown. Away from the support window —
    /// bad and branch places, coefficient poles, routed places, and the
    /// divisor of the generic norm — every slot valuation vanishes, so the
    /// sum is exact.
    pub fn content_of_function(&self, f: &CoverElement, prec: i64) -> Result<ContentReport> {
        if f.is_zero() {
            return Err(Error::ZeroInput);
        }
        let image = self.image_of(f)?;
        let norm = image.norm(&self.target)?;
        if !norm.is_idele() {
            return Err(Error::Inconsistency {
                detail: "nonzero function with non-idele image norm".into(),
            });
        }

        let mut window = self.checked_places()?;
        for c in f.coeffs() {
            if !c.is_zero() {
                for pole in c.denominator().split_roots_full()? {
                    window.insert(Place::Finite(pole));
                }
            }
        }
        for x in norm.generic().divisor()?.places() {
            window.insert(x.clone());
        }

        let mut entries = Vec::new();
        let mut total = 0i64;
        for x in &window {
            let mut work_prec = prec;
            let (decomp, locs) = loop {
                let decomp = self.target.decompose_at(x, work_prec)?;
                let locs = self.localize_function(f, x, &decomp, work_prec)?;
                if locs.iter().all(|s| !s.is_zero_to_prec()) {
                    break (decomp, locs);
                }
                work_prec *= 2;
                if work_prec > prec * 16 {
                    return Err(Error::PrecisionExhausted {
                        detail: format!("function localization at {x} not visible"),
                    });
                }
            };
            for (fac, s) in decomp.factors.iter().zip(&locs) {
                let v = s.valuation().expect("visible");
                if v != 0 {
                    entries.push(ContentEntry {
                        place: x.clone(),
                        label: fac.label,
                        e: fac.e,
                        val: v,
                    });
                    total += v;
                }
            }
            // at unrouted places the slot sum must match the norm valuation
            if !self.routing.contains_key(x) {
                let norm_val = norm.component(x).valuation(x).expect("idele");
                let place_sum: i64 = decomp
                    .factors
                    .iter()
                    .zip(&locs)
                    .map(|(_, s)| s.valuation().unwrap())
                    .sum();
                if place_sum != norm_val {
                    return Err(Error::Inconsistency {
                        detail: format!(
                            "slot valuations at {x} sum to {place_sum}, norm gives {norm_val}"
                        ),
                    });
                }
            }
        }
        Ok(ContentReport { total, entries })
    }

    /// The exact algebra element `f(base_image)` (ignores routing; it is
    /// the image for canonical embeddings and the exact part otherwise).
    pub fn image_of(&self, f: &CoverElement) -> Result<AlgebraElement> {
        let field = self.cover.field();
        let n = self.target.degree();
        let mut acc = AlgebraElement::zero(&field, n);
        let mut power = AlgebraElement::one(&field, n);
        for (i, c) in f.coeffs().iter().enumerate() {
            acc = acc.add(&power.scale(&Adele::from_ratfn(c.clone())));
            if i + 1 < f.coeffs().len() {
                power = power.mul(&self.base_image, &self.target);
            }
        }
        Ok(acc)
    }

    /// Run the product formula over a test set: per-test contents, with
    /// overall pass iff all vanish.
    pub fn verify_product_formula(
        &self,
        tests: &[CoverElement],
        prec: i64,
    ) -> Result<Vec<(CoverElement, ContentReport)>> {
        let mut out = Vec::new();
        for f in tests {
            if f.is_zero() {
                return Err(Error::ZeroInput);
            }
            let report = self.content_of_function(f, prec)?;
            out.push((f.clone(), report));
        }
        Ok(out)
    }

    /// Search for a nonconstant function with a pole exactly at the missed
    /// fiber place and nonnegative valuation everywhere else, verified on
    /// the full divisor support, whose content through the embedding is
    /// positive. Candidates are `(A(u) w + B(u)) / C(u)` enumerated by
    /// increasing coefficient degree up to `bound`.
    pub fn find_witness(
        &self,
        missed: &FiberPlace,
        bound: u32,
        prec: i64,
    ) -> Result<CoverElement> {
        let field = self.cover.field();
        let d = self.cover.degree();
        if d < 2 {
            return Err(Error::Unsupported {
                detail: "a degree-1 cover has no room for a missed fiber".into(),
            });
        }
        for h in 0..=bound {
            let full = full_enumeration_feasible(&field, h);
            let polys = polys_up_to(&field, h as usize, full);
            for a_poly in &polys {
                for b_poly in &polys {
                    if a_poly.is_zero() && b_poly.is_zero() {
                        continue;
                    }
                    // normalize the leading structure: first nonzero
                    // coefficient of (A, B) equal to 1 kills scalar copies
                    if !leading_normalized(a_poly, b_poly) {
                        continue;
                    }
                    for c_poly in &polys {
                        if c_poly.is_zero() || c_poly.lead().map(|l| !l.is_one()) == Some(true) {
                            continue;
                        }
                        if a_poly.is_zero() {
                            // constant in w: must be nonconstant in u to
                            // have any pole; still only fails faster
                            let frac = RatFn::new(b_poly.clone(), c_poly.clone());
                            if matches!(&frac, Ok(f) if f.is_constant()) {
                                continue;
                            }
                        }
                        let candidate = self.assemble_candidate(a_poly, b_poly, c_poly, d)?;
                        if candidate.is_zero() {
                            continue;
                        }
                        match self.witness_ok(&candidate, missed, prec) {
                            Ok(true) => return Ok(candidate),
                            Ok(false) => {}
                            Err(Error::NeedsLargerField { .. }) => {}
                            Err(e) => return Err(e),
                        }
                    }
                }
            }
        }
        Err(Error::WitnessNotFound { bound })
    }

    fn assemble_candidate(
        &self,
        a: &Poly<FieldElem>,
        b: &Poly<FieldElem>,
        c: &Poly<FieldElem>,
        d: usize,
    ) -> Result<CoverElement> {
        let field = self.cover.field();
        let cf = RatFn::from_poly(c.clone());
        let mut coeffs = vec![RatFn::zero(&field, 'u'); d];
        if !b.is_zero() {
            coeffs[0] = RatFn::from_poly(b.clone()).div(&cf)?;
        }
        if !a.is_zero() {
            coeffs[1] = RatFn::from_poly(a.clone()).div(&cf)?;
        }
        Ok(CoverElement::new(coeffs))
    }

    /// Verify the witness conditions for a candidate: a pole at the missed
    /// place, regularity at every other fiber place over the divisor
    /// support, and positive content through the embedding.
    fn witness_ok(&self, f: &CoverElement, missed: &FiberPlace, prec: i64) -> Result<bool> {
        // candidate support: norm zeros/poles, coefficient poles, branch
        // places, infinity
        let norm = f.norm(&self.cover)?;
        if norm.is_zero() {
            return Ok(false);
        }
        let mut support = self.cover.bad_places()?;
        for x in norm.divisor()?.places() {
            support.insert(x.clone());
        }
        for c in f.coeffs() {
            if !c.is_zero() {
                for pole in c.denominator().split_roots_full()? {
                    support.insert(Place::Finite(pole));
                }
            }
        }
        support.insert(Place::Infinity);
        support.insert(missed.base.clone());

        let mut pole_at_missed = false;
        let mut total = 0i64;
        for x in &support {
            let fibers = self.cover.fibers(x, prec)?;
            for fib in &fibers {
                let mut work_prec = prec;
                let v = loop {
                    let fibs = self.cover.fibers(x, work_prec)?;
                    let s = f.expand_at(&fibs[fib.label - 1], work_prec);
                    match s.valuation() {
                        Some(v) => break v,
                        None => {
                            work_prec *= 2;
                            if work_prec > prec * 16 {
                                return Err(Error::PrecisionExhausted {
                                    detail: format!("witness expansion at {x} not visible"),
                                });
                            }
                        }
                    }
                };
                total += v;
                if fib.same_place(missed) {
                    if v >= 0 {
                        return Ok(false);
                    }
                    pole_at_missed = true;
                } else if v < 0 {
                    return Ok(false);
                }
            }
        }
        if !pole_at_missed {
            return Ok(false);
        }
        if total != 0 {
            return Err(Error::Inconsistency {
                detail: format!("witness divisor has degree {total} on the cover"),
            });
        }
        // the decisive condition: positive content through the embedding
        let content = self.content_of_function(f, prec)?;
        Ok(content.total > 0)
    }

    /// The full verdict: discreteness via the finite routing check, the
    /// degree bound, the product formula over the tests, and — in the
    /// non-discrete case — an explicit verified witness.
    pub fn classify(
        &self,
        tests: &[CoverElement],
        bound: u32,
        prec: i64,
    ) -> Result<Verdict> {
        let missed = self.check_injectivity(prec)?;
        if missed.is_empty() {
            let d = self.cover.degree();
            let n = self.target.degree();
            if d > n {
                return Err(Error::Inconsistency {
                    detail: format!("discrete embedding with degree {d} > {n}"),
                });
            }
            let runs = self.verify_product_formula(tests, prec)?;
            for (f, report) in &runs {
                if report.total != 0 {
                    return Err(Error::Inconsistency {
                        detail: format!(
                            "injective routing but content({f}) = {}",
                            report.total
                        ),
                    });
                }
            }
            return Ok(Verdict::Discrete {
                cover_degree: d,
                target_degree: n,
                test_contents: runs.into_iter().map(|(f, r)| (f, r)).collect(),
            });
        }
        let missed_place = missed[0].clone();
        let witness = self.find_witness(&missed_place, DEFAULT_WITNESS_BOUND.max(bound), prec)?;
        let report = self.content_of_function(&witness, prec)?;
        if report.total <= 0 {
            return Err(Error::Inconsistency {
                detail: "witness search returned a zero-content function".into(),
            });
        }
        Ok(Verdict::NonDiscrete {
            missed: missed_place,
            witness,
            witness_content: report.total,
        })
    }

    /// Agreement between the routed localization of a function and its
    /// direct expansion at the routed fiber places (the faithfulness of
    /// the routing table).
    pub fn routing_faithful(&self, f: &CoverElement, x: &Place, prec: i64) -> Result<bool> {
        let routes = self.compute_routing(x, prec)?;
        let decomp = self.target.decompose_at(x, prec)?;
        let locs = self.localize_function(f, x, &decomp, prec)?;
        let fibers = self.cover.fibers(x, prec)?;
        for (j, fi) in routes.iter().enumerate() {
            let slot = &decomp.factors[j];
            let fib = &fibers[*fi];
            let m = slot.e / fib.e;
            let direct = f.expand_at(fib, prec);
            if m == 1 && fib.e == slot.e {
                if !direct.agrees(&locs[j]) {
                    return Ok(false);
                }
            } else {
                // compare valuations under the reparametrization
                let lv = locs[j].valuation();
                let dv = direct.valuation().map(|v| v * m);
                if lv != dv {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// Default height bound for the witness search.
pub const DEFAULT_WITNESS_BOUND: u32 = 3;

/// The verdict of the discreteness analysis.
#[derive(Clone)]
pub enum Verdict {
    Discrete {
        cover_degree: usize,
        target_degree: usize,
        test_contents: Vec<(CoverElement, ContentReport)>,
    },
    NonDiscrete {
        missed: FiberPlace,
        witness: CoverElement,
        witness_content: i64,
    },
}

impl Verdict {
    pub fn is_discrete(&self) -> bool {
        matches!(self, Verdict::Discrete { .. })
    }
}

/// Cross-check a verdict's content claims against the jet-lattice index
/// route (used by the CLI and the acceptance suite).
pub fn index_cross_check(
    emb: &Embedding,
    f: &CoverElement,
    prec: i64,
) -> Result<Option<i64>> {
    if !emb.routing().is_empty() {
        // the index route reads the exact algebra element, which routed
        // embeddings deliberately do not have
        return Ok(None);
    }
    let image = emb.image_of(f)?;
    let report = emb.content_of_function(f, prec)?;
    let idx = content_index(
        &image,
        emb.target(),
        &report.support(),
        Cutoffs::Auto,
        prec,
    )?;
    Ok(Some(idx))
}

fn reparametrize(series: &TruncSeries, m: i64, zeta: &FieldElem) -> TruncSeries {
    if zeta.is_one() {
        return series.substitute_power('s', m);
    }
    let field = series.field().clone();
    let jet = series.jet();
    let (ord, end) = match jet.valuation() {
        None => return series.substitute_power('s', m),
        Some(v) => (v, jet.end()),
    };
    let mut coeffs = Vec::new();
    let mut z = power_of(zeta, ord);
    for e in ord..end {
        coeffs.push(jet.coeff_at(e).mul(&z));
        z = z.mul(zeta);
    }
    let scaled = Jet::new(&field, 's', ord, coeffs);
    TruncSeries::new(scaled, series.prec()).substitute_power('s', m)
}

fn power_of(zeta: &FieldElem, e: i64) -> FieldElem {
    if e >= 0 {
        zeta.pow(e as u32)
    } else {
        zeta.inv().expect("roots of unity are nonzero").pow((-e) as u32)
    }
}

fn full_enumeration_feasible(field: &Field, h: u32) -> bool {
    match field.order() {
        Some(q) => (q as f64).powi(3 * (h as i32 + 1)) <= 300_000.0,
        None => false,
    }
}

/// Polynomials of degree at most `h`: all of them when `full`, otherwise
/// the sparse family with at most two nonzero coefficients.
fn polys_up_to(field: &Field, h: usize, full: bool) -> Vec<Poly<FieldElem>> {
    let mut out = vec![Poly::zero('u')];
    let q = match field.order() {
        Some(q) => q,
        None => {
            // small integer coefficients for the rationals
            let mut res = vec![Poly::zero('u')];
            for deg in 0..=h {
                for c in [-2i64, -1, 1, 2] {
                    res.push(Poly::monomial('u', field.from_int(c), deg));
                }
            }
            return res;
        }
    };
    if full {
        let count = q.pow(h as u32 + 1);
        for mut idx in 1..count {
            let mut coeffs = Vec::with_capacity(h + 1);
            for _ in 0..=h {
                coeffs.push(field.elem_by_index(idx % q).unwrap());
                idx /= q;
            }
            out.push(Poly::new('u', coeffs));
        }
    } else {
        for d1 in 0..=h {
            for i1 in 1..q {
                let m1 = Poly::monomial('u', field.elem_by_index(i1).unwrap(), d1);
                out.push(m1.clone());
                for d2 in d1 + 1..=h {
                    for i2 in 1..q {
                        let m2 = Poly::monomial('u', field.elem_by_index(i2).unwrap(), d2);
                        out.push(m1.add(&m2));
                    }
                }
            }
        }
    }
    out
}

fn leading_normalized(a: &Poly<FieldElem>, b: &Poly<FieldElem>) -> bool {
    let lead = a.lead().or(b.lead());
    match lead {
        Some(l) => l.is_one(),
        None => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f5() -> Field {
        Field::prime(5).unwrap()
    }

    fn upoly(field: &Field, coeffs: &[i64]) -> Poly<FieldElem> {
        Poly::new('u', coeffs.iter().map(|c| field.from_int(*c)).collect())
    }

    /// U^2 - u over F_5.
    fn quad_cover(field: &Field) -> Cover {
        let u = RatFn::variable(field, 'u');
        Cover::new(Poly::new(
            'U',
            vec![
                u.neg(),
                RatFn::zero(field, 'u'),
                RatFn::constant(field, 'u', field.one()),
            ],
        ))
        .unwrap()
    }

    fn at(field: &Field, a: i64) -> Place {
        Place::Finite(field.from_int(a))
    }

    #[test]
    fn cover_validation() {
        let k = f5();
        // U^2 - u: irreducible (no sigma-root)
        quad_cover(&k);
        // U^2 - u^2 is reducible
        let u2 = RatFn::from_poly(upoly(&k, &[0, 0, 1]));
        let bad = Cover::new(Poly::new(
            'U',
            vec![
                u2.neg(),
                RatFn::zero(&k, 'u'),
                RatFn::constant(&k, 'u', k.one()),
            ],
        ));
        assert!(bad.is_err());
    }

    #[test]
    fn fibers_of_quadratic_cover() {
        let k = f5();
        let c = quad_cover(&k);
        // @0: one place with e=2
        let f0 = c.fibers(&at(&k, 0), 8).unwrap();
        assert_eq!(f0.len(), 1);
        assert_eq!(f0[0].e, 2);
        // @1: two places with e=1
        let f1 = c.fibers(&at(&k, 1), 8).unwrap();
        assert_eq!(f1.len(), 2);
        assert!(f1.iter().all(|f| f.e == 1));
        // @inf: one place with e=2
        let fi = c.fibers(&Place::Infinity, 8).unwrap();
        assert_eq!(fi.len(), 1);
        assert_eq!(fi[0].e, 2);
    }

    #[test]
    fn canonical_embedding_is_discrete() {
        let k = f5();
        let emb = Embedding::canonical(quad_cover(&k)).unwrap();
        let missed = emb.check_injectivity(8).unwrap();
        assert!(missed.is_empty());
    }

    #[test]
    fn canonical_routing_is_identity() {
        let k = f5();
        let emb = Embedding::canonical(quad_cover(&k)).unwrap();
        for x in [at(&k, 0), at(&k, 1), Place::Infinity] {
            let routes = emb.compute_routing(&x, 8).unwrap();
            for (j, fi) in routes.iter().enumerate() {
                assert_eq!(*fi, j, "slot {j} at {x} should route to fiber {j}");
            }
        }
    }

    #[test]
    fn expansion_examples() {
        let k = f5();
        let c = quad_cover(&k);
        let d = c.degree();
        // w at the ramified fiber over @0: the root s itself
        let y0 = &c.fibers(&at(&k, 0), 8).unwrap()[0];
        let w = CoverElement::generator(&k, d);
        let s = w.expand_at(y0, 8);
        assert_eq!(s.valuation(), Some(1));
        assert_eq!(s.coeff_at(1).unwrap(), k.one());

        // u at the same fiber: s^2
        let ue = CoverElement::scalar(RatFn::variable(&k, 'u'), d);
        let s = ue.expand_at(y0, 8);
        assert_eq!(s.valuation(), Some(2));

        // (w+1)/(u-1) at the fiber (u=1, w=-1): valuation 0, leading 2.
        // Oracle: w = -(1+t)^(1/2) = 4+2t+..., so w+1 = 2t+... and
        // (u-1) = t gives leading coefficient 2.
        let y1 = &c.fibers(&at(&k, 1), 8).unwrap()[1];
        assert_eq!(y1.root.coeff_at(0).unwrap(), k.from_int(4));
        let um1 = RatFn::from_poly(upoly(&k, &[-1, 1]));
        let f = CoverElement::new(vec![
            RatFn::constant(&k, 'u', k.one()).div(&um1).unwrap(),
            RatFn::constant(&k, 'u', k.one()).div(&um1).unwrap(),
        ]);
        let s = f.expand_at(y1, 8);
        assert_eq!(s.valuation(), Some(0));
        assert_eq!(s.coeff_at(0).unwrap(), k.from_int(2));
    }

    #[test]
    fn canonical_content_of_functions() {
        let k = f5();
        let emb = Embedding::canonical(quad_cover(&k)).unwrap();
        let d = emb.cover().degree();
        // content(w) = 0 with breakdown +1 at (@0,1), -1 at (@inf,1)
        let w = CoverElement::generator(&k, d);
        let r = emb.content_of_function(&w, 8).unwrap();
        assert_eq!(r.total, 0);
        assert_eq!(r.entries.len(), 2);
        assert_eq!(r.entries[0].place, at(&k, 0));
        assert_eq!(r.entries[0].val, 1);
        assert_eq!(r.entries[1].place, Place::Infinity);
        assert_eq!(r.entries[1].val, -1);

        // content((w+1)/(u-1)) = 0
        let um1 = RatFn::from_poly(upoly(&k, &[-1, 1]));
        let inv = RatFn::constant(&k, 'u', k.one()).div(&um1).unwrap();
        let f = CoverElement::new(vec![inv.clone(), inv]);
        let r = emb.content_of_function(&f, 8).unwrap();
        assert_eq!(r.total, 0);
    }

    #[test]
    fn twisted_embedding_detected_with_witness() {
        let k = f5();
        // route both slots at @1 to the w=-1 fiber (index 1)
        let emb = Embedding::canonical(quad_cover(&k))
            .unwrap()
            .with_routing(at(&k, 1), vec![1, 1], 8)
            .unwrap();
        let missed = emb.check_injectivity(8).unwrap();
        assert_eq!(missed.len(), 1);
        assert_eq!(missed[0].base, at(&k, 1));
        assert_eq!(missed[0].label, 1);

        // the shipped witness (w+1)/(u-1) has content exactly 1
        let um1 = RatFn::from_poly(upoly(&k, &[-1, 1]));
        let inv = RatFn::constant(&k, 'u', k.one()).div(&um1).unwrap();
        let f = CoverElement::new(vec![inv.clone(), inv]);
        let r = emb.content_of_function(&f, 8).unwrap();
        assert_eq!(r.total, 1);

        // and the search rediscovers some valid witness within bound 3
        let w = emb.find_witness(&missed[0], 3, 8).unwrap();
        let rw = emb.content_of_function(&w, 8).unwrap();
        assert!(rw.total > 0);
    }

    #[test]
    fn verdicts() {
        let k = f5();
        let um1 = RatFn::from_poly(upoly(&k, &[-1, 1]));
        let inv = RatFn::constant(&k, 'u', k.one()).div(&um1).unwrap();
        let tests = vec![
            CoverElement::generator(&k, 2),
            CoverElement::scalar(um1.clone(), 2),
            CoverElement::new(vec![RatFn::constant(&k, 'u', k.one()), RatFn::constant(&k, 'u', k.one())]),
            CoverElement::new(vec![inv.clone(), inv]),
        ];
        let canonical = Embedding::canonical(quad_cover(&k)).unwrap();
        match canonical.classify(&tests, 3, 8).unwrap() {
            Verdict::Discrete {
                cover_degree,
                target_degree,
                ..
            } => {
                assert_eq!(cover_degree, 2);
                assert_eq!(target_degree, 2);
            }
            _ => panic!("canonical embedding must be discrete"),
        }

        let twisted = Embedding::canonical(quad_cover(&k))
            .unwrap()
            .with_routing(at(&k, 1), vec![1, 1], 8)
            .unwrap();
        match twisted.classify(&tests, 3, 8).unwrap() {
            Verdict::NonDiscrete {
                missed,
                witness_content,
                ..
            } => {
                assert_eq!(missed.base, at(&k, 1));
                assert_eq!(witness_content, 1);
            }
            _ => panic!("twisted embedding must be non-discrete"),
        }
    }

    #[test]
    fn sigma_inside_quadratic_algebra() {
        // the degree-1 cover U - u embedded in A{T^2 - u} via U -> u*1:
        // both slots route to the unique fiber, so the embedding is
        // discrete with degree bound 1 <= 2
        let k = f5();
        let u = RatFn::variable(&k, 'u');
        let cover = Cover::new(Poly::new(
            'U',
            vec![u.neg(), RatFn::constant(&k, 'u', k.one())],
        ))
        .unwrap();
        let target = AdelicPoly::new(vec![
            Adele::from_ratfn(u.clone()).neg(),
            Adele::zero(&k),
        ]);
        let image = AlgebraElement::scalar(Adele::from_ratfn(u.clone()), 2);
        let emb = Embedding::with_parts(cover, target, image).unwrap();
        let missed = emb.check_injectivity(8).unwrap();
        assert!(missed.is_empty());
        match emb.classify(&[], 3, 8).unwrap() {
            Verdict::Discrete {
                cover_degree,
                target_degree,
                ..
            } => {
                assert_eq!(cover_degree, 1);
                assert_eq!(target_degree, 2);
            }
            _ => panic!("sigma embeds discretely"),
        }
    }

    #[test]
    fn routing_faithfulness() {
        let k = f5();
        let emb = Embedding::canonical(quad_cover(&k)).unwrap();
        let um1 = RatFn::from_poly(upoly(&k, &[-1, 1]));
        let f = CoverElement::new(vec![um1, RatFn::constant(&k, 'u', k.from_int(2))]);
        // places where T^2 - u splits over F_5 are the squares 1 and 4;
        // 0 and infinity are ramified; nonsquares need a larger field
        for x in [at(&k, 0), at(&k, 1), at(&k, 4), Place::Infinity] {
            assert!(emb.routing_faithful(&f, &x, 8).unwrap());
        }
        let err = emb.routing_faithful(&f, &at(&k, 2), 8);
        assert!(matches!(err, Err(Error::NeedsLargerField { .. })));
    }
}
