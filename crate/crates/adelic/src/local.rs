//! Local fields `k((t))` and the structure of polynomial quotients over
//! them: separability certificates, Hensel splitting into series roots,
//! the evaluation/interpolation isomorphism at split places, and Newton
//! polygon factorization into tame totally ramified factors.
//!
//! Polynomial coefficients here are exact rational functions of the local
//! uniformizer (the closure of Laurent polynomials under ring operations
//! and germ expansion), so every valuation and separability decision is
//! exact. Only the computed roots are truncated, and they carry their
//! precision.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::FieldElem;
use crate::laurent::{expand, Jet, TruncSeries};
use crate::poly::{Coeff, Poly};
use crate::ratfn::RatFn;

/// Default root precision: series coefficients are computed this far past
/// the valuation offset.
pub const DEFAULT_PRECISION: i64 = 16;

/// Valuation of an exact local coefficient at `t = 0`; `None` for zero.
pub fn t_valuation(f: &RatFn) -> Option<i64> {
    if f.is_zero() {
        return None;
    }
    let zero = crate::place::Place::Finite(f.field().zero());
    Some(f.valuation(&zero).expect("nonzero"))
}

/// Is the coefficient integral (no pole at `t = 0`)?
pub fn is_integral(f: &RatFn) -> bool {
    t_valuation(f).map(|v| v >= 0).unwrap_or(true)
}

/// Residue of an integral coefficient: its value at `t = 0`.
pub fn residue(f: &RatFn) -> FieldElem {
    f.eval(&f.field().zero())
        .expect("integral coefficients have no pole at the origin")
}

fn require_integral(p: &Poly<RatFn>) -> Result<()> {
    for c in p.coeffs() {
        if !is_integral(c) {
            return Err(Error::Unsupported {
                detail: format!("coefficient {c} is not integral at the place"),
            });
        }
    }
    Ok(())
}

/// The reduction of an integral polynomial modulo the maximal ideal.
pub fn residue_poly(p: &Poly<RatFn>) -> Poly<FieldElem> {
    p.map(p.var(), residue)
}

/// The three equivalent separability conditions for a monic integral
/// polynomial over the valuation ring, each computed independently:
/// the discriminant is a unit; the reduction is separable; the minimal
/// Bézout certificate has integral coefficients.
#[derive(Debug, Clone)]
pub struct SeparabilityConditions {
    /// Valuation of the discriminant; `None` when the discriminant is zero
    /// (inseparable over the local field itself).
    pub disc_valuation: Option<i64>,
    pub disc_is_unit: bool,
    pub residue_separable: bool,
    /// There are `a, b` with `aP + bP' = 1` and integral coefficients.
    pub bezout_integral: bool,
}

/// Compute the three conditions of the local separability criterion for a
/// monic integral polynomial. They must agree; callers that rely on the
/// agreement can simply read `disc_is_unit`.
pub fn separability_conditions(p: &Poly<RatFn>) -> Result<SeparabilityConditions> {
    assert!(p.is_monic(), "separability conditions expect monic input");
    require_integral(p)?;

    let disc = p.discriminant()?;
    let disc_valuation = t_valuation(&disc);
    let disc_is_unit = disc_valuation == Some(0);

    let residue_separable = residue_poly(p).is_squarefree()?;

    // Minimal Bézout pair over the fraction field k(t); integrality of its
    // coefficients is exactly solvability over the valuation ring.
    let dp = p.derivative();
    let bezout_integral = if dp.is_zero() {
        false
    } else {
        let (g, a, b) = p.ext_gcd(&dp)?;
        g.degree() == Some(0)
            && a.coeffs().iter().all(is_integral)
            && b.coeffs().iter().all(is_integral)
    };

    Ok(SeparabilityConditions {
        disc_valuation,
        disc_is_unit,
        residue_separable,
        bezout_integral,
    })
}

/// Separability of a monic integral polynomial over the valuation ring,
/// with the discriminant valuation as a certificate.
pub fn residue_separable(p: &Poly<RatFn>) -> Result<(bool, Option<i64>)> {
    let c = separability_conditions(p)?;
    if c.disc_is_unit != c.residue_separable || c.disc_is_unit != c.bezout_integral {
        return Err(Error::Inconsistency {
            detail: format!(
                "separability conditions disagree on {p}: disc_unit={}, residue_sep={}, bezout={}",
                c.disc_is_unit, c.residue_separable, c.bezout_integral
            ),
        });
    }
    Ok((c.disc_is_unit, c.disc_valuation))
}

fn coeff_series(p: &Poly<RatFn>, prec: i64) -> Vec<TruncSeries> {
    p.coeffs().iter().map(|c| expand(c, prec)).collect()
}

fn eval_series(coeffs: &[TruncSeries], x: &TruncSeries) -> TruncSeries {
    let mut acc = coeffs.last().expect("nonzero polynomial").clone();
    for c in coeffs.iter().rev().skip(1) {
        acc = acc.mul(x).add(c);
    }
    acc
}

/// Hensel splitting: the complete list of series roots of a monic integral
/// polynomial with separable (and split) reduction. Roots are returned in
/// the canonical order of their residues and satisfy `P(a) = 0` modulo
/// `t^prec`.
pub fn hensel_split(p: &Poly<RatFn>, prec: i64) -> Result<Vec<TruncSeries>> {
    assert!(p.is_monic(), "hensel_split expects monic input");
    let (sep, disc_val) = residue_separable(p)?;
    if !sep {
        return Err(Error::WildOrInseparableResidue {
            detail: format!("discriminant valuation {disc_val:?} of {p} is positive"),
        });
    }
    let rbar = residue_poly(p);
    let residues = rbar.split_roots_full()?; // sorted, all simple

    let pc = coeff_series(p, prec);
    let dpc = coeff_series(&p.derivative(), prec);
    let mut roots = Vec::with_capacity(residues.len());
    for r in residues {
        let mut a = TruncSeries::new(Jet::constant('t', r), prec);
        let mut correct = 1i64;
        while correct < prec {
            let pa = eval_series(&pc, &a);
            let dpa = eval_series(&dpc, &a);
            a = a.sub(&pa.mul(&dpa.inv()?));
            correct *= 2;
        }
        let check = eval_series(&pc, &a);
        if !check.is_zero_to_prec() {
            return Err(Error::Inconsistency {
                detail: format!("Newton iteration failed to converge for {p}"),
            });
        }
        roots.push(a);
    }
    Ok(roots)
}

/// Evaluation half of the splitting isomorphism: a polynomial of degree
/// `< n` maps to its values at the `n` Hensel roots.
pub fn psi_eval(q: &Poly<RatFn>, roots: &[TruncSeries]) -> Vec<TruncSeries> {
    assert!(q.degree().unwrap_or(0) < roots.len());
    let prec = roots.iter().map(|r| r.prec()).min().unwrap_or(0);
    if q.is_zero() {
        return roots
            .iter()
            .map(|r| TruncSeries::zero_to(r.field(), r.var(), prec))
            .collect();
    }
    let qc = coeff_series(q, prec);
    roots.iter().map(|r| eval_series(&qc, r)).collect()
}

/// Interpolation half: the unique polynomial of degree `< n` taking the
/// given values at the roots (Lagrange; the pivots are the pairwise root
/// differences, units because the residues are distinct).
pub fn psi_interp(values: &[TruncSeries], roots: &[TruncSeries]) -> Result<Vec<TruncSeries>> {
    let n = roots.len();
    assert_eq!(values.len(), n);
    let field = roots[0].field().clone();
    let var = roots[0].var();
    let prec = roots.iter().map(|r| r.prec()).min().unwrap();
    let one = TruncSeries::new(Jet::constant(var, field.one()), prec);
    let zero = TruncSeries::zero_to(&field, var, prec);

    let mut acc: Vec<TruncSeries> = vec![zero.clone(); n];
    for i in 0..n {
        // numerator polynomial prod_{j != i} (T - a_j), times values[i] / denom
        let mut numer = vec![one.clone()];
        let mut denom = one.clone();
        for (j, aj) in roots.iter().enumerate() {
            if j == i {
                continue;
            }
            // multiply numer by (T - a_j)
            let mut next = vec![zero.clone(); numer.len() + 1];
            for (d, c) in numer.iter().enumerate() {
                next[d + 1] = next[d + 1].add(c);
                next[d] = next[d].add(&c.mul(&aj.neg()));
            }
            numer = next;
            let diff = roots[i].sub(aj);
            if diff.valuation() != Some(0) {
                return Err(Error::PrecisionExhausted {
                    detail: "root difference is not a visible unit".into(),
                });
            }
            denom = denom.mul(&diff);
        }
        let scale = values[i].mul(&denom.inv()?);
        for (d, c) in numer.iter().enumerate() {
            acc[d] = acc[d].add(&c.mul(&scale));
        }
    }
    Ok(acc)
}

/// One segment of a Newton polygon: slope `-h/e` in lowest terms
/// (`e >= 1`), covering `len` roots of valuation `h/e`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolygonSegment {
    pub h: i64,
    pub e: i64,
    pub len: usize,
}

/// The lower convex hull of the coefficient valuations of a polynomial,
/// as a list of segments with strictly increasing slopes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NewtonPolygon {
    pub segments: Vec<PolygonSegment>,
}

impl fmt::Display for NewtonPolygon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, s) in self.segments.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "slope -{}/{} x{}", s.h, s.e, s.len)?;
        }
        write!(f, "]")
    }
}

/// Newton polygon of a monic polynomial over the local field.
pub fn newton_polygon(p: &Poly<RatFn>) -> NewtonPolygon {
    assert!(p.is_monic(), "newton_polygon expects monic input");
    let pts: Vec<(i64, i64)> = p
        .coeffs()
        .iter()
        .enumerate()
        .filter_map(|(i, c)| t_valuation(c).map(|v| (i as i64, v)))
        .collect();
    // lower hull, left to right (monotone chain)
    let mut hull: Vec<(i64, i64)> = Vec::new();
    for pt in pts {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            // keep b only if it is strictly below the chord a..pt
            if (b.1 - a.1) * (pt.0 - a.0) < (pt.1 - a.1) * (b.0 - a.0) {
                break;
            }
            hull.pop();
        }
        hull.push(pt);
    }
    let mut segments = Vec::new();
    for w in hull.windows(2) {
        let (i1, v1) = w[0];
        let (i2, v2) = w[1];
        let di = i2 - i1;
        let dv = v2 - v1;
        let g = gcd(dv.unsigned_abs(), di.unsigned_abs()).max(1) as i64;
        segments.push(PolygonSegment {
            h: -dv / g,
            e: di / g,
            len: di as usize,
        });
    }
    NewtonPolygon { segments }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// One factor of the local étale algebra: a copy of `k((s))` with
/// `s^e = t`, receiving `T` as the stored root series.
#[derive(Debug, Clone)]
pub struct LocalFactor {
    /// 1-based canonical index at its place.
    pub label: usize,
    /// Ramification index; the stored uniformizer relation is `s^e = t`.
    pub e: i64,
    /// The image of `T` in `k((s))`.
    pub root: TruncSeries,
}

impl LocalFactor {
    /// Residue of the root's leading coefficient (used for canonical
    /// ordering and display).
    pub fn leading_residue(&self) -> FieldElem {
        match self.root.valuation() {
            Some(v) => self.root.coeff_at(v).unwrap(),
            None => self.root.field().zero(),
        }
    }
}

/// Factor a monic separable polynomial over `k((t))` into tame totally
/// ramified factors via the Newton polygon and residual Hensel lifting.
/// Factors are ordered by (slope, canonical residual-root order) and
/// labeled from 1. Precision: each root satisfies `P` modulo `s^(e*prec)`.
pub fn local_factor(p: &Poly<RatFn>, prec: i64) -> Result<Vec<LocalFactor>> {
    assert!(p.is_monic(), "local_factor expects monic input");
    let field = p.coeffs()[0].field().clone();
    let char_p = field.characteristic();

    if p.degree() == Some(1) {
        let root = expand(&p.coeff(0).neg(), prec).substitute_power('s', 1);
        return Ok(vec![LocalFactor { label: 1, e: 1, root }]);
    }

    let mut work = p.clone();
    let mut factors: Vec<LocalFactor> = Vec::new();

    // an exact zero constant term means T divides P exactly once
    if work.coeff(0).is_zero() {
        let var = p.var();
        let (q, r) = work.divrem(&Poly::monomial(var, work.coeffs()[0].one_like(), 1))?;
        debug_assert!(r.is_zero());
        work = q;
        factors.push(LocalFactor {
            label: 0, // relabeled below
            e: 1,
            root: TruncSeries::zero_to(&field, 's', prec),
        });
        if work.coeff(0).is_zero() {
            return Err(Error::Unsupported {
                detail: "repeated zero root contradicts separability".into(),
            });
        }
    }

    // reject wild segments before anything else: in wild characteristic the
    // discriminant test below cannot distinguish ramification from genuine
    // inseparability
    let polygon = newton_polygon(&work);
    for seg in &polygon.segments {
        if seg.e > 1 && char_p > 0 && seg.e % char_p as i64 == 0 {
            return Err(Error::UnsupportedWildRamification {
                detail: format!(
                    "segment slope -{}/{} has ramification index divisible by char {}",
                    seg.h, seg.e, char_p
                ),
            });
        }
    }
    let disc = p.discriminant()?;
    if disc.is_zero() {
        return Err(Error::Unsupported {
            detail: format!("{p} is inseparable over the local field"),
        });
    }

    for seg in &polygon.segments {
        let residual = residual_poly(&work, seg);
        if !residual.is_squarefree()? {
            return Err(Error::UnsupportedWildRamification {
                detail: format!("residual polynomial {residual} is inseparable"),
            });
        }
        let gammas = residual.split_roots_full()?;
        for gamma in gammas {
            debug_assert!(!gamma.is_zero());
            let c = gamma.nth_root(seg.e as u32).ok_or_else(|| {
                Error::NeedsLargerField {
                    factor: format!("z^{} - ({gamma})", seg.e),
                }
            })?;
            let root = lift_segment_root(&work, seg, &c, prec)?;
            factors.push(LocalFactor {
                label: 0,
                e: seg.e,
                root,
            });
        }
    }

    for (i, f) in factors.iter_mut().enumerate() {
        f.label = i + 1;
    }
    Ok(factors)
}

/// The residual polynomial of a polygon segment: residues of the on-line
/// coefficients, indexed along the segment's lattice points.
fn residual_poly(p: &Poly<RatFn>, seg: &PolygonSegment) -> Poly<FieldElem> {
    let field = p.coeffs()[0].field().clone();
    let (i0, v0) = segment_start(p, seg);
    let deg = seg.len as i64 / seg.e;
    let mut coeffs = Vec::with_capacity(deg as usize + 1);
    for j in 0..=deg {
        let i = i0 + j * seg.e;
        let vline = v0 - j * seg.h;
        let c = &p.coeff(i as usize);
        let coeff = match t_valuation(c) {
            Some(v) if v == vline => expand(c, vline + 1).coeff_at(vline).unwrap(),
            _ => field.zero(),
        };
        coeffs.push(coeff);
    }
    Poly::new('z', coeffs)
}

/// Locate the left endpoint of a segment on the hull of `p`.
fn segment_start(p: &Poly<RatFn>, seg: &PolygonSegment) -> (i64, i64) {
    let polygon = newton_polygon(p);
    let mut i = p
        .coeffs()
        .iter()
        .position(|c| !c.is_zero())
        .expect("nonzero polynomial") as i64;
    let mut v = t_valuation(&p.coeff(i as usize)).unwrap();
    for s in &polygon.segments {
        if s == seg {
            return (i, v);
        }
        i += s.len as i64;
        v -= (s.len as i64 / s.e) * s.h;
    }
    panic!("segment not on polygon");
}

/// Lift the root with leading term `c * s^h` (where `s^e = t`) by Newton
/// iteration over `k[[s]]` applied to the normalized substituted
/// polynomial.
fn lift_segment_root(
    p: &Poly<RatFn>,
    seg: &PolygonSegment,
    c: &FieldElem,
    prec: i64,
) -> Result<TruncSeries> {
    let field = p.coeffs()[0].field().clone();
    let prec_s = prec * seg.e;
    let one = field.one();
    let s_pow = |k: i64| -> RatFn {
        if k >= 0 {
            RatFn::from_poly(Poly::monomial('s', one.clone(), k as usize))
        } else {
            RatFn::new(
                Poly::constant('s', one.clone()),
                Poly::monomial('s', one.clone(), (-k) as usize),
            )
            .unwrap()
        }
    };
    // coefficients in k((s)) with t = s^e, then T = s^h Z, normalized so the
    // minimum coefficient valuation is zero
    let subs: Vec<RatFn> = p
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, a)| {
            if a.is_zero() {
                RatFn::zero(&field, 's')
            } else {
                let num = a
                    .numerator()
                    .map('s', |x| x.clone())
                    .substitute_power(seg.e as usize);
                let den = a
                    .denominator()
                    .map('s', |x| x.clone())
                    .substitute_power(seg.e as usize);
                let f = RatFn::new(num, den).unwrap();
                f.mul(&s_pow(seg.h * i as i64))
            }
        })
        .collect();
    let m = subs
        .iter()
        .filter_map(t_valuation)
        .min()
        .expect("nonzero polynomial");
    let q: Vec<RatFn> = subs.iter().map(|b| b.mul(&s_pow(-m))).collect();

    let qs: Vec<TruncSeries> = q.iter().map(|f| expand(f, prec_s)).collect();
    // derivative coefficients: i * q_i
    let dq: Vec<TruncSeries> = qs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, f)| {
            let mut acc = TruncSeries::zero_to(&field, 's', f.prec());
            for _ in 0..i {
                acc = acc.add(f);
            }
            acc
        })
        .collect();
    let qbar: Vec<FieldElem> = q
        .iter()
        .map(|f| match t_valuation(f) {
            Some(0) => residue(f),
            _ => field.zero(),
        })
        .collect();
    let qbar_poly = Poly::new('z', qbar);
    let dqbar = qbar_poly.derivative();
    if dqbar.eval(c).is_zero() {
        return Err(Error::UnsupportedWildRamification {
            detail: format!("residue root {c} of {qbar_poly} is not simple"),
        });
    }

    let mut z = TruncSeries::new(Jet::constant('s', c.clone()), prec_s);
    let mut correct = 1i64;
    while correct < prec_s {
        let qz = eval_series(&qs, &z);
        let dqz = eval_series(&dq, &z);
        z = z.sub(&qz.mul(&dqz.inv()?));
        correct *= 2;
    }
    let qz = eval_series(&qs, &z);
    if !qz.is_zero_to_prec() {
        return Err(Error::Inconsistency {
            detail: "segment root iteration failed to converge".into(),
        });
    }
    // root = s^h * z
    let shift = TruncSeries::new(
        Jet::monomial('s', field.one(), seg.h),
        prec_s + seg.h.max(0) + 1,
    );
    Ok(z.mul(&shift))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;
    use crate::place::Place;

    fn f5() -> Field {
        Field::prime(5).unwrap()
    }

    /// T^2 - (1 + t): the reference separable integral quadratic.
    fn t2_minus_1_plus_t(field: &Field) -> Poly<RatFn> {
        let one_plus_t = RatFn::from_poly(Poly::new('t', vec![field.one(), field.one()]));
        Poly::new(
            'T',
            vec![
                one_plus_t.neg(),
                RatFn::zero(field, 't'),
                RatFn::constant(field, 't', field.one()),
            ],
        )
    }

    fn t2_minus_t(field: &Field) -> Poly<RatFn> {
        let t = RatFn::variable(field, 't');
        Poly::new(
            'T',
            vec![
                t.neg(),
                RatFn::zero(field, 't'),
                RatFn::constant(field, 't', field.one()),
            ],
        )
    }

    #[test]
    fn separability_reference_cases() {
        let k = f5();
        // disc(T^2 - (1+t)) = 4(1+t): unit; oracle = resultant(P, P')
        let p = t2_minus_1_plus_t(&k);
        let res = p.resultant(&p.derivative()).unwrap();
        assert_eq!(t_valuation(&res), Some(0));
        let (sep, dv) = residue_separable(&p).unwrap();
        assert!(sep);
        assert_eq!(dv, Some(0));

        // disc(T^2 - t) = 4t: valuation 1
        let q = t2_minus_t(&k);
        let (sep, dv) = residue_separable(&q).unwrap();
        assert!(!sep);
        assert_eq!(dv, Some(1));

        // degree 1: disc = 1
        let lin = Poly::new(
            'T',
            vec![
                RatFn::variable(&k, 't').neg(),
                RatFn::constant(&k, 't', k.one()),
            ],
        );
        let (sep, _) = residue_separable(&lin).unwrap();
        assert!(sep);
    }

    #[test]
    fn hensel_reference_roots() {
        // T^2 - (1+t) over F_5, N=2: roots 1+3t and 4+2t.
        // Oracle (undetermined coefficients): (1+at)^2 = 1+2at = 1+t needs
        // 2a = 1, so a = 3 mod 5; the other root is its negative.
        let k = f5();
        let p = t2_minus_1_plus_t(&k);
        let roots = hensel_split(&p, 2).unwrap();
        assert_eq!(roots.len(), 2);
        assert_eq!(roots[0].coeff_at(0).unwrap(), k.from_int(1));
        assert_eq!(roots[0].coeff_at(1).unwrap(), k.from_int(3));
        assert_eq!(roots[1].coeff_at(0).unwrap(), k.from_int(4));
        assert_eq!(roots[1].coeff_at(1).unwrap(), k.from_int(2));
    }

    #[test]
    fn hensel_constant_roots() {
        // T^2 - 1 splits exactly into constants 1 and 4
        let k = f5();
        let p = Poly::new(
            'T',
            vec![
                RatFn::constant(&k, 't', k.from_int(-1)),
                RatFn::zero(&k, 't'),
                RatFn::constant(&k, 't', k.one()),
            ],
        );
        let roots = hensel_split(&p, 4).unwrap();
        for (r, want) in roots.iter().zip([1i64, 4]) {
            assert_eq!(r.coeff_at(0).unwrap(), k.from_int(want));
            for e in 1..4 {
                assert!(r.coeff_at(e).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn hensel_rejects_ramified() {
        let k = f5();
        let q = t2_minus_t(&k);
        assert!(matches!(
            hensel_split(&q, 8),
            Err(Error::WildOrInseparableResidue { .. })
        ));
    }

    #[test]
    fn hensel_roots_recombine() {
        let k = f5();
        let p = t2_minus_1_plus_t(&k);
        let n = 12;
        let roots = hensel_split(&p, n).unwrap();
        // prod (T - a_i) == P mod t^n: compare symmetric functions,
        // a+b = -(coeff of T) = 0 and a*b = constant coefficient
        let e1 = roots[0].add(&roots[1]);
        let e2 = roots[0].mul(&roots[1]);
        assert!(e1.is_zero_to_prec());
        let c0 = expand(&p.coeff(0), n);
        assert!(e2.agrees(&c0));
    }

    #[test]
    fn psi_round_trip_and_integrality() {
        let k = f5();
        let p = Poly::new(
            'T',
            vec![
                RatFn::constant(&k, 't', k.from_int(-1)),
                RatFn::zero(&k, 't'),
                RatFn::constant(&k, 't', k.one()),
            ],
        );
        let roots = hensel_split(&p, 6).unwrap();

        // psi(T) = (1, 4)
        let q = Poly::new(
            'T',
            vec![RatFn::zero(&k, 't'), RatFn::constant(&k, 't', k.one())],
        );
        let vals = psi_eval(&q, &roots);
        assert_eq!(vals[0].coeff_at(0).unwrap(), k.from_int(1));
        assert_eq!(vals[1].coeff_at(0).unwrap(), k.from_int(4));

        // interpolating (1, 0) gives integral coefficients; oracle: the
        // 2x2 solve c0 + c1 = 1, c0 + 4c1 = 0 has solution c1 = 3, c0 = 3.
        let one = TruncSeries::new(Jet::constant('t', k.one()), 6);
        let zero = TruncSeries::zero_to(&k, 't', 6);
        let coeffs = psi_interp(&[one.clone(), zero], &roots).unwrap();
        assert_eq!(coeffs[0].coeff_at(0).unwrap(), k.from_int(3));
        assert_eq!(coeffs[1].coeff_at(0).unwrap(), k.from_int(3));

        // psi(1) = (1, 1)
        let qc = Poly::new('T', vec![RatFn::constant(&k, 't', k.one())]);
        let vals = psi_eval(&qc, &roots);
        assert_eq!(vals[0].coeff_at(0).unwrap(), k.one());
        assert_eq!(vals[1].coeff_at(0).unwrap(), k.one());

        // round trip: interp(eval(Q)) = Q
        let qr = Poly::new(
            'T',
            vec![
                RatFn::from_poly(Poly::new('t', vec![k.from_int(2), k.from_int(1)])),
                RatFn::constant(&k, 't', k.from_int(3)),
            ],
        );
        let vals = psi_eval(&qr, &roots);
        let back = psi_interp(&vals, &roots).unwrap();
        for (i, c) in back.iter().enumerate() {
            let want = expand(&qr.coeff(i), c.prec());
            assert!(c.agrees(&want));
        }
    }

    #[test]
    fn polygon_reference_shapes() {
        let k = f5();
        // T^2 - t: one segment slope -1/2 (hull (0,1)-(2,0))
        let p = t2_minus_t(&k);
        let poly = newton_polygon(&p);
        assert_eq!(poly.segments, vec![PolygonSegment { h: 1, e: 2, len: 2 }]);

        // T^2 - (1+t): slope 0
        let q = t2_minus_1_plus_t(&k);
        assert_eq!(
            newton_polygon(&q).segments,
            vec![PolygonSegment { h: 0, e: 1, len: 2 }]
        );

        // T^2 - u-germ at infinity (v(u) = -1): hull (0,-1)-(2,0), slope 1/2
        let u_at_inf = RatFn::variable(&k, 'u').germ_at(&Place::Infinity);
        let r = Poly::new(
            'T',
            vec![
                u_at_inf.neg(),
                RatFn::zero(&k, 't'),
                RatFn::constant(&k, 't', k.one()),
            ],
        );
        assert_eq!(
            newton_polygon(&r).segments,
            vec![PolygonSegment { h: -1, e: 2, len: 2 }]
        );
    }

    #[test]
    fn local_factor_ramified_origin() {
        // T^2 - t: one factor, e = 2, root exactly s
        let k = f5();
        let p = t2_minus_t(&k);
        let fs = local_factor(&p, 8).unwrap();
        assert_eq!(fs.len(), 1);
        assert_eq!(fs[0].e, 2);
        assert_eq!(fs[0].root.valuation(), Some(1));
        assert_eq!(fs[0].root.coeff_at(1).unwrap(), k.one());
        for e in 2..8 {
            assert!(fs[0].root.coeff_at(e).unwrap().is_zero());
        }
    }

    #[test]
    fn local_factor_hensel_case() {
        // T^2 - (1+t): two factors with e = 1, matching hensel_split
        let k = f5();
        let p = t2_minus_1_plus_t(&k);
        let fs = local_factor(&p, 6).unwrap();
        assert_eq!(fs.len(), 2);
        let roots = hensel_split(&p, 6).unwrap();
        for (f, r) in fs.iter().zip(&roots) {
            assert_eq!(f.e, 1);
            let renamed = r.substitute_power('s', 1);
            assert!(f.root.agrees(&renamed));
        }
    }

    #[test]
    fn local_factor_wild_rejected() {
        // T^2 - t over F_2: char divides e
        let k = Field::prime(2).unwrap();
        let p = t2_minus_t(&k);
        assert!(matches!(
            local_factor(&p, 8),
            Err(Error::UnsupportedWildRamification { .. })
        ));
    }

    #[test]
    fn local_factor_degree_accounting() {
        // (T^2 - t)(T - 2): mixed polygon, sum of e_j = 3
        let k = f5();
        let t = RatFn::variable(&k, 't');
        let two = RatFn::constant(&k, 't', k.from_int(2));
        let a = t2_minus_t(&k);
        let b = Poly::new('T', vec![two.neg(), RatFn::constant(&k, 't', k.one())]);
        let p = a.mul(&b);
        let fs = local_factor(&p, 8).unwrap();
        let total: i64 = fs.iter().map(|f| f.e).sum();
        assert_eq!(total, 3);
        // valuation extension: v(t) = e on each factor
        for f in &fs {
            let t_in_s = expand(&t, 8).substitute_power('s', f.e);
            assert_eq!(t_in_s.valuation(), Some(f.e));
        }
    }

    #[test]
    fn local_factor_orders_by_slope_then_residue() {
        // (T - t)(T - 1)(T - 2): valuations 1, 0, 0
        let k = f5();
        let t = RatFn::variable(&k, 't');
        let mk_lin =
            |c: RatFn| Poly::new('T', vec![c.neg(), RatFn::constant(&k, 't', k.one())]);
        let p = mk_lin(t.clone())
            .mul(&mk_lin(RatFn::constant(&k, 't', k.one())))
            .mul(&mk_lin(RatFn::constant(&k, 't', k.from_int(2))));
        let fs = local_factor(&p, 8).unwrap();
        assert_eq!(fs.len(), 3);
        // slope order: valuation-1 root first (steeper slope), then
        // residues 1, 2 in canonical order
        assert_eq!(fs[0].root.valuation(), Some(1));
        assert_eq!(fs[1].leading_residue(), k.from_int(1));
        assert_eq!(fs[2].leading_residue(), k.from_int(2));
        assert_eq!(fs[0].label, 1);
        assert_eq!(fs[2].label, 3);
    }

    #[test]
    fn zero_root_factor_comes_first() {
        // T^2 - T = T(T - 1)
        let k = f5();
        let one = RatFn::constant(&k, 't', k.one());
        let p = Poly::new('T', vec![RatFn::zero(&k, 't'), one.neg(), one.clone()]);
        let fs = local_factor(&p, 6).unwrap();
        assert_eq!(fs.len(), 2);
        assert!(fs[0].root.is_zero_to_prec());
        assert_eq!(fs[1].leading_residue(), k.one());
    }
}
