//! Exact arithmetic for geometric adeles of the projective line.
//!
//! This crate realizes, at desk scale, the ring of adeles `A_X` of the
//! projective line over a small exact base field, quotient algebras
//! `A_X[T]/(p(T))` for monic separable `p`, and the machinery needed to
//! decide — with certificates — whether an embedded function field is
//! discrete, whether the adele ring of a cover injects, and whether the
//! additive product formula holds.
//!
//! Everything is exact: base-field, polynomial and rational-function
//! arithmetic carry no rounding, adele components are exact germs of
//! rational functions, and truncation is confined to local series roots,
//! which track their precision explicitly and refuse to answer questions
//! beyond it.
//!
//! Module map:
//!
//! * [`field`], [`poly`], [`ratfn`], [`place`] — exact base arithmetic
//!   over `F_{p^m}` or `Q`, polynomials, the function field `k(u)`,
//!   places and divisors of the projective line.
//! * [`laurent`], [`local`] — local fields `k((t))` as exact Laurent data
//!   and truncated series; Hensel splitting; Newton-polygon factorization
//!   into tame ramified factors.
//! * [`adele`] — adeles with a generic rational part and finitely many
//!   exact overrides; ideles; content; congruence neighborhoods.
//! * [`algebra`], [`content`] — the algebra `A_X[T]/(p)`: separability
//!   certificates, place classification, local decompositions, element
//!   arithmetic, integrality, and the content function computed two
//!   independent ways (valuation sums and commensurability indices).
//! * [`cover`] — covers of the line, embeddings of their function fields,
//!   fiber routing, discreteness verdicts and the product formula.
//! * [`parse`] — the textual syntax shared by the CLI and instance files.

pub mod adele;
pub mod algebra;
pub mod content;
pub mod cover;
pub mod error;
pub mod field;
pub mod laurent;
pub mod local;
pub mod parse;
pub mod place;
pub mod poly;
pub mod ratfn;

pub use adele::Adele;
pub use algebra::{AdelicPoly, AlgebraElement, LocalDecomposition, PlaceClass, Separability};
pub use content::{ContentReport, Cutoffs};
pub use cover::{Cover, CoverElement, Embedding, FiberPlace, Verdict};
pub use error::{Error, Result};
pub use field::{Field, FieldElem};
pub use laurent::{Jet, TruncSeries};
pub use local::{LocalFactor, NewtonPolygon};
pub use place::{Divisor, Place};
pub use poly::Poly;
pub use ratfn::RatFn;
