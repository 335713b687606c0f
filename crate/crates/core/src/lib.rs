//! Computational finite geometry for unitals in `PG(2,q^2)`.
//!
//! This crate builds the classical objects behind ovoidal Buekenhout-Metz
//! unitals and makes every construction step mechanically checkable at desk
//! scale (`q ∈ {2,3,4,5,8}`):
//!
//! * [`field`] — the tower `F_p ⊂ F_q ⊂ F_{q²}` with table-driven arithmetic,
//!   Frobenius, norm, trace, and subfield tests;
//! * [`geom`] — projective spaces `PG(n,q)` for `n ≤ 4`: canonical points,
//!   lines, subspace spans, and quotient geometries;
//! * [`abb`] — the Bruck-Bose correspondence between the affine part of
//!   `PG(2,q²)` and `PG(4,q)` equipped with a Desarguesian line spread,
//!   including Baer-subline transfer and Baer ruled cubics;
//! * [`baer`] — recognition of Baer sublines, Baer subplanes, and Baer conics;
//! * [`unital`] — unital validation, Hermitian and ovoidal-cone constructions,
//!   secant censuses, O'Nan configuration search, and classicality testing;
//! * [`cap`] — caps and ovoids of `PG(3,q)`: standard ovoids, exhaustive cap
//!   extension, tangent planes;
//! * [`bounds`] — the hypothesis tables bounding cap-extension deficits and
//!   Baer-secant deficiencies, with explicit flags for rows whose constants
//!   are not pinned down;
//! * [`slabels`] — labelled point sets in `AG(2,q)` induced by special secant
//!   families, their closure property, and the three-way configuration
//!   classifier with an independent brute-force oracle;
//! * [`pipeline`] — the end-to-end reconstruction of an ovoidal cone from a
//!   unital's Baer secants at a point, emitting a verifiable certificate;
//! * [`ptfile`], [`cert`], [`cache`] — text formats, certificate schemas and
//!   hashing, and the byte-stable model cache.
//!
//! All arithmetic is exact; every randomized step takes an explicit seed and
//! records it, so repeated runs produce byte-identical reports at any thread
//! count.

pub mod bits;
pub mod field;
pub mod geom;
pub mod linalg;

pub mod abb;
pub mod baer;
pub mod bounds;
pub mod cap;
pub mod slabels;
pub mod unital;

pub mod cert;
pub mod pipeline;
pub mod ptfile;

pub mod cache;

pub use field::{FieldCtx, Fel};
pub use geom::{Geometry, PointId, ProjPoint, Subspace};
