//! Exact experiments in the plane over a finite field `F_q`, `q` odd.
//!
//! Distances are the quadratic form `||u - v|| = (u1 - v1)^2 + (u2 - v2)^2`. On top of
//! field and plane arithmetic the crate counts pinned distances, isosceles triples,
//! bisector energy and point-line incidences; it counts distinct pinned trees exactly
//! and bounds them from below; and it extracts good pins together with certificates an
//! independent checker can replay.
//!
//! ```
//! use ffgeom::field::FieldCtx;
//! use ffgeom::plane::PointSet;
//! use ffgeom::stats::{isosceles_triples, TripleMode};
//!
//! let plane = PointSet::full_plane(&FieldCtx::prime(3).unwrap());
//! assert_eq!(isosceles_triples(&plane, &plane, TripleMode::Paper).value, 216);
//! ```

pub mod field;
pub mod plane;
pub mod stats;
pub mod trees;
pub mod certify;
pub mod experiment;
