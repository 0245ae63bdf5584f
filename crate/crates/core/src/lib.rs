//! Deltahedra built from Sonobe modules.
//!
//! The crate covers the whole path from a combinatorial triangulated surface
//! to a buildable origami model:
//!
//! - [`surface`]: closed triangulated surfaces, validation, orientation repair,
//!   Euler characteristic and hexagon dissection.
//! - [`realize`]: unit-edge embeddings found by Levenberg-Marquardt with
//!   multi-start, plus self-intersection and dihedral-angle predicates.
//! - [`augment`]: Sonobe caps (right isosceles lateral faces) and the cap
//!   collision check.
//! - [`blueprint`]: module counts, vertex diagrams, assembly plans and module
//!   colorings.
//! - [`net`]: planar unfoldings along dual spanning trees.
//! - [`catalog`]: the built-in shapes, torus generators and OFF I/O.
//!
//! ```
//! use sonobe::{blueprint, catalog};
//!
//! let entry = catalog::get("pentagonal_dipyramid").unwrap();
//! assert_eq!(blueprint::module_count(&entry.mesh), 15);
//! ```

pub mod augment;
pub mod blueprint;
pub mod catalog;
pub mod geom;
pub mod net;
pub mod realize;
pub mod surface;
mod svg;

mod error;

pub use error::Error;
pub use geom::{Vec3, EPS_GEOM};
pub use realize::Embedding;
pub use surface::{MixedFacePolyhedron, TriangleMesh};
