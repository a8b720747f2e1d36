//! Exact dimer models on the two-torus.
//!
//! The crate covers perfect matchings and their polygon, zigzag paths and the
//! consistency predicates, zig/zag deformations of consistent models,
//! combinatorial mutation of lattice polygons, and the spider-move mutation of
//! models at quadrangle faces. Everything is exact integer or rational
//! arithmetic.

pub mod deformation;
pub mod dimer;
pub mod drawing;
pub mod error;
pub mod face_mutation;
pub mod io;
pub mod lattice;
pub mod matchings;
pub mod polygon_mutation;
pub mod polyhedron;
pub mod render;
pub mod verify;
pub mod zigzag;

pub use dimer::{Color, Dart, DimerModel, Dir, Edge, Face, Node};
pub use error::{Error, Result};
pub use lattice::{lv, LatticePolygon, LatticeVector, Rat, SlopeMultiset};
