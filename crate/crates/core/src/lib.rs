#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod geometry;
pub mod harness;
pub mod hho_local;
pub mod law;
pub mod mesh;
pub mod polybasis;
pub mod solver;

pub use error::{Error, Result, ValidationError};
pub use geometry::{Point, Vec2};
pub use mesh::{generate, validate, MeshFamily, PolytopalMesh};
