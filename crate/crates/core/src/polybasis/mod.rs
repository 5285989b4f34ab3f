//! Local polynomial spaces, quadrature, projectors and seminorms.

pub mod basis;
pub mod fields;
pub mod projection;
pub mod quadrature;
pub mod rates;
pub mod seminorm;

pub use basis::{cell_dim, face_dim, CellBasis, CellGeometry, CellPolynomial, FaceBasis, FaceGeometry, FacePolynomial};
pub use fields::{Difference, ExpField, SinProduct, SmoothField, Values};
pub use projection::{elliptic_project, elliptic_project_in, l2_project_cell, l2_project_cell_in, l2_project_face};
pub use quadrature::QuadratureRule;
pub use rates::{compute_eoc, fitted_slope, ProjectorKind, RateRow, RateStudy};
pub use seminorm::{face_seminorm, seminorm, trace_seminorm, SeminormSpec};
