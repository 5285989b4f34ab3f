//! Manufactured solutions, error measures and convergence studies.

mod case;
mod errors;
mod study;

pub use crate::polybasis::compute_eoc;
pub use case::{make_case, CaseKind, ExactSolution, ManufacturedCase, Source, GRADIENT_FLOOR};
pub use errors::{compute_errors, error_exactness, errors_against, ErrorBundle};
pub use study::{run_study, ConvergenceRow, ConvergenceTable, StudyConfig};

#[cfg(test)]
mod tests;
