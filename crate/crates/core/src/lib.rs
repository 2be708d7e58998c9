//! Induced structures on hyperspheres and products of spheres in a Euclidean
//! space carrying an almost product structure, with numerical checks of the
//! identities they satisfy.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x <= tol)` also rejects NaN

pub mod cli;
pub mod closed_form;
pub mod config;
pub mod error;
pub mod geometry;
pub mod induction;
pub mod report;
pub mod submanifold;
pub mod suite;
pub mod verification;

pub use config::{CaseDescriptor, SuiteConfig};
pub use error::{Error, Result};
pub use geometry::{AmbientStructure, AmbientVector, BlockSwap, Involution, Sign};
pub use induction::{chain_induce, compare_structures, induce_at_point, InducedStructure};
pub use submanifold::{Hypersphere, ManifoldPoint, ProductOfSpheres, Submanifold, TangentVector};
pub use suite::{run_full_suite, SuiteReport};
pub use verification::{IdentityReport, Tolerances};
