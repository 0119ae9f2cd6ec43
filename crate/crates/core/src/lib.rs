//! Exact SDP relaxations of nonconvex QCQPs: constraint builders, instance
//! generators, condition checks, an interior-point solver and rank-1
//! extraction.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constraints;
pub mod error;
pub mod extract;
pub mod format;
pub mod instances;
pub mod linalg;
pub mod sdp;
pub mod symmat;
pub mod verify;

pub use constraints::{Constraint, Transform3};
pub use error::{Error, Result};
pub use extract::{CasePath, ExtractionResult};
pub use format::InstanceFile;
pub use instances::{ConstraintSet, QcqpInstance};
pub use sdp::{SdpSolution, SolverOptions, Status};
pub use linalg::Mat;
pub use symmat::{EigenDecomposition, Rank1Decomposition, SymMatrix};
