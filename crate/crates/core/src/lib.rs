//! Non-orthogonal joint diagonalization of complex matrix sets.
//!
//! Given `M_k ≈ A D_k Aᴴ`, find `V` with every `V M_k Vᴴ` (nearly) diagonal.
//! [`cjdi::cjdi`] works directly on the Hermitian split of the targets with
//! two structure-preserving Givens/Shear rotation families per index pair;
//! [`jdi::basic_generalized_jdi`] runs a real Jacobi-like sweep on the
//! `2N × 2N` real embedding and pairs the columns back afterwards.

pub mod bench;
pub mod cjdi;
pub mod embedding;
pub mod error;
pub mod format;
pub mod jdi;
pub mod linalg;
pub mod metrics;
pub mod problemgen;
pub mod rotations;
pub mod selftest;

pub use cjdi::{cjdi, mixing_estimate, CjdiSolver, ComplexDiagonalizer};
pub use embedding::{hermitian_split, real_embed, real_unembed, HermitianSet, RealEmbeddedSet, TargetSet, Truth};
pub use error::{NojdError, Result};
pub use jdi::{basic_generalized_jdi, jdi_modified, pair_columns, RunReport, SweepConfig};
pub use linalg::{CMatrix, RMatrix};
pub use problemgen::{generate, generate_run, ProblemInstance, ScenarioSpec};
pub use rotations::{solve_rotation, CriterionMatrix, Family, Rotation, RotationSolution};
