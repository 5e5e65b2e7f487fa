//! Role mining on user-permission access matrices.
//!
//! The pipeline mines a minimum-size (or provably constructed near-minimum)
//! set of RBAC roles from a bipartite access matrix:
//!
//! 1. [`reduction`] removes dominated structure and emits forced roles;
//! 2. [`enumeration`] lazily enumerates the maximal bicliques of what is
//!    left and classifies the instance as easy or hard by their count;
//! 3. [`cover`] builds a set-cover instance over the maximal bicliques and
//!    solves it exactly (easy instances), with LP-file export for external
//!    MILP solvers and a decision-version binary-search baseline;
//! 4. [`pricing`] is the column-generation variant working from LP duals;
//! 5. [`heuristics`] handles hard instances: large maximal bicliques as
//!    roles, a greedy/lattice baseline, and user-partition pieces for the
//!    hardest inputs.
//!
//! [`graph`] holds the data model; [`policy`] the mined output and its
//! soundness check; [`report`] the per-run statistics.

pub mod cover;
pub mod enumeration;
pub mod error;
pub mod graph;
pub mod heuristics;
pub mod io;
pub mod lp;
pub mod policy;
pub mod pricing;
pub mod progress;
pub mod reduction;
pub mod report;

pub use error::{Error, Result};
pub use graph::{AccessMatrix, Biclique, EdgeId, EdgeSet};
pub use policy::{verify_policy, Provenance, RbacPolicy, Role, VerificationReport};
pub use progress::Progress;
