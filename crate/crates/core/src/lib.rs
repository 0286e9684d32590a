//! Pointwise verification engine for Dirac-geometric identities on
//! Poisson Hamiltonian spaces.
//!
//! The crate is organized in layers:
//! * [`linear_dirac`] — exact-tolerance linear algebra of Lagrangian
//!   subspaces of `V ⊕ V*`, the pointwise calculus;
//! * [`poly`], [`fields`], [`flow`] — tensor fields on chart domains with an
//!   exact polynomial backend and a sampled-closure backend, plus a
//!   fixed-step flow integrator carrying the variational equation;
//! * [`lie`] — structure constants, matrix groups, coadjoint actions and
//!   Lie–Poisson structures;
//! * [`hamiltonian`], [`local_model`], [`coupling`], [`slice`] — the
//!   geometric checks themselves;
//! * [`report`], [`scenarios`] — residual reports and the scenario registry
//!   driven by the CLI.

pub mod coupling;
pub mod error;
pub mod fields;
pub mod flow;
pub mod hamiltonian;
pub mod lie;
pub mod linear_dirac;
pub mod local_model;
pub mod poly;
pub mod report;
pub mod scenarios;
pub mod slice;

pub use error::{GeomError, Result};
