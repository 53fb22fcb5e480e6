//! Numerical toolkit for two-party Bell scenarios with two measurement
//! settings on one side.
//!
//! * [`matlin`]: dense complex Hermitian linear algebra (Jacobi eigensolver,
//!   trace norm, matrix square root, tensor products, partial traces).
//! * [`states`]: density matrices, POVMs, ensembles, trace distance,
//!   fidelity, steering and seeded random sampling.
//! * [`rti`]: the reverse triangle inequality for quantum and classical
//!   states, its extremal family and randomized verifiers.
//! * [`boxes`]: measurement scenarios, boxes, deterministic strategies and
//!   Bell functionals.
//! * [`decomp`]: fraction of determinism, classical fraction via a dense
//!   two-phase simplex solver, and the resulting Bell bound.
//! * [`bounds`]: the steering lemmas, the universal lower bound on the
//!   fraction of determinism of quantum boxes and the binary-outcome
//!   refinement.
//! * [`report`]: reproducible report tables used by the `nonlocal` binary.

pub mod boxes;
pub mod bounds;
pub mod decomp;
pub mod error;
pub mod matlin;
pub mod report;
pub mod rti;
pub mod states;

pub use error::{Error, Result};
