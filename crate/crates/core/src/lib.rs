//! Exact free-fermion simulation of a finite chain emptying into a larger
//! environment chain, with the resonant-level analytic limit and a
//! brute-force many-body reference.
//!
//! Start with [`model::ModelParams`], build a [`evolve::Propagator`] and
//! evaluate [`observables::ObservableRecord`]s on its frames. The
//! `examples/` directory walks through each capability.

pub mod error;
pub mod evolve;
pub mod model;
pub mod observables;
pub mod oracle;
pub mod quad;
pub mod rlm;
pub mod scenario;
pub mod spectral;

pub use error::{Error, Result};
pub use evolve::{PropagatedFrame, Propagator, RowCoverage};
pub use model::ModelParams;
pub use observables::ObservableRecord;
