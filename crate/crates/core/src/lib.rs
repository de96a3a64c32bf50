//! Exact structural invariants of Pfaffian systems and first-order PDE systems.
//!
//! Coefficients are multivariate rational functions over ℚ, so every zero test
//! is exact. The main entry points are [`pfaffian`] for derived flags, classes,
//! characters and gender, [`contact`] for jet-space Hamiltonian calculus, and
//! [`formlang`] for the text format and JSON reports.

pub mod cancel;
pub mod catalog;
pub mod contact;
pub mod error;
pub mod exterior;
pub mod formlang;
pub mod linalg;
pub mod pfaffian;
pub mod poly;
pub mod rational;

pub use cancel::CancelToken;
pub use error::EdsError;
pub use exterior::{Chart, Form, PointAssignment, VectorField};
pub use pfaffian::PfaffianSystem;
pub use rational::RationalFunction;
