//! Exact construction and verification of the polynomial symmetries of the
//! classical and quantum Lissajous system on the sphere, with numerical
//! oracles (trajectory integration and finite-difference spectra).

pub mod classical;
pub mod cli;
pub mod diffop;
pub mod dynamics;
pub mod error;
pub mod oracle;
pub mod poly;
pub mod quantum;
pub mod reference;
pub mod report;
pub mod spectral;
pub mod symexpr;

pub use classical::{ClassicalSymmetrySet, RationalK, Sign};
pub use diffop::DiffOp;
pub use dynamics::{PhaseState, Trajectory};
pub use error::{Error, Result};
pub use quantum::QuantumSymmetrySet;
pub use report::{Status, VerificationReport};
pub use symexpr::{PhaseExpr, TrigCoeff};
