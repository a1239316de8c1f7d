//! Exact F_p machinery for checking spectral-sequence computations of
//! topological Hochschild homology: bigraded algebras, Tor, pages and
//! differentials, presentations, long exact sequences, and a scenario runner.

pub mod error;
pub mod field;
pub mod fp_linalg;
pub mod graded_algebra;
pub mod les_checker;
pub mod presentation;
pub mod scenarios;
pub mod spectral_sequence;
pub mod tor_engine;

pub use error::{Error, Result};
pub use field::PrimeField;
