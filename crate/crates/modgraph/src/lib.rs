//! Graph complexes of stable and prestable ribbon graphs, their homology,
//! and Feynman amplitudes built from contractible Frobenius algebras.

#![allow(clippy::needless_range_loop, clippy::type_complexity)]

pub mod amplitude;
pub mod canon;
pub mod cli;
pub mod complexes;
pub mod error;
pub mod frobenius;
pub mod graphs;
pub mod linalg;
pub mod perm;
pub mod pool;
pub mod ribbon;

pub use error::{Error, Result};
