//! SAT encodings and tooling for antipodal 2-colorings of the hypercube.

pub mod alternating;
pub mod bounds;
pub mod cnf;
pub mod encode;
pub mod error;
pub mod geodesic;
pub mod hypercube;
pub mod oracle;
pub mod report;
pub mod solver;
pub mod verify;

pub use error::{Error, Result};
