//! Vector coherent states over matrix domains, with numerical certification.

pub mod fock;
pub mod linalg;
pub mod matrixdomain;
pub mod quad;
pub mod specfun;
pub mod suite;
pub mod vcs;
pub mod verify;

pub use linalg::{CMat, CVec};
