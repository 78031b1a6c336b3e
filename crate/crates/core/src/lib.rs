//! Exact arithmetic for heights over the rationals, the Stern-Brocot tree and
//! Farey intervals, towers of intersection blowups of the projective plane
//! over the line `Y = 0`, and a deterministic scan harness for the gcd
//! inequalities those towers produce.

pub mod error;
pub mod exact;
pub mod harness;
pub mod places;
pub mod stern_brocot;
pub mod tower;

pub use error::{Error, Result};
