//! Tent-map inverse limits: dynamics, composants, chains, folding points and
//! isotopies of the space `(I, T_s)^∞` for slopes `s ∈ [√2, 2]`.

pub mod chains;
pub mod error;
pub mod folding;
pub mod interval;
pub mod invlim;
pub mod isotopy;
pub mod num;
pub mod report;
pub mod tentmap;
pub mod verify;

pub use error::{Error, Result};
pub use interval::Interval;
pub use num::{Approx, Scalar};
pub use num_rational::BigRational;
pub use tentmap::TentMap;
