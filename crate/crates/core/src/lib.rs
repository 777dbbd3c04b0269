pub mod cli;
pub mod domain;
pub mod envelope;
pub mod error;
pub mod expr;
pub mod extrapolate;
pub mod geodesics;
pub mod green;
pub mod julia;
pub mod kernels;
pub mod linalg;
pub mod reproducing;

pub use error::{Error, Result};
