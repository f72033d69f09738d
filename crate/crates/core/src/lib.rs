pub mod cayley;
pub mod decompose;
pub mod error;
pub mod finite;
pub mod harness;
pub mod involution;
pub mod lattice;
pub mod matrix;
pub mod modlin;
pub mod scalar;
pub mod space;

pub use error::{Error, Result};
pub use matrix::Matrix;
