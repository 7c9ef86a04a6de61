//! Square-free values of univariate integer polynomials.

pub mod arith;
pub mod cli;
pub mod counting;
pub mod density;
pub mod error;
pub mod family;
pub mod intpoly;
pub mod roots;
pub mod verify;

pub use error::{Error, Result};
pub use intpoly::IntPoly;
