//! Optimal polynomial approximants and metric projections in Hardy spaces.

pub mod cli;
pub mod dual;
pub mod error;
pub mod function;
pub mod grid;
pub mod objective;
pub mod opa;
pub mod orthogonality;
pub mod projection;
pub mod roots;
pub mod wire;

pub use error::{Error, Result};
