//! Tensor semidefinite programming over the T-product algebra.

pub mod calculus;
pub mod cli;
pub mod csdp;
pub mod error;
pub mod polyopt;
pub mod selftest;
pub mod spectral;
pub mod tcore;
pub mod tsdp;

pub use error::{Error, Result};
pub use tcore::{Tensor3, C64};
