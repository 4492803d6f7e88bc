#![allow(clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fourier;
pub mod harness;
pub mod identities;
pub mod kernels;
pub mod mc;
pub mod quadrature;
pub mod specfun;
pub mod subordinator;

pub use error::{Error, Result};
