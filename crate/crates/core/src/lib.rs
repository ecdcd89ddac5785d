// range checks are written so that NaN fails them
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod ball;
pub mod error;
pub mod gamma;
pub mod grid;
pub mod group;
pub mod hyperbolic;
pub mod hypergeometric;
pub mod quadrature;
pub mod report;
pub mod spectral;
pub mod spherical;

pub use error::{Error, Result};
