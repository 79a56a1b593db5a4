// `!(x > 0.0)` guards reject NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod angular;
pub mod basis;
pub mod constants;
pub mod couplings;
pub mod error;
pub mod gates;
pub mod limits;
pub mod power;
pub mod rabi;
pub mod scattering;
pub mod species;
pub mod zeeman;

pub use angular::HalfInt;
pub use error::{Error, Result};
