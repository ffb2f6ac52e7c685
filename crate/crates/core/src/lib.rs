// `!(x >= lo)` guards are deliberate: they reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod harness;
pub mod kernel;
pub mod multipliers;
pub mod norms;
pub mod quadrature;
pub mod radial;
pub mod special;
pub mod square;
pub mod sphere;
pub mod wavefield;

pub use error::{Error, Result};
