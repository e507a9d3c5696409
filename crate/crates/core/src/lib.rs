// `!(x > 0.0)` style checks are meant to reject NaN too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod evaluation;
pub mod general;
pub mod pipeline;
pub mod simple;
pub mod techno;

pub use error::{Error, Result};
