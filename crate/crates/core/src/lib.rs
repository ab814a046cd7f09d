// Negated comparisons below are deliberate: they reject NaN along with
// out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cli;
pub mod error;
pub mod estimation;
pub mod numerics;
pub mod homodyne;
pub mod io;
pub mod reconstruction;
pub mod states;

pub use error::{Error, Result};
