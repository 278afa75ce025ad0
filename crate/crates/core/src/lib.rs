// NaN must fail the positivity checks, and index loops mirror the formulas.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod arith;
pub mod characters;
pub mod error;
pub mod explicit;
pub mod family;
pub mod pipeline;
pub mod primes;
pub mod sync;
pub mod variance;
pub mod zeros;

pub use error::{Error, Result};
