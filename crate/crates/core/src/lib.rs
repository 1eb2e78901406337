// `!(x >= y)` is used on purpose so that NaN is rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod abscissa;
pub mod characters;
pub mod error;
pub mod frequency;
pub mod io;
pub mod lattice;
pub mod norms;
pub mod number_theory;
pub mod polynomial;
pub mod precision;
pub mod rational;
pub mod tail;
pub mod verify;

pub use error::{Error, Result};
