#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod barron;
pub mod cosine;
pub mod density;
pub mod diagnostics;
pub mod error;
pub mod harness;
pub mod numerics;

pub use barron::BracketedValue;
pub use error::{Error, Result};
