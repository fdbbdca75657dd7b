#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cli;
pub mod error;
pub mod geometry;
pub mod quadrature;
pub mod seminorm;
pub mod theorems;
pub mod young;

pub use error::{Error, Result};
