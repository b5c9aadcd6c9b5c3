//! Exact tools for the discrete tomography of cyclotomic Delone sets.

pub mod error;
pub mod construct;
pub mod crossratio;
pub mod dirsearch;
pub mod exactnum;
pub mod geometry;
pub mod modelset;
pub mod tomo;

pub use error::{Error, Result};
pub use exactnum::{CycNum, FieldTag, Rational};
