//! Verification and search toolkit for laminates of matrix-valued
//! probability measures supported on three-dimensional subspaces of
//! 2×2 and 3×2 matrices.

pub mod chart;
pub mod error;
pub mod hull;
pub mod json;
pub mod lamsearch;
pub mod laminate;
pub mod matrix;
pub mod measure;
pub mod point;
pub mod scenarios;
pub mod separator;
pub mod scalar;
pub mod transport;

pub use error::{Error, Result};
