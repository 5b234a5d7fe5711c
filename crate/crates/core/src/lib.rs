//! Pure-tone standing modes of a fixed elliptic membrane.
pub mod cli;
pub mod error;
pub mod geometry;
pub mod mathieu;
pub mod modes;
pub mod qsolve;

pub use error::{Error, Result};
