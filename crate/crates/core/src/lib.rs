pub mod cluster;
pub mod error;
pub mod generators;
pub mod potential;
pub mod polyfinder;
pub mod puiseux;
pub mod richness;
pub mod valuations;

pub use error::{CoreError, Result};
