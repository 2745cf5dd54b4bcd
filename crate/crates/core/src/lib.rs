pub mod error;
pub mod graphcut;
pub mod raster;

pub use error::{Error, Result};
pub mod recon;
pub mod probe;
pub mod synth;
pub mod cli;
