pub mod analysis;
pub mod cli;
pub mod closedform;
pub mod dynamics;
pub mod error;
pub mod model;
pub mod ode;
pub mod quad;
pub mod spectra;
pub mod volterra;

pub use error::{Error, Result};
