pub mod cli;
pub mod container;
pub mod error;
pub mod fiberization;
pub mod model;
pub mod numerics;
pub mod reduction;

pub use error::{Error, Result};
