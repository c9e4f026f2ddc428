pub mod cli;
pub mod drift;
pub mod error;
pub mod inference;
pub mod io;
pub mod numerics;
pub mod similarity;
pub mod stability;
pub mod synthetic;
pub mod validate;

pub use error::{Error, Result};
