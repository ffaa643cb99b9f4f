pub mod cli;
pub mod constructions;
pub mod error;
pub mod h1;
pub mod modular;
pub mod nearring;
pub mod pcgroup;
pub mod search;

pub use error::{Error, Result};
