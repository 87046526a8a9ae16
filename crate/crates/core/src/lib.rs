pub mod catalog;
pub mod chartype;
pub mod cli;
pub mod endoring;
pub mod error;
pub mod group;
pub mod linalg;
pub mod oracle;
pub mod primesym;
pub mod qmath;
pub mod spec;
pub mod transit;

pub use error::{Error, Result};
