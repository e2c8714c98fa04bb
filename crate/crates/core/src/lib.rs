pub mod coupling;
pub mod em;
pub mod error;
pub mod estimation;
pub mod harness;
pub mod linalg;
pub mod multiuser;
pub mod quadrature;
pub mod special;
pub mod strategies;

pub use error::{Error, Result};
