//! Secure and private information retrieval from codes on the Hermitian curve.

pub mod atlas;
pub mod codes;
pub mod error;
pub mod gf;
pub mod hermitian;
pub mod linalg;
pub mod scheme;
pub mod verify;

pub use error::{Error, Result};
