pub mod arith;
pub mod burnside;
pub mod chartab;
pub mod classes;
pub mod decide;
pub mod error;
pub mod oracle;
pub mod verify;

pub use error::{Error, Result};
