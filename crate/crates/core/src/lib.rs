pub mod efunc;
pub mod error;
pub mod evalnum;
pub mod field;
pub mod formats;
pub mod linalg;
pub mod mahler;
pub mod ore;
pub mod poly;
pub mod relations;

pub use error::{Error, Result};
