pub mod ansatz;
pub mod chem;
pub mod error;
pub mod objective;
pub mod optim;
pub mod pauli;
pub mod report;

pub use error::{Error, Result};
