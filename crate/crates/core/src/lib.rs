pub mod config;
pub mod entropic;
pub mod error;
pub mod fuzz;
pub mod linalg;
pub mod oracle;
pub mod perm;
pub mod problem;
pub mod product;
pub mod quantum;
pub mod report;
pub mod scenarios;
pub mod sum;
pub mod sweep;
pub mod tolerance;

pub use error::{Error, Result};
