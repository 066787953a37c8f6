pub mod artifact;
pub mod bench;
pub mod error;
pub mod gapped;
pub mod gen;
pub mod jumbled;
pub mod persist;
pub mod reporting;
pub mod set;
pub mod smallest_shift;
pub mod ssi;
pub mod stats;
pub mod text;
pub mod verify;

pub use error::{Error, ErrorClass, Result};
