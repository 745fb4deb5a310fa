//! Program and key data model.

mod angle;
mod format;
mod key;
mod program;

pub use angle::Angle;
pub use format::{parse_key, parse_program, serialize_key, serialize_program, FORMAT_VERSION};
pub use key::SecretKey;
pub use program::{bias_from_correlation, IqpProgram, Partition};
