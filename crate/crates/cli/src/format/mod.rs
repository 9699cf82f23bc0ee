//! Text formats read and written by the command line.

pub mod dot;
pub mod fdg;
pub mod nfg;

pub use dot::{emit_dot, DotOptions};
pub use fdg::{parse_fdg, serialize_fdg, FdgDocument, FdgError};
pub use nfg::{parse_nfg, NfgError};
