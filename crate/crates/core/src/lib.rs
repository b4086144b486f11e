pub mod error;
pub mod flags;
pub mod graph;
pub mod par;
pub mod perm;
pub mod poly;
pub mod rational;
pub mod sdp;
pub mod symrep;
pub mod verify;

pub use error::{Error, Result};
