//! Stable translation lengths, joint stable lengths and dilations for
//! isometric actions of free groups.

pub mod actions;
pub mod bounds;
pub mod error;
pub mod jsl;
pub mod linalg;
pub mod spaces;
pub mod words;

pub use error::{Error, Result};
