//! Command-line front end: scenario parsing, verifier runs and report files.

pub mod emit;
pub mod error;
pub mod run;
pub mod scenario;
