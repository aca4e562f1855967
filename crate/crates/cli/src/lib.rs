//! Std side of the XCRUSH tools: command-line interface, benchmark harness,
//! known-answer runner and report formats. The cipher itself lives in the
//! `no_std` [`xcrush`] crate.

pub mod bench;
pub mod cli;
pub mod kat;
pub mod report;
