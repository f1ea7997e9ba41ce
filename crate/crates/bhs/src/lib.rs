//! Verification harness, JSONL traces and the command line front end for
//! the black hole search simulator in `bhs-core`.

pub mod cli;
pub mod harness;
pub mod trace;
