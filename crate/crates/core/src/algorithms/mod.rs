//! The three black hole search controllers and their shared pieces.

pub mod analyze;
pub mod audit;
pub mod bhs32;
pub mod bhs33;
pub mod bhs42;
pub mod common;

pub use bhs32::Bhs32;
pub use bhs33::Bhs33;
pub use bhs42::Bhs42;

/// Big-step length shipped with the three-agent algorithm.
pub const DEFAULT_MAGIC_NUMBER: u32 = 35;
