//! Black hole search on anonymous oriented tori: world model, agent model,
//! lock-step scheduler and the search controllers.

#![no_std]

extern crate alloc;

pub mod agent;
pub mod algorithms;
pub mod scheduler;
pub mod torus;

pub use agent::{Action, Badge, Controller, Declaration, Perception, Phase};
pub use scheduler::{run, run_observed, Algorithm, RunOptions, RunResult, Scenario, ScenarioError, Verdict};
pub use torus::{Coord, Direction, TorusDims, World};
