//! Swarm shepherding simulator and genetic reinforcement-learning engine.
//!
//! A shepherd agent steers a Strömbom-style flock of sheep towards a goal.
//! The shepherd is either scripted (the classic collect/drive heuristic) or
//! a small feedforward network evolved with a self-adaptive Pareto
//! differential evolution loop. Networks are trained against decomposed
//! per-skill reward functions (collect, drive, or both at once) or against
//! a simple metric-based baseline reward.
//!
//! Module map:
//!
//! - [`geometry`]: vectors, world state and shared geometric primitives.
//! - [`sheep`]: per-step flock dynamics.
//! - [`scripted`]: behaviour switch, collecting/driving points and the scripted shepherd.
//! - [`controller`]: genome layout, input encoding and network evaluation.
//! - [`reward`]: collection, driving and baseline reward functions.
//! - [`evolution`]: non-dominated selection, differential breeding and the generation loop.
//! - [`episode`]: environment setup, the episode loop and trace files.
//! - [`experiment`]: batch runs, statistics, heat maps and run artifacts.
//! - [`config`]: the flat `key = value` experiment configuration format.
//! - [`cli`]: the `shepherd` command line front end.

pub mod cli;
pub mod config;
pub mod controller;
pub mod episode;
mod error;
pub mod evolution;
pub mod experiment;
pub mod geometry;
pub mod reward;
pub mod scripted;
pub mod seeds;
pub mod sheep;

pub use error::{Error, Result};
