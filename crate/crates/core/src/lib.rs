//! Simulation laboratory for endpoint capacitated flow scheduling (ECFS).
//!
//! Jobs are node pairs with a demand and a release round; in every round the
//! demand executed at a node may not exceed its (possibly augmented)
//! capacity. The crate provides:
//!
//! * [`model`], [`format`], [`validate`]: instances, schedules, their text
//!   formats and an independent checker;
//! * [`sim`]: the online round protocol and the [`sim::Scheduler`] trait;
//! * [`schedulers`]: proportional allocation, batch decomposition, FIFO
//!   maximal matching, shortest job first and their hybrid;
//! * [`metrics`]: response times, ℓp sums, makespan, CSV rows;
//! * [`bounds`]: the interval lower bound and an exhaustive optimal oracle;
//! * [`graph`]: 2-factor decomposition of multigraphs;
//! * [`adversaries`]: the adaptive chain adversary and fixed hard families;
//! * [`cli`]: the `ecfs` command-line front end.
//!
//! All arithmetic is exact ([`rational::Rational`]).

pub mod adversaries;
pub mod bounds;
pub mod cli;
pub mod format;
pub mod generate;
pub mod graph;
pub mod metrics;
pub mod model;
pub mod rational;
pub mod schedulers;
pub mod sim;
pub mod trace;
pub mod validate;

pub use model::{Instance, Job, JobSpec, Schedule};
pub use rational::Rational;
