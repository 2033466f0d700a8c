//! Online planning for stochastic contingent planning tasks with POMCP and
//! delete-relaxation rollout heuristics.

pub mod belief;
pub mod bitset;
pub mod domains;
pub mod harness;
pub mod heuristics;
pub mod model;
pub mod parser;
pub mod pomcp;
