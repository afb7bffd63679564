//! Minimum-violation LTL planning over labeled transition systems.
//!
//! Given a transition system and a prioritized list of LTL formulas with
//! rewards, the planner synthesizes an infinite lasso-shaped trace that
//! maximizes the total reward of satisfied formulas. A brute-force
//! subset-enumeration baseline serves as an independent oracle.

pub mod automaton;
pub mod error;
pub mod export;
pub mod graph;
pub mod ltl;
pub mod model;
pub mod oracle;
pub mod planner;
pub mod rescue;
pub mod tableau;
pub mod weighted;

pub use error::{Error, Result};
