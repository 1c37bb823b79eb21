//! Conditional term rewriting: unravelings, the SR transformation, bounded
//! reduction engines, simulation checks and soundness-counterexample search.

pub mod alpha;
pub mod classify;
pub mod corpus;
pub mod cp;
pub mod engine;
pub mod format;
pub mod gen;
pub mod homo;
pub mod lab;
pub mod sr;
pub mod suite;
pub mod system;
pub mod term;
pub mod unravel;

pub use system::{Condition, Flavor, Rule, System, SystemError};
pub use term::{Position, Subst, Sym, Term};
