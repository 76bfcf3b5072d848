//! Conversions between continuous games and multi-objective normal-form
//! games (MONFGs) through pure-strategy equivalence, multi-objective
//! fictitious play, and equilibrium checks on both sides.

pub mod catalog;
pub mod equivalence;
pub mod error;
pub mod game;
pub mod hierarchical;
pub mod io;
pub mod solvers;

pub use error::{Error, Result};
