//! Best responses, multi-objective fictitious play and equilibrium checks.

mod best_response;
mod fictitious_play;
mod search;
mod verify;

pub use best_response::{best_response, BestResponse};
pub use fictitious_play::{fictitious_play, trial_rng, FpConfig, Trajectory, TrajectoryPoint};
pub use search::{grid_resolution, maximize_on_simplex, BestResponseConfig, SimplexMax, MAX_GRID_POINTS, TIE_TOL};
pub use verify::{
    continuous_deviation_gains, map_equilibrium, verify_continuous_ne, verify_ne, FiniteMeasure, JointStrategy,
    MapDirection, NeReport,
};
