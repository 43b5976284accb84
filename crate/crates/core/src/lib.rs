//! Signal-free coordination of connected automated vehicles at a
//! four-arm intersection with left, straight and right movements.
//!
//! Vehicles announce themselves on entering the control zone, are assigned
//! merging-zone entry and exit times by a first-come queue, and then follow
//! closed-form energy-optimal trajectories: an affine-control profile in the
//! control zone and a fuel/comfort weighted profile in the merging zone.

pub mod cli;
pub mod cz;
pub mod error;
pub mod geometry;
pub mod io;
pub mod mz;
pub mod numeric;
pub mod pareto;
pub mod scheduler;
pub mod sim;

pub use cz::{check_feasibility, solve_cz, CzTrajectory, FeasibilityReport};
pub use error::{Error, GeometryError, Result, SolveError};
pub use geometry::{classify, Arm, ConflictClass, IntersectionGeometry, Movement, Turn, TurnTimes};
pub use mz::{
    mz_costs, solve_mz_fuel, solve_mz_jerk, solve_mz_weighted, MzBoundary, MzCosts, MzTrajectory,
};
pub use pareto::{default_grid, frontier, sweep, ParetoRun};
pub use scheduler::{schedule, BindingCase, QueueState, Schedule, VehicleSpec};
pub use sim::{run, SimConfig, SimRun};
