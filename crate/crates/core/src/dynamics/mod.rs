//! Time propagation: RPMD with an exact normal-mode substep, CMD on a
//! tabulated centroid force, and the one-bead classical limit.

mod cmd;
mod rpmd;
mod spline;

pub use cmd::{
    build_centroid_force_table, centroid_momentum_draw, cmd_trajectory, CentroidForceTable,
    PhaseSpaceSeries,
};
pub use rpmd::{
    classical_trajectory, rpmd_step, rpmd_trajectory, IntegratorConfig, Propagator, Trajectory,
};
pub use spline::CubicSpline;
