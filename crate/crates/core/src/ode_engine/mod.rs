//! Numerical solution of the radial mode equations.
//!
//! The equations have a regular singular point at `r = 0` and an Euler-type
//! one at infinity, so everything is integrated in `t = log r`, where the
//! coefficients are smooth and bounded.

mod frobenius;
mod growth;
mod identities;
mod rk;
mod solve;
mod trajectory;

pub use frobenius::FrobeniusSeries;
pub use growth::{bounded_on_tail, growth_exponent, GrowthEstimate, GrowthKind, LOG_FIT_THRESHOLD};
pub use identities::{lagrange_identity_residual, wronskian_against, wronskian_between, wronskian_drift, LagrangeResidual};
pub use solve::{
    anchor_radius, base_solution, base_zero, default_range, excluded_neighborhood, integrate_regular, second_solution, SecondSolutionMethod,
    DEFAULT_R_END, DEFAULT_R_START,
};
pub use trajectory::{LaunchType, Sample, SolutionTrajectory, TrajectoryOptions, K_MAX_SUPPORTED};
