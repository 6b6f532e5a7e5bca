//! Optimal minimax and maximin partitions of an interval for monotone
//! set-functions, with the spectral and asymptotic checks that go with them.

pub mod error;
pub mod interval;
pub mod setfn;
pub mod setfuncs;
pub mod asymptotics;
pub mod equalize;
pub mod sturm;

pub use error::{Error, Result};
pub use interval::{find_inclusion_indices, Interval, Partition};
pub use setfn::{
    compatible, compose_monotone, compose_monotone_with_density, reciprocal, Direction, Kind, MonotoneMap,
    Monotonicity, SetFunction, SetFunctionDescriptor,
};
pub use setfuncs::{DensityProfile, Representation, SlCoefficients};
pub use sturm::{EigenResult, Eigenfunction, SlProblem};
pub use equalize::{solve_maximin, solve_minimax, Objective, SolveResult, SolverConfig};
