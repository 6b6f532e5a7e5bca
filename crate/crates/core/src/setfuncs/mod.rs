//! Built-in set-functions: weighted measures, distance functionals and the
//! first Dirichlet eigenvalue.

mod distance;
mod eigen;
mod measure;
mod profile;

pub use distance::{avg_distance, avg_distance_normalized, max_distance, AvgDistance, MaxDistance};
pub use eigen::{
    minimal_beta, sl_first_eigenvalue_sqrt, sl_first_eigenvalue_sqrt_with_tol, CoeffPiece, SlCoefficients,
    SlFirstEigenvalueSqrt, SET_FUNCTION_TOL,
};
pub use measure::{lebesgue, length_power, measure_density, MeasureDensity};
pub use profile::{DensityProfile, Representation, Segment};
pub(crate) use profile::merged_breakpoints;
