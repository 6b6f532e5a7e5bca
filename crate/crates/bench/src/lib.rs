//! Fixtures shared by the solver benchmarks.

use equipart::setfuncs::{measure_density, sl_first_eigenvalue_sqrt, DensityProfile};
use equipart::sturm::SlProblem;
use equipart::{Interval, SetFunctionDescriptor, SlCoefficients};

/// `p = 1` on the left half and `4` on the right, `q = 0`, `w = 1`.
pub fn two_piece() -> SlCoefficients {
    let pc = |a: f64, b: f64| DensityProfile::piecewise_constant(vec![0.0, 0.5, 1.0], vec![a, b]).unwrap();
    SlCoefficients::new(pc(1.0, 4.0), pc(0.0, 0.0), pc(1.0, 1.0), None).unwrap()
}

pub fn two_piece_problem() -> SlProblem {
    SlProblem::on_domain(two_piece())
}

pub fn sl_family() -> SetFunctionDescriptor {
    sl_first_eigenvalue_sqrt(two_piece())
}

/// Lebesgue–Stieltjes measure of `1 + x` on `(0, 1)`.
pub fn linear_measure() -> SetFunctionDescriptor {
    measure_density(DensityProfile::linear(Interval::unit(), 1.0, 2.0).unwrap()).unwrap()
}
