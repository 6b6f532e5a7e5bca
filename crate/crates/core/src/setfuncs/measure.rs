use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::setfn::{compose_monotone, Kind, MonotoneMap, Monotonicity, SetFunction, SetFunctionDescriptor};
use crate::setfuncs::DensityProfile;

/// Absolutely continuous measure `μ(J) = ∫_J ρ`.
#[derive(Debug, Clone)]
pub struct MeasureDensity {
    rho: DensityProfile,
}

impl MeasureDensity {
    pub fn new(rho: DensityProfile) -> Result<Self> {
        if rho.min_value() < 0.0 {
            return Err(Error::Invalid("measure densities must be nonnegative".into()));
        }
        Ok(Self { rho })
    }

    pub fn density(&self) -> &DensityProfile {
        &self.rho
    }
}

impl SetFunction for MeasureDensity {
    fn kind(&self) -> Kind {
        Kind::MeasureDensity
    }

    fn domain(&self) -> Interval {
        self.rho.domain()
    }

    fn monotonicity(&self) -> Monotonicity {
        Monotonicity::increasing(self.rho.is_positive_ae())
    }

    fn empty_value(&self) -> f64 {
        0.0
    }

    fn eval_nonempty(&self, j: Interval) -> Result<f64> {
        Ok(self.rho.integral(j.a(), j.b()))
    }

    fn rn_density(&self, x: f64) -> Option<f64> {
        Some(self.rho.value(x))
    }

    fn rn_profile(&self) -> Option<DensityProfile> {
        Some(self.rho.clone())
    }

    fn dominator(&self, _x: f64) -> Option<f64> {
        // cell averages never exceed the supremum
        Some(self.rho.max_value())
    }
}

pub fn measure_density(rho: DensityProfile) -> Result<SetFunctionDescriptor> {
    Ok(SetFunctionDescriptor::new(MeasureDensity::new(rho)?))
}

/// Lebesgue measure restricted to `domain`.
pub fn lebesgue(domain: Interval) -> Result<SetFunctionDescriptor> {
    measure_density(DensityProfile::constant(domain, 1.0)?)
}

/// `J ↦ L(J)^e`, a strictly increasing function of length alone.
pub fn length_power(domain: Interval, e: f64) -> Result<SetFunctionDescriptor> {
    if !(e > 0.0 && e.is_finite()) {
        return Err(Error::Invalid(format!("length exponent must be positive, got {e}")));
    }
    Ok(compose_monotone(&lebesgue(domain)?, MonotoneMap::power(e)))
}
