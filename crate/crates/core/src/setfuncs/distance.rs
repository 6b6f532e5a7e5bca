//! Weighted distance-to-boundary functionals of a subinterval.

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::setfn::{compose_monotone_with_density, Kind, MonotoneMap, Monotonicity, SetFunction, SetFunctionDescriptor};
use crate::setfuncs::Segment;
use crate::setfuncs::DensityProfile;

const QUAD_REL_TOL: f64 = 1e-10;

/// Integrand pieces of `x ↦ ρ(x) d_{∂J}(x)` on `J`: the profile segments,
/// split at the midpoint of `J` where the distance has its kink. The boolean
/// is true on the left half, where `d = x - a`.
fn halves(rho: &DensityProfile, j: Interval) -> Vec<(Segment, bool)> {
    let m = j.midpoint();
    let mut out: Vec<(Segment, bool)> = rho.segments(j.a(), m).into_iter().map(|s| (s, true)).collect();
    out.extend(rho.segments(m, j.b()).into_iter().map(|s| (s, false)));
    out
}

/// Average distance functional `J ↦ ∫_J ρ(x) d_{∂J}(x)^r dx`.
#[derive(Debug, Clone)]
pub struct AvgDistance {
    rho: DensityProfile,
    r: f64,
}

impl AvgDistance {
    pub fn new(rho: DensityProfile, r: f64) -> Result<Self> {
        if !(r >= 1.0 && r.is_finite()) {
            return Err(Error::Invalid(format!("distance exponent must be >= 1, got {r}")));
        }
        if rho.min_value() < 0.0 {
            return Err(Error::Invalid("distance weights must be nonnegative".into()));
        }
        Ok(Self { rho, r })
    }
}

impl SetFunction for AvgDistance {
    fn kind(&self) -> Kind {
        Kind::AvgDistance
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
        let (a, b) = (j.a(), j.b());
        let r = self.r;
        let pieces = halves(&self.rho, j);
        // upper bound on each piece's contribution sets the absolute target
        let scale: f64 = pieces
            .iter()
            .map(|(s, left)| {
                let dmax = if *left { s.x1 - a } else { b - s.x0 };
                s.v0.abs().max(s.v1.abs()) * (s.x1 - s.x0) * dmax.max(0.0).powf(r)
            })
            .sum();
        if scale == 0.0 {
            return Ok(0.0);
        }
        let target = QUAD_REL_TOL * 1e-2 * scale / pieces.len() as f64;
        let mut total = 0.0;
        let mut err = 0.0;
        for (seg, left) in &pieces {
            let out = quadrature::clenshaw_curtis::integrate(
                |x| {
                    let d = if *left { x - a } else { b - x };
                    seg.value(x) * d.max(0.0).powf(r)
                },
                seg.x0,
                seg.x1,
                target,
            );
            total += out.integral;
            err += out.error_estimate;
        }
        if !(err <= QUAD_REL_TOL * total.abs() || err <= QUAD_REL_TOL * 1e-2 * scale) {
            return Err(Error::Numerics(format!(
                "average-distance quadrature on ({a}, {b}) stalled at error {err:e} for value {total:e}"
            )));
        }
        Ok(total)
    }
}

pub fn avg_distance(rho: DensityProfile, r: f64) -> Result<SetFunctionDescriptor> {
    Ok(SetFunctionDescriptor::new(AvgDistance::new(rho, r)?))
}

/// `J ↦ (∫_J ρ d_{∂J}^r)^{1/(r+1)}`: same optimal partitions as
/// [`avg_distance`], but with the positive density
/// `s = (ρ / (2^r (r+1)))^{1/(r+1)}`.
///
/// For sampled-grid weights `s` is resampled at 64 points per piece.
pub fn avg_distance_normalized(rho: DensityProfile, r: f64) -> Result<SetFunctionDescriptor> {
    let base = avg_distance(rho.clone(), r)?;
    let c = 2f64.powf(r) * (r + 1.0);
    let e = 1.0 / (r + 1.0);
    let s = rho.map_values(|v| (v / c).powf(e), 64);
    Ok(compose_monotone_with_density(&base, MonotoneMap::power(e), s))
}

/// Maximum distance functional `J ↦ max_{x ∈ J} ρ(x) d_{∂J}(x)`.
#[derive(Debug, Clone)]
pub struct MaxDistance {
    rho: DensityProfile,
}

impl MaxDistance {
    pub fn new(rho: DensityProfile) -> Result<Self> {
        if rho.min_value() < 0.0 {
            return Err(Error::Invalid("distance weights must be nonnegative".into()));
        }
        Ok(Self { rho })
    }
}

impl SetFunction for MaxDistance {
    fn kind(&self) -> Kind {
        Kind::MaxDistance
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
        let (a, b) = (j.a(), j.b());
        let mut best: f64 = 0.0;
        for (seg, left) in halves(&self.rho, j) {
            // on each piece ρ·d is a quadratic (α + s x)(±x + c); endpoints use
            // the one-sided density so jumps contribute their supremum
            let dist = |x: f64| if left { x - a } else { b - x };
            let prod = |x: f64| seg.value(x) * dist(x).max(0.0);
            best = best.max(prod(seg.x0)).max(prod(seg.x1));
            let h = seg.x1 - seg.x0;
            if h > 0.0 && seg.v1 != seg.v0 {
                let slope = (seg.v1 - seg.v0) / h;
                let alpha = seg.v0 - slope * seg.x0;
                // ρ(x) d(x) = σ (α + slope x)(x - c) with σ = ±1
                let (c, sigma) = if left { (a, 1.0) } else { (b, -1.0) };
                if sigma * slope < 0.0 {
                    let x = (slope * c - alpha) / (2.0 * slope);
                    if x > seg.x0 && x < seg.x1 {
                        best = best.max(prod(x));
                    }
                }
            }
        }
        Ok(best)
    }

    fn rn_density(&self, x: f64) -> Option<f64> {
        Some(0.5 * self.rho.value(x))
    }

    fn rn_profile(&self) -> Option<DensityProfile> {
        Some(self.rho.scaled(0.5))
    }

    fn dominator(&self, _x: f64) -> Option<f64> {
        Some(0.5 * self.rho.max_value())
    }
}

pub fn max_distance(rho: DensityProfile) -> Result<SetFunctionDescriptor> {
    Ok(SetFunctionDescriptor::new(MaxDistance::new(rho)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_const() -> DensityProfile {
        DensityProfile::constant(Interval::unit(), 1.0).unwrap()
    }

    /// `∫_J (α + βx) d(x)^r`, integrated in closed form half by half.
    fn avg_closed_form(alpha: f64, beta: f64, r: f64, a: f64, b: f64) -> f64 {
        let h = 0.5 * (b - a);
        // left half: x = a + u, right half: x = b - u, u ∈ [0, h]
        let half = |base: f64, sign: f64| {
            (alpha + beta * base) * h.powf(r + 1.0) / (r + 1.0) + sign * beta * h.powf(r + 2.0) / (r + 2.0)
        };
        half(a, 1.0) + half(b, -1.0)
    }

    #[test]
    fn avg_distance_closed_forms() {
        let f1 = avg_distance(unit_const(), 1.0).unwrap();
        assert!((f1.evaluate(Interval::unit()).unwrap() - 0.25).abs() < 1e-12);
        let f2 = avg_distance(unit_const(), 2.0).unwrap();
        assert!((f2.evaluate(Interval::unit()).unwrap() - 1.0 / 12.0).abs() < 1e-12);
        assert_eq!(f2.evaluate(Interval::empty_at(0.4)).unwrap(), 0.0);

        let rho = DensityProfile::linear(Interval::unit(), 1.0, 2.0).unwrap();
        for &r in &[1.0, 1.5, 2.0, 3.7] {
            let f = avg_distance(rho.clone(), r).unwrap();
            for &(a, b) in &[(0.0, 1.0), (0.1, 0.35), (0.6, 0.61)] {
                let got = f.evaluate(Interval::new(a, b).unwrap()).unwrap();
                let want = avg_closed_form(1.0, 1.0, r, a, b);
                assert!((got - want).abs() <= 1e-10 * want, "r={r} ({a},{b}): {got} vs {want}");
            }
        }
    }

    #[test]
    fn avg_distance_not_additive() {
        let f = avg_distance(unit_const(), 1.0).unwrap();
        let whole = f.evaluate(Interval::unit()).unwrap();
        let halves = f.evaluate(Interval::new(0.0, 0.5).unwrap()).unwrap()
            + f.evaluate(Interval::new(0.5, 1.0).unwrap()).unwrap();
        assert!((whole - 0.25).abs() < 1e-12);
        assert!((halves - 0.125).abs() < 1e-12);
    }

    #[test]
    fn normalized_avg_distance_is_linear_in_length() {
        let f = avg_distance_normalized(unit_const(), 1.0).unwrap();
        let v = f.evaluate(Interval::new(0.2, 0.6).unwrap()).unwrap();
        assert!((v - 0.2).abs() < 1e-12);
        assert!((f.rn_density(0.3).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn max_distance_examples() {
        let f = max_distance(unit_const()).unwrap();
        assert!((f.evaluate(Interval::unit()).unwrap() - 0.5).abs() < 1e-15);
        assert!((f.evaluate(Interval::new(0.2, 0.6).unwrap()).unwrap() - 0.2).abs() < 1e-15);
        assert_eq!(f.evaluate(Interval::empty_at(0.2)).unwrap(), 0.0);

        let step = DensityProfile::piecewise_constant(vec![0.0, 0.5, 1.0], vec![2.0, 1.0]).unwrap();
        let g = max_distance(step).unwrap();
        assert!((g.evaluate(Interval::unit()).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn max_distance_matches_dense_scan() {
        let rho = DensityProfile::sampled_grid(vec![0.0, 0.3, 0.7, 1.0], vec![0.2, 3.0, 0.5, 2.0]).unwrap();
        let f = max_distance(rho.clone()).unwrap();
        for &(a, b) in &[(0.0, 1.0), (0.1, 0.5), (0.25, 0.95), (0.65, 0.72)] {
            let j = Interval::new(a, b).unwrap();
            let n = 200_000;
            let scan = (0..=n)
                .map(|i| {
                    let x = a + (b - a) * i as f64 / n as f64;
                    rho.value(x) * (x - a).min(b - x)
                })
                .fold(0.0, f64::max);
            let got = f.evaluate(j).unwrap();
            assert!(got >= scan - 1e-12 && got - scan < 1e-8, "({a},{b}): {got} vs {scan}");
        }
    }

    #[test]
    fn max_distance_not_additive() {
        // constant weights give L/2, which is additive; a step weight is not
        let step = DensityProfile::piecewise_constant(vec![0.0, 0.5, 1.0], vec![2.0, 1.0]).unwrap();
        let f = max_distance(step).unwrap();
        let whole = f.evaluate(Interval::unit()).unwrap();
        let parts = f.evaluate(Interval::new(0.0, 0.5).unwrap()).unwrap()
            + f.evaluate(Interval::new(0.5, 1.0).unwrap()).unwrap();
        assert!((whole - 1.0).abs() < 1e-15);
        assert!((parts - 0.75).abs() < 1e-15);
    }
}
