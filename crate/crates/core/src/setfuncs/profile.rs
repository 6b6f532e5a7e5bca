use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::Interval;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Representation {
    /// `values[i]` holds on `[breakpoints[i], breakpoints[i+1])`.
    PiecewiseConstant,
    /// `values[i]` is the value at `breakpoints[i]`, linearly interpolated.
    SampledGrid,
}

/// A density on a bounded interval, piecewise constant or piecewise linear.
///
/// JSON form: `{"breakpoints": [...], "values": [...]}`. The representation is
/// inferred from the lengths (one value per piece or one per breakpoint) unless
/// `"representation"` is given explicitly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawProfile", into = "RawProfile")]
pub struct DensityProfile {
    representation: Representation,
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawProfile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    representation: Option<Representation>,
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

impl TryFrom<RawProfile> for DensityProfile {
    type Error = Error;

    fn try_from(raw: RawProfile) -> Result<Self> {
        let repr = match raw.representation {
            Some(r) => r,
            None if raw.values.len() == raw.breakpoints.len() => Representation::SampledGrid,
            None => Representation::PiecewiseConstant,
        };
        DensityProfile::new(repr, raw.breakpoints, raw.values)
    }
}

impl From<DensityProfile> for RawProfile {
    fn from(p: DensityProfile) -> Self {
        RawProfile { representation: Some(p.representation), breakpoints: p.breakpoints, values: p.values }
    }
}

/// A piece of a profile clipped to a query window; the density is linear
/// from `v0` at `x0` to `v1` at `x1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub x0: f64,
    pub x1: f64,
    pub v0: f64,
    pub v1: f64,
}

impl Segment {
    pub fn value(&self, x: f64) -> f64 {
        if self.x1 <= self.x0 {
            return self.v0;
        }
        self.v0 + (self.v1 - self.v0) * (x - self.x0) / (self.x1 - self.x0)
    }

    pub fn integral(&self) -> f64 {
        0.5 * (self.v0 + self.v1) * (self.x1 - self.x0)
    }
}

impl DensityProfile {
    pub fn new(representation: Representation, breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if breakpoints.len() < 2 {
            return Err(Error::Invalid("a profile needs at least two breakpoints".into()));
        }
        if breakpoints.iter().any(|x| !x.is_finite()) || breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Invalid(format!(
                "breakpoints must be finite and strictly increasing, got {breakpoints:?}"
            )));
        }
        let expected = match representation {
            Representation::PiecewiseConstant => breakpoints.len() - 1,
            Representation::SampledGrid => breakpoints.len(),
        };
        if values.len() != expected {
            return Err(Error::Invalid(format!(
                "{representation:?} profile with {} breakpoints needs {expected} values, got {}",
                breakpoints.len(),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Invalid("profile values must be finite".into()));
        }
        Ok(Self { representation, breakpoints, values })
    }

    pub fn piecewise_constant(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        Self::new(Representation::PiecewiseConstant, breakpoints, values)
    }

    pub fn sampled_grid(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        Self::new(Representation::SampledGrid, breakpoints, values)
    }

    pub fn constant(domain: Interval, c: f64) -> Result<Self> {
        Self::piecewise_constant(vec![domain.a(), domain.b()], vec![c])
    }

    /// Linear density from `v0` at `a` to `v1` at `b`.
    pub fn linear(domain: Interval, v0: f64, v1: f64) -> Result<Self> {
        Self::sampled_grid(vec![domain.a(), domain.b()], vec![v0, v1])
    }

    pub fn representation(&self) -> Representation {
        self.representation
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn domain(&self) -> Interval {
        Interval::new(self.breakpoints[0], *self.breakpoints.last().unwrap()).unwrap()
    }

    pub fn n_pieces(&self) -> usize {
        self.breakpoints.len() - 1
    }

    /// Index of the piece containing `x`, clamped to the domain.
    fn piece_index(&self, x: f64) -> usize {
        let i = self.breakpoints.partition_point(|&b| b <= x);
        i.saturating_sub(1).min(self.n_pieces() - 1)
    }

    /// The density on piece `i` as a full segment.
    pub fn piece(&self, i: usize) -> Segment {
        let (x0, x1) = (self.breakpoints[i], self.breakpoints[i + 1]);
        match self.representation {
            Representation::PiecewiseConstant => Segment { x0, x1, v0: self.values[i], v1: self.values[i] },
            Representation::SampledGrid => Segment { x0, x1, v0: self.values[i], v1: self.values[i + 1] },
        }
    }

    /// Right-continuous point value, clamped outside the domain.
    pub fn value(&self, x: f64) -> f64 {
        let seg = self.piece(self.piece_index(x));
        seg.value(x.clamp(seg.x0, seg.x1))
    }

    /// Pieces clipped to `[a, b]`, in order. Empty for an empty window.
    pub fn segments(&self, a: f64, b: f64) -> Vec<Segment> {
        let a = a.max(self.breakpoints[0]);
        let b = b.min(*self.breakpoints.last().unwrap());
        if a >= b {
            return Vec::new();
        }
        let first = self.piece_index(a);
        let mut out = Vec::new();
        for i in first..self.n_pieces() {
            let full = self.piece(i);
            if full.x0 >= b {
                break;
            }
            let x0 = full.x0.max(a);
            let x1 = full.x1.min(b);
            if x1 > x0 {
                out.push(Segment { x0, x1, v0: full.value(x0), v1: full.value(x1) });
            }
        }
        out
    }

    /// Exact `∫_a^b` of the density.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        self.segments(a, b).iter().map(Segment::integral).sum()
    }

    pub fn total(&self) -> f64 {
        let d = self.domain();
        self.integral(d.a(), d.b())
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Nonnegative everywhere and positive almost everywhere.
    pub fn is_positive_ae(&self) -> bool {
        if self.values.iter().any(|&v| v < 0.0) {
            return false;
        }
        match self.representation {
            Representation::PiecewiseConstant => self.values.iter().all(|&v| v > 0.0),
            Representation::SampledGrid => self.values.windows(2).all(|w| w[0] > 0.0 || w[1] > 0.0),
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            representation: self.representation,
            breakpoints: self.breakpoints.clone(),
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    /// Piecewise-constant approximation using the exact mean of each piece.
    pub fn to_piecewise_constant(&self) -> Self {
        match self.representation {
            Representation::PiecewiseConstant => self.clone(),
            Representation::SampledGrid => Self {
                representation: Representation::PiecewiseConstant,
                breakpoints: self.breakpoints.clone(),
                values: self.values.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect(),
            },
        }
    }

    /// Applies `g` to every piece value of a piecewise-constant profile
    /// (exact). Sampled grids are resampled with `refine` points per piece and
    /// the result is piecewise linear in between.
    pub fn map_values(&self, g: impl Fn(f64) -> f64, refine: usize) -> Self {
        match self.representation {
            Representation::PiecewiseConstant => Self {
                representation: self.representation,
                breakpoints: self.breakpoints.clone(),
                values: self.values.iter().map(|&v| g(v)).collect(),
            },
            Representation::SampledGrid => {
                let refine = refine.max(1);
                let mut xs = Vec::with_capacity(self.n_pieces() * refine + 1);
                for w in self.breakpoints.windows(2) {
                    for k in 0..refine {
                        xs.push(w[0] + (w[1] - w[0]) * k as f64 / refine as f64);
                    }
                }
                xs.push(*self.breakpoints.last().unwrap());
                let vs = xs.iter().map(|&x| g(self.value(x))).collect();
                Self { representation: self.representation, breakpoints: xs, values: vs }
            }
        }
    }

    /// Pointwise combination of piecewise-constant profiles on the union of
    /// their breakpoints. All profiles must share the same domain.
    pub fn combine(profiles: &[&DensityProfile], g: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let first = profiles.first().ok_or_else(|| Error::Invalid("nothing to combine".into()))?;
        let dom = first.domain();
        for p in profiles {
            if p.representation != Representation::PiecewiseConstant {
                return Err(Error::Invalid("only piecewise-constant profiles can be combined".into()));
            }
            if p.domain() != dom {
                return Err(Error::Invalid(format!(
                    "profiles have different domains {:?} and {:?}",
                    dom,
                    p.domain()
                )));
            }
        }
        let bps = merged_breakpoints(profiles);
        let mut vals = Vec::with_capacity(bps.len() - 1);
        let mut scratch = vec![0.0; profiles.len()];
        for w in bps.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            for (s, p) in scratch.iter_mut().zip(profiles) {
                *s = p.value(mid);
            }
            vals.push(g(&scratch));
        }
        Self::piecewise_constant(bps, vals)
    }
}

pub(crate) fn merged_breakpoints(profiles: &[&DensityProfile]) -> Vec<f64> {
    let mut bps: Vec<f64> = profiles.iter().flat_map(|p| p.breakpoints.iter().copied()).collect();
    bps.sort_by(f64::total_cmp);
    bps.dedup();
    bps
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infers_representation_from_json() {
        let pc: DensityProfile = serde_json::from_str(r#"{"breakpoints":[0,0.5,1],"values":[2,1]}"#).unwrap();
        assert_eq!(pc.representation(), Representation::PiecewiseConstant);
        let sg: DensityProfile = serde_json::from_str(r#"{"breakpoints":[0,1],"values":[0,1]}"#).unwrap();
        assert_eq!(sg.representation(), Representation::SampledGrid);
        assert!(serde_json::from_str::<DensityProfile>(r#"{"breakpoints":[0,1],"values":[1,2,3]}"#).is_err());
        assert!(serde_json::from_str::<DensityProfile>(r#"{"breakpoints":[1,0],"values":[1]}"#).is_err());
    }

    #[test]
    fn values_and_integrals() {
        let sg = DensityProfile::linear(Interval::unit(), 0.0, 1.0).unwrap();
        assert_eq!(sg.value(0.25), 0.25);
        assert!((sg.integral(0.0, 0.6) - 0.18).abs() < 1e-15);
        let pc = DensityProfile::piecewise_constant(vec![0.0, 0.5, 1.0], vec![2.0, 1.0]).unwrap();
        assert_eq!(pc.value(0.5), 1.0);
        assert_eq!(pc.value(0.49), 2.0);
        assert!((pc.integral(0.25, 0.75) - 0.75).abs() < 1e-15);
        assert_eq!(pc.integral(0.7, 0.7), 0.0);
    }

    #[test]
    fn positivity() {
        assert!(DensityProfile::linear(Interval::unit(), 0.0, 1.0).unwrap().is_positive_ae());
        assert!(!DensityProfile::sampled_grid(vec![0.0, 0.5, 1.0], vec![0.0, 0.0, 1.0]).unwrap().is_positive_ae());
        assert!(!DensityProfile::piecewise_constant(vec![0.0, 1.0], vec![-1.0]).unwrap().is_positive_ae());
    }

    #[test]
    fn combine_merges_breakpoints() {
        let p = DensityProfile::piecewise_constant(vec![0.0, 0.5, 1.0], vec![1.0, 4.0]).unwrap();
        let w = DensityProfile::piecewise_constant(vec![0.0, 0.25, 1.0], vec![1.0, 2.0]).unwrap();
        let s = DensityProfile::combine(&[&p, &w], |v| v[1] / v[0]).unwrap();
        assert_eq!(s.breakpoints(), &[0.0, 0.25, 0.5, 1.0]);
        assert_eq!(s.values(), &[1.0, 2.0, 0.5]);
    }
}
