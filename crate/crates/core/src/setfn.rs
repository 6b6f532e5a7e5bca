//! The set-function contract: monotone, continuous maps from subintervals to `[0, +∞]`.
//!
//! Extended reals are plain `f64` with `+∞`. The reciprocal transform uses
//! `1/0 = +∞` and `1/∞ = 0` throughout.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::setfuncs::DensityProfile;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Increasing,
    Decreasing,
}

impl Direction {
    pub fn reversed(self) -> Self {
        match self {
            Direction::Increasing => Direction::Decreasing,
            Direction::Decreasing => Direction::Increasing,
        }
    }
}

/// Monotonicity with respect to interval inclusion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Monotonicity {
    pub direction: Direction,
    pub strict: bool,
}

impl Monotonicity {
    pub fn increasing(strict: bool) -> Self {
        Self { direction: Direction::Increasing, strict }
    }

    pub fn decreasing(strict: bool) -> Self {
        Self { direction: Direction::Decreasing, strict }
    }

    pub fn is_increasing(&self) -> bool {
        self.direction == Direction::Increasing
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    MeasureDensity,
    AvgDistance,
    MaxDistance,
    SlFirstEigenvalueSqrt,
    Composed,
}

/// Implemented by every concrete set-function.
///
/// `eval_nonempty` is only called with nonempty intervals inside `domain()`;
/// [`SetFunctionDescriptor::evaluate`] handles the empty set and domain checks.
pub trait SetFunction: Send + Sync + fmt::Debug {
    fn kind(&self) -> Kind;
    fn domain(&self) -> Interval;
    fn monotonicity(&self) -> Monotonicity;
    fn empty_value(&self) -> f64;
    fn eval_nonempty(&self, j: Interval) -> Result<f64>;

    /// Pointwise Radon–Nikodym density `s(x)`, when known analytically.
    fn rn_density(&self, _x: f64) -> Option<f64> {
        None
    }

    /// The Radon–Nikodym density as a profile, used for limit CDFs.
    fn rn_profile(&self) -> Option<DensityProfile> {
        None
    }

    /// Integrable envelope of the per-cell ratio functions.
    fn dominator(&self, _x: f64) -> Option<f64> {
        None
    }
}

/// Shared handle to a set-function.
#[derive(Clone)]
pub struct SetFunctionDescriptor {
    inner: Arc<dyn SetFunction>,
}

impl fmt::Debug for SetFunctionDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.inner.fmt(f)
    }
}

impl SetFunctionDescriptor {
    pub fn new<F: SetFunction + 'static>(f: F) -> Self {
        Self { inner: Arc::new(f) }
    }

    pub fn kind(&self) -> Kind {
        self.inner.kind()
    }

    pub fn domain(&self) -> Interval {
        self.inner.domain()
    }

    pub fn monotonicity(&self) -> Monotonicity {
        self.inner.monotonicity()
    }

    pub fn direction(&self) -> Direction {
        self.inner.monotonicity().direction
    }

    pub fn empty_value(&self) -> f64 {
        self.inner.empty_value()
    }

    pub fn rn_density(&self, x: f64) -> Option<f64> {
        self.inner.rn_density(x)
    }

    pub fn rn_profile(&self) -> Option<DensityProfile> {
        self.inner.rn_profile()
    }

    pub fn dominator(&self, x: f64) -> Option<f64> {
        self.inner.dominator(x)
    }

    /// `f(J)`, with `f(∅)` given by [`empty_value`](Self::empty_value).
    pub fn evaluate(&self, j: Interval) -> Result<f64> {
        if j.is_empty() {
            return Ok(self.inner.empty_value());
        }
        let dom = self.inner.domain();
        if !j.is_subset_of(&dom) {
            return Err(Error::Domain(format!(
                "interval ({}, {}) is not inside the domain ({}, {})",
                j.a(),
                j.b(),
                dom.a(),
                dom.b()
            )));
        }
        self.inner.eval_nonempty(j)
    }
}

/// Same direction and the same value on the empty set.
pub fn compatible(f: &SetFunctionDescriptor, g: &SetFunctionDescriptor) -> bool {
    f.direction() == g.direction() && f.empty_value() == g.empty_value()
}

pub(crate) fn recip(t: f64) -> f64 {
    if t == 0.0 {
        f64::INFINITY
    } else {
        1.0 / t
    }
}

/// A strictly monotone continuous scalar map used by [`compose_monotone`].
#[derive(Clone)]
pub struct MonotoneMap {
    map: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    increasing: bool,
}

impl fmt::Debug for MonotoneMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MonotoneMap").field("increasing", &self.increasing).finish_non_exhaustive()
    }
}

impl MonotoneMap {
    pub fn increasing(g: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self { map: Arc::new(g), increasing: true }
    }

    pub fn decreasing(g: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self { map: Arc::new(g), increasing: false }
    }

    /// `t ↦ t^e` for `e > 0`.
    pub fn power(e: f64) -> Self {
        Self::increasing(move |t| t.powf(e))
    }

    pub fn apply(&self, t: f64) -> f64 {
        (self.map)(t)
    }

    pub fn is_increasing(&self) -> bool {
        self.increasing
    }
}

#[derive(Debug, Clone)]
enum Transform {
    Reciprocal,
    Map(MonotoneMap),
}

#[derive(Debug)]
struct Composed {
    base: SetFunctionDescriptor,
    transform: Transform,
    rn: Option<DensityProfile>,
}

impl Composed {
    fn apply(&self, t: f64) -> f64 {
        match &self.transform {
            Transform::Reciprocal => recip(t),
            Transform::Map(g) => g.apply(t),
        }
    }
}

impl SetFunction for Composed {
    fn kind(&self) -> Kind {
        Kind::Composed
    }

    fn domain(&self) -> Interval {
        self.base.domain()
    }

    fn monotonicity(&self) -> Monotonicity {
        let m = self.base.monotonicity();
        let keep = match &self.transform {
            Transform::Reciprocal => false,
            Transform::Map(g) => g.is_increasing(),
        };
        Monotonicity {
            direction: if keep { m.direction } else { m.direction.reversed() },
            strict: m.strict,
        }
    }

    fn empty_value(&self) -> f64 {
        self.apply(self.base.empty_value())
    }

    fn eval_nonempty(&self, j: Interval) -> Result<f64> {
        Ok(self.apply(self.base.evaluate(j)?))
    }

    fn rn_density(&self, x: f64) -> Option<f64> {
        match (&self.rn, &self.transform) {
            (Some(p), _) => Some(p.value(x)),
            // f/L and 1/((1/f) L) have the same limit
            (None, Transform::Reciprocal) => self.base.rn_density(x),
            (None, Transform::Map(_)) => None,
        }
    }

    fn rn_profile(&self) -> Option<DensityProfile> {
        match (&self.rn, &self.transform) {
            (Some(p), _) => Some(p.clone()),
            (None, Transform::Reciprocal) => self.base.rn_profile(),
            (None, Transform::Map(_)) => None,
        }
    }

    fn dominator(&self, x: f64) -> Option<f64> {
        match &self.transform {
            Transform::Reciprocal => self.base.dominator(x),
            Transform::Map(_) => None,
        }
    }
}

/// `J ↦ 1/f(J)` with reversed monotonicity.
pub fn reciprocal(f: &SetFunctionDescriptor) -> SetFunctionDescriptor {
    SetFunctionDescriptor::new(Composed { base: f.clone(), transform: Transform::Reciprocal, rn: None })
}

/// `J ↦ g(f(J))` for a strictly monotone `g`.
pub fn compose_monotone(f: &SetFunctionDescriptor, g: MonotoneMap) -> SetFunctionDescriptor {
    SetFunctionDescriptor::new(Composed { base: f.clone(), transform: Transform::Map(g), rn: None })
}

/// [`compose_monotone`] with a known Radon–Nikodym density for the result.
pub fn compose_monotone_with_density(
    f: &SetFunctionDescriptor,
    g: MonotoneMap,
    s: DensityProfile,
) -> SetFunctionDescriptor {
    SetFunctionDescriptor::new(Composed { base: f.clone(), transform: Transform::Map(g), rn: Some(s) })
}
