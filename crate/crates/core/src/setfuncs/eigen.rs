use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::setfn::{Kind, Monotonicity, SetFunction, SetFunctionDescriptor};
use crate::setfuncs::merged_breakpoints;
use crate::setfuncs::DensityProfile;
use crate::sturm::{self, SlProblem};

/// Default relative tolerance on `λ₁` when used as a set-function.
pub const SET_FUNCTION_TOL: f64 = 1e-12;

/// Coefficients on one piece where `p`, `q` and `w` are all constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoeffPiece {
    pub x0: f64,
    pub x1: f64,
    pub p: f64,
    pub q: f64,
    pub w: f64,
}

/// Piecewise-constant coefficients of `-(p u')' + q u = λ w u`, subject to
/// `1/β ≤ p, w ≤ β` and `0 ≤ q ≤ β`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCoefficients", into = "RawCoefficients")]
pub struct SlCoefficients {
    p: DensityProfile,
    q: DensityProfile,
    w: DensityProfile,
    beta: f64,
    pieces: Vec<CoeffPiece>,
}

#[derive(Serialize, Deserialize)]
struct RawCoefficients {
    p: DensityProfile,
    q: DensityProfile,
    w: DensityProfile,
    #[serde(default)]
    beta: Option<f64>,
}

impl TryFrom<RawCoefficients> for SlCoefficients {
    type Error = Error;

    fn try_from(raw: RawCoefficients) -> Result<Self> {
        SlCoefficients::new(raw.p, raw.q, raw.w, raw.beta)
    }
}

impl From<SlCoefficients> for RawCoefficients {
    fn from(c: SlCoefficients) -> Self {
        RawCoefficients { p: c.p, q: c.q, w: c.w, beta: Some(c.beta) }
    }
}

/// Smallest `β ≥ 1` admitted by the given coefficients.
pub fn minimal_beta(p: &DensityProfile, q: &DensityProfile, w: &DensityProfile) -> f64 {
    [p.max_value(), 1.0 / p.min_value(), w.max_value(), 1.0 / w.min_value(), q.max_value(), 1.0]
        .into_iter()
        .fold(1.0, f64::max)
}

impl SlCoefficients {
    /// Validates the bounds; `beta = None` selects [`minimal_beta`]. Sampled
    /// grids are replaced by their piecewise means.
    pub fn new(p: DensityProfile, q: DensityProfile, w: DensityProfile, beta: Option<f64>) -> Result<Self> {
        let p = p.to_piecewise_constant();
        let q = q.to_piecewise_constant();
        let w = w.to_piecewise_constant();
        let problems = Self::violations(&p, &q, &w, beta);
        if !problems.is_empty() {
            return Err(Error::Invalid(problems.join("; ")));
        }
        let beta = beta.unwrap_or_else(|| minimal_beta(&p, &q, &w));
        let bps = merged_breakpoints(&[&p, &q, &w]);
        let pieces = bps
            .windows(2)
            .map(|s| {
                let mid = 0.5 * (s[0] + s[1]);
                CoeffPiece { x0: s[0], x1: s[1], p: p.value(mid), q: q.value(mid), w: w.value(mid) }
            })
            .collect();
        Ok(Self { p, q, w, beta, pieces })
    }

    /// Constant coefficients on `domain`.
    pub fn constant(domain: Interval, p: f64, q: f64, w: f64) -> Result<Self> {
        Self::new(
            DensityProfile::constant(domain, p)?,
            DensityProfile::constant(domain, q)?,
            DensityProfile::constant(domain, w)?,
            None,
        )
    }

    /// Human-readable bound violations; empty when the coefficients are admissible.
    pub fn violations(p: &DensityProfile, q: &DensityProfile, w: &DensityProfile, beta: Option<f64>) -> Vec<String> {
        let mut out = Vec::new();
        if p.domain() != q.domain() || p.domain() != w.domain() {
            out.push(format!(
                "coefficient domains differ: p {:?}, q {:?}, w {:?}",
                p.domain(),
                q.domain(),
                w.domain()
            ));
        }
        if let Some(b) = beta {
            if !(b >= 1.0 && b.is_finite()) {
                out.push(format!("beta must be finite and >= 1, got {b}"));
                return out;
            }
        }
        let pc = |d: &DensityProfile| d.to_piecewise_constant();
        let (p, q, w) = (pc(p), pc(q), pc(w));
        for (name, prof) in [("p", &p), ("w", &w)] {
            if prof.min_value() <= 0.0 {
                out.push(format!("{name} must be positive, min is {}", prof.min_value()));
            }
        }
        if q.min_value() < 0.0 {
            out.push(format!("q must be nonnegative, min is {}", q.min_value()));
        }
        if let Some(b) = beta {
            for (name, prof) in [("p", &p), ("w", &w)] {
                if prof.min_value() > 0.0 && (prof.min_value() < 1.0 / b || prof.max_value() > b) {
                    out.push(format!(
                        "{name} range [{}, {}] violates 1/beta <= {name} <= beta with beta = {b}",
                        prof.min_value(),
                        prof.max_value()
                    ));
                }
            }
            if q.max_value() > b {
                out.push(format!("q max {} exceeds beta = {b}", q.max_value()));
            }
        }
        out
    }

    pub fn p(&self) -> &DensityProfile {
        &self.p
    }

    pub fn q(&self) -> &DensityProfile {
        &self.q
    }

    pub fn w(&self) -> &DensityProfile {
        &self.w
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn domain(&self) -> Interval {
        self.p.domain()
    }

    pub fn pieces(&self) -> &[CoeffPiece] {
        &self.pieces
    }

    /// Pieces clipped to `[a, b]`.
    pub fn pieces_on(&self, a: f64, b: f64) -> impl Iterator<Item = CoeffPiece> + '_ {
        let start = self.pieces.partition_point(|c| c.x1 <= a);
        self.pieces[start..]
            .iter()
            .take_while(move |c| c.x0 < b)
            .map(move |c| CoeffPiece { x0: c.x0.max(a), x1: c.x1.min(b), ..*c })
            .filter(|c| c.x1 > c.x0)
    }

    /// `√(w/p)` as a piecewise-constant profile.
    pub fn sqrt_w_over_p(&self) -> DensityProfile {
        DensityProfile::combine(&[&self.p, &self.w], |v| (v[1] / v[0]).sqrt())
            .expect("validated coefficients share a domain")
    }

    /// `(1/π)∫ √(w/p)` over the whole domain.
    pub fn weyl_constant(&self) -> f64 {
        self.sqrt_w_over_p().total() / PI
    }
}

/// `J ↦ λ₁(J)^{1/2}` for Dirichlet conditions on `∂J`.
#[derive(Debug, Clone)]
pub struct SlFirstEigenvalueSqrt {
    problem: SlProblem,
    tol: f64,
}

impl SetFunction for SlFirstEigenvalueSqrt {
    fn kind(&self) -> Kind {
        Kind::SlFirstEigenvalueSqrt
    }

    fn domain(&self) -> Interval {
        self.problem.interval()
    }

    fn monotonicity(&self) -> Monotonicity {
        Monotonicity::decreasing(true)
    }

    fn empty_value(&self) -> f64 {
        f64::INFINITY
    }

    fn eval_nonempty(&self, j: Interval) -> Result<f64> {
        Ok(sturm::eigenvalue_on_subinterval(&self.problem, j, self.tol)?.sqrt())
    }

    fn rn_density(&self, x: f64) -> Option<f64> {
        let c = self.problem.coeffs();
        Some((c.w().value(x) / c.p().value(x)).sqrt() / PI)
    }

    fn rn_profile(&self) -> Option<DensityProfile> {
        Some(self.problem.coeffs().sqrt_w_over_p().scaled(1.0 / PI))
    }
}

pub fn sl_first_eigenvalue_sqrt(c: SlCoefficients) -> SetFunctionDescriptor {
    sl_first_eigenvalue_sqrt_with_tol(Arc::new(c), SET_FUNCTION_TOL)
}

pub fn sl_first_eigenvalue_sqrt_with_tol(c: Arc<SlCoefficients>, tol: f64) -> SetFunctionDescriptor {
    let interval = c.domain();
    SetFunctionDescriptor::new(SlFirstEigenvalueSqrt { problem: SlProblem::from_shared(c, interval), tol })
}
