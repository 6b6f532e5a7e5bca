//! Dirichlet eigenvalues of `-(p u')' + q u = λ w u` with piecewise-constant
//! coefficients, by Prüfer-angle shooting.
//!
//! On each piece the solution is trigonometric, hyperbolic or linear in closed
//! form, so the angle is propagated exactly and the only iteration is the
//! bisection on `λ`.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::interval::{Interval, Partition};
use crate::setfuncs::{CoeffPiece, SlCoefficients};

/// Default relative tolerance on `λ`.
pub const DEFAULT_TOL: f64 = 1e-10;

const MAX_DOUBLINGS: usize = 200;
const MAX_BISECTIONS: usize = 10_000;
const BREAKPOINT_SNAP: f64 = 1e-12;
/// `N(ξ)` counts angles this close below a multiple of π as reaching it.
const ANGLE_SNAP: f64 = 1e-12;

/// The eigenproblem on `interval` with Dirichlet conditions at both ends.
#[derive(Debug, Clone)]
pub struct SlProblem {
    coeffs: Arc<SlCoefficients>,
    interval: Interval,
}

impl SlProblem {
    pub fn new(coeffs: SlCoefficients, interval: Interval) -> Result<Self> {
        Self::shared(Arc::new(coeffs), interval)
    }

    /// The problem on the whole coefficient domain.
    pub fn on_domain(coeffs: SlCoefficients) -> Self {
        let interval = coeffs.domain();
        Self { coeffs: Arc::new(coeffs), interval }
    }

    pub fn shared(coeffs: Arc<SlCoefficients>, interval: Interval) -> Result<Self> {
        if interval.is_empty() {
            return Err(Error::Invalid("eigenproblem interval must be nonempty".into()));
        }
        if !interval.is_subset_of(&coeffs.domain()) {
            return Err(Error::Domain(format!(
                "interval ({}, {}) is not inside the coefficient domain",
                interval.a(),
                interval.b()
            )));
        }
        Ok(Self { coeffs, interval })
    }

    pub(crate) fn from_shared(coeffs: Arc<SlCoefficients>, interval: Interval) -> Self {
        Self { coeffs, interval }
    }

    pub fn coeffs(&self) -> &SlCoefficients {
        &self.coeffs
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    fn pieces_on(&self, j: Interval) -> Vec<CoeffPiece> {
        self.coeffs.pieces_on(j.a(), j.b()).collect()
    }
}

/// Prüfer angle `θ = turns·π + angle` with `angle ∈ [0, π)`. The canonical
/// state for an angle is `(u, p u') = (sin angle, cos angle)`.
#[derive(Debug, Clone, Copy)]
struct Phase {
    turns: usize,
    angle: f64,
}

impl Phase {
    const START: Phase = Phase { turns: 0, angle: 0.0 };

    fn theta(self) -> f64 {
        self.turns as f64 * PI + self.angle
    }

    /// Number of multiples of π reached, allowing for rounding just below one.
    fn count(self) -> usize {
        self.turns + usize::from(self.angle > PI - ANGLE_SNAP)
    }
}

/// Advances the phase across one piece, appending interior zeros if asked.
fn advance(c: &CoeffPiece, lambda: f64, phase: Phase, mut zeros: Option<&mut Vec<f64>>) -> Phase {
    let h = c.x1 - c.x0;
    let kappa = (lambda * c.w - c.q) / c.p;
    let (s, co) = phase.angle.sin_cos();
    if kappa > 0.0 {
        // u = A sin(ψ), p u' = A p ω cos(ψ), ψ advancing at rate ω
        let om = kappa.sqrt();
        let pw = c.p * om;
        let psi0 = s.atan2(co / pw);
        let total = psi0 + om * h;
        let mut count = (total / PI).floor().max(0.0) as usize;
        if let Some(z) = zeros.as_deref_mut() {
            for j in 1..=count {
                z.push(c.x0 + (j as f64 * PI - psi0) / om);
            }
        }
        let rem = total - count as f64 * PI;
        let mut angle = if rem >= PI {
            PI
        } else {
            let r = rem.max(0.0);
            r.sin().atan2(pw * r.cos())
        };
        if angle >= PI {
            angle = 0.0;
            count += 1;
            if let Some(z) = zeros {
                z.push(c.x1);
            }
        }
        return Phase { turns: phase.turns + count, angle };
    }
    let (u, v) = transfer(c, lambda, (s, co), h);
    if u > 0.0 || (s == 0.0 && u >= 0.0) {
        return Phase { turns: phase.turns, angle: u.atan2(v) };
    }
    // at most one sign change on a non-oscillatory piece
    if let Some(z) = zeros {
        let t = if kappa < 0.0 {
            let ka = (-kappa).sqrt();
            // u(t) = 0 where tanh(κ t) = -s p κ / cos
            (-s * c.p * ka / co).min(1.0).atanh() / ka
        } else {
            -s * c.p / co
        };
        z.push(c.x0 + if t.is_finite() { t.clamp(0.0, h) } else { h });
    }
    let angle = if u == 0.0 { 0.0 } else { u.atan2(v) + PI };
    let angle = if angle >= PI { 0.0 } else { angle.max(0.0) };
    Phase { turns: phase.turns + 1, angle }
}

fn shoot(pieces: &[CoeffPiece], lambda: f64, mut zeros: Option<&mut Vec<f64>>) -> Phase {
    pieces.iter().fold(Phase::START, |ph, c| advance(c, lambda, ph, zeros.as_deref_mut()))
}

/// Smallest `λ` (to `tol`) whose phase count over all `groups` reaches `k`.
fn bisect_count(groups: &[Vec<CoeffPiece>], k: usize, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::Invalid(format!("tolerance must be positive, got {tol}")));
    }
    let all = groups.iter().flatten();
    let ratio_min = all.clone().map(|c| c.q / c.w).fold(f64::INFINITY, f64::min);
    let q_min = all.clone().map(|c| c.q).fold(f64::INFINITY, f64::min);
    let q_max = all.clone().map(|c| c.q).fold(0.0, f64::max);
    let beta = all
        .clone()
        .flat_map(|c| [c.p, 1.0 / c.p, c.w, 1.0 / c.w, c.q])
        .fold(1.0, f64::max);
    let len = groups.iter().map(|g| g.iter().map(|c| c.x1 - c.x0).sum::<f64>()).fold(0.0, f64::max);
    let count = |lambda: f64| groups.iter().map(|g| shoot(g, lambda, None).turns).sum::<usize>();

    // below min q/w no piece oscillates and the flux never turns
    let mut lo = q_min.min(ratio_min);
    let mut hi = q_max + (k as f64 * PI * beta / len).powi(2) * beta;
    let mut doublings = 0;
    while count(hi) < k {
        doublings += 1;
        if doublings > MAX_DOUBLINGS || !hi.is_finite() {
            return Err(Error::Numerics(format!("could not bracket eigenvalue {k}")));
        }
        lo = hi;
        hi = 2.0 * hi.abs().max(1.0);
    }
    for _ in 0..MAX_BISECTIONS {
        if hi - lo <= tol * hi.abs().max(1.0) {
            return Ok(0.5 * (lo + hi));
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Ok(mid);
        }
        if count(mid) >= k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Err(Error::Numerics(format!("eigenvalue {k} bisection did not converge")))
}

/// Eigenvalue `λ_k`, its eigenfunction and the `k - 1` interior zeros.
#[derive(Debug, Clone)]
pub struct EigenResult {
    pub k: usize,
    pub lambda: f64,
    pub eigenfunction: Eigenfunction,
    pub zeros: Vec<f64>,
    /// Prüfer angle at the right endpoint.
    pub end_angle: f64,
}

/// Piecewise closed-form solution with `u(a) = 0`, `p u'(a) = 1`.
#[derive(Debug, Clone)]
pub struct Eigenfunction {
    lambda: f64,
    pieces: Vec<CoeffPiece>,
    /// `(u, p u')` at the left end of each piece.
    starts: Vec<(f64, f64)>,
}

fn transfer(c: &CoeffPiece, lambda: f64, (u, v): (f64, f64), t: f64) -> (f64, f64) {
    let kappa = (lambda * c.w - c.q) / c.p;
    if kappa > 0.0 {
        let om = kappa.sqrt();
        let pw = c.p * om;
        let (sn, cs) = (om * t).sin_cos();
        (u * cs + v * sn / pw, -u * pw * sn + v * cs)
    } else if kappa < 0.0 {
        let ka = (-kappa).sqrt();
        let pk = c.p * ka;
        let (sh, ch) = ((ka * t).sinh(), (ka * t).cosh());
        (u * ch + v * sh / pk, u * pk * sh + v * ch)
    } else {
        (u + v * t / c.p, v)
    }
}

impl Eigenfunction {
    fn new(lambda: f64, pieces: Vec<CoeffPiece>) -> Self {
        let mut starts = Vec::with_capacity(pieces.len());
        let mut state = (0.0, 1.0);
        for c in &pieces {
            starts.push(state);
            state = transfer(c, lambda, state, c.x1 - c.x0);
        }
        Self { lambda, pieces, starts }
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn interval(&self) -> Interval {
        Interval::new(self.pieces[0].x0, self.pieces[self.pieces.len() - 1].x1).expect("pieces are ordered")
    }

    pub fn pieces(&self) -> &[CoeffPiece] {
        &self.pieces
    }

    fn state(&self, x: f64) -> (f64, f64, &CoeffPiece) {
        let i = self.pieces.partition_point(|c| c.x1 <= x).min(self.pieces.len() - 1);
        let c = &self.pieces[i];
        let t = (x - c.x0).clamp(0.0, c.x1 - c.x0);
        let (u, v) = transfer(c, self.lambda, self.starts[i], t);
        (u, v, c)
    }

    pub fn value(&self, x: f64) -> f64 {
        self.state(x).0
    }

    /// The flux `p u'`, continuous across breakpoints.
    pub fn flux(&self, x: f64) -> f64 {
        self.state(x).1
    }

    pub fn derivative(&self, x: f64) -> f64 {
        let (_, v, c) = self.state(x);
        v / c.p
    }
}

fn snap_to_breakpoints(zeros: &mut [f64], pieces: &[CoeffPiece]) {
    for z in zeros.iter_mut() {
        let i = pieces.partition_point(|c| c.x1 <= *z);
        for c in pieces.iter().skip(i.saturating_sub(1)).take(2) {
            for bp in [c.x0, c.x1] {
                if (*z - bp).abs() < BREAKPOINT_SNAP {
                    *z = bp;
                }
            }
        }
    }
}

/// `λ_k` on the problem interval with relative tolerance `tol`.
pub fn eigenvalue(prob: &SlProblem, k: usize, tol: f64) -> Result<EigenResult> {
    if k == 0 {
        return Err(Error::Invalid("eigenvalue index starts at 1".into()));
    }
    let pieces = prob.pieces_on(prob.interval());
    let groups = [pieces];
    let lambda = bisect_count(&groups, k, tol)?;
    let [pieces] = groups;
    let mut zeros = Vec::with_capacity(k);
    let end = shoot(&pieces, lambda, Some(&mut zeros));
    let (a, b) = (prob.interval().a(), prob.interval().b());
    zeros.retain(|&z| z > a && z < b);
    if zeros.len() < k - 1 {
        return Err(Error::Numerics(format!(
            "eigenfunction {k} shows {} interior zeros, expected {}",
            zeros.len(),
            k - 1
        )));
    }
    zeros.truncate(k - 1);
    snap_to_breakpoints(&mut zeros, &pieces);
    Ok(EigenResult { k, lambda, eigenfunction: Eigenfunction::new(lambda, pieces), zeros, end_angle: end.theta() })
}

/// `λ₁(J)` for `J` inside the problem interval; `+∞` when `J` is empty.
pub fn eigenvalue_on_subinterval(prob: &SlProblem, j: Interval, tol: f64) -> Result<f64> {
    if j.is_empty() {
        return Ok(f64::INFINITY);
    }
    if !j.is_subset_of(&prob.interval()) {
        return Err(Error::Domain(format!("interval ({}, {}) is not inside the problem interval", j.a(), j.b())));
    }
    bisect_count(&[prob.pieces_on(j)], 1, tol)
}

/// `N(ξ)`, the number of eigenvalues `≤ ξ`, from one shooting pass.
pub fn counting_function(prob: &SlProblem, xi: f64) -> Result<usize> {
    if !xi.is_finite() {
        return Err(Error::Invalid(format!("spectral parameter must be finite, got {xi}")));
    }
    Ok(shoot(&prob.pieces_on(prob.interval()), xi, None).count())
}

/// First Dirichlet eigenvalue of the interval with the cut points of
/// `sigma` removed, i.e. the least eigenvalue over all nonempty cells.
pub fn first_eigenvalue_punctured(prob: &SlProblem, sigma: &Partition, tol: f64) -> Result<f64> {
    if !sigma.domain().same_set(&prob.interval()) {
        return Err(Error::Shape("partition domain differs from the problem interval".into()));
    }
    let groups: Vec<Vec<CoeffPiece>> =
        sigma.cells().filter(|c| !c.is_empty()).map(|c| prob.pieces_on(c)).collect();
    bisect_count(&groups, 1, tol)
}
