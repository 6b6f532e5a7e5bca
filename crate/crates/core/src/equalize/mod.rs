//! Optimal partitions by equalizing cell values.
//!
//! The minimax solver bisects on the common value `M`; for each candidate it
//! marches left to right, making every cell as long as its value allows.
//! The maximin solver bisects on a floor `m` and makes every cell as short as
//! possible. Both work on the increasing representative of the family (the
//! family itself, or its reciprocal for decreasing families).

mod exchange;
mod oracle;

pub use exchange::{local_exchange, local_exchange_step, ExchangeTrace};
pub use oracle::{brute_force_oracle, grid_resolution_bound};

use std::cell::Cell;

use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::interval::{Interval, Partition};
use crate::setfn::{compatible, recip, SetFunctionDescriptor};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// Target for `max - min` of the cell values, relative to `max(1, M)`.
    pub value_tol: f64,
    /// Cut-point resolution, relative to the domain length.
    pub point_tol: f64,
    pub max_outer_iters: usize,
    pub max_inner_iters: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { value_tol: 1e-10, point_tol: 1e-12, max_outer_iters: 200, max_inner_iters: 200 }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = |t: f64| t > 0.0 && t.is_finite();
        if !ok(self.value_tol) || !ok(self.point_tol) {
            return Err(Error::Invalid(format!(
                "solver tolerances must be positive, got value_tol = {}, point_tol = {}",
                self.value_tol, self.point_tol
            )));
        }
        if self.max_outer_iters == 0 || self.max_inner_iters == 0 {
            return Err(Error::Invalid("solver iteration limits must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub partition: Partition,
    /// `max_j f_j(I_j)` for minimax solves, `min_j f_j(I_j)` for maximin.
    pub common_value: f64,
    /// `max_j f_j(I_j) - min_j f_j(I_j)`.
    pub residual: f64,
    pub evaluations: usize,
    pub converged: bool,
    pub outer_iterations: usize,
    /// The residual bound the solve aimed for.
    pub target: f64,
}

impl SolveResult {
    pub fn cuts(&self) -> &[f64] {
        self.partition.cuts()
    }

    /// Turns a non-converged result into [`Error::ToleranceNotReached`].
    pub fn require_converged(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::ToleranceNotReached { residual: self.residual, target: self.target })
        }
    }
}

impl Serialize for SolveResult {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("SolveResult", 5)?;
        st.serialize_field("cuts", self.partition.cuts())?;
        st.serialize_field("value", &self.common_value)?;
        st.serialize_field("residual", &self.residual)?;
        st.serialize_field("evaluations", &self.evaluations)?;
        st.serialize_field("converged", &self.converged)?;
        st.end()
    }
}

/// Which problem a solve addresses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    Minimax,
    Maximin,
}

/// Evaluates the increasing representative `h_j` of a checked family and
/// counts calls.
pub(crate) struct Evaluator<'a> {
    family: &'a [SetFunctionDescriptor],
    flip: bool,
    count: Cell<usize>,
}

impl<'a> Evaluator<'a> {
    pub(crate) fn new(family: &'a [SetFunctionDescriptor], domain: Interval) -> Result<Self> {
        check_family(family, domain)?;
        Ok(Self { family, flip: !family[0].monotonicity().is_increasing(), count: Cell::new(0) })
    }

    pub(crate) fn n(&self) -> usize {
        self.family.len()
    }

    /// `f_j(J)` on the original family.
    pub(crate) fn raw(&self, j: usize, iv: Interval) -> Result<f64> {
        self.count.set(self.count.get() + 1);
        self.family[j].evaluate(iv)
    }

    /// `h_j(J)`, increasing in `J`.
    pub(crate) fn rep(&self, j: usize, iv: Interval) -> Result<f64> {
        let v = self.raw(j, iv)?;
        Ok(if self.flip { recip(v) } else { v })
    }

    pub(crate) fn evaluations(&self) -> usize {
        self.count.get()
    }

    pub(crate) fn values(&self, p: &Partition) -> Result<Vec<f64>> {
        p.cells().enumerate().map(|(j, c)| self.raw(j, c)).collect()
    }
}

fn check_family(family: &[SetFunctionDescriptor], domain: Interval) -> Result<()> {
    if family.is_empty() {
        return Err(Error::Invalid("a family needs at least one set-function".into()));
    }
    if domain.is_empty() {
        return Err(Error::Invalid("cannot partition an empty domain".into()));
    }
    for (j, f) in family.iter().enumerate() {
        if !domain.is_subset_of(&f.domain()) {
            return Err(Error::Domain(format!(
                "member {j} is defined on ({}, {}), which does not cover ({}, {})",
                f.domain().a(),
                f.domain().b(),
                domain.a(),
                domain.b()
            )));
        }
    }
    for (j, w) in family.windows(2).enumerate() {
        if !compatible(&w[0], &w[1]) {
            return Err(Error::IncompatibleFamily(format!(
                "members {j} and {} differ in monotonicity or empty-set value",
                j + 1
            )));
        }
    }
    Ok(())
}

fn spread(values: &[f64]) -> (f64, f64, f64) {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let residual = if max == min { 0.0 } else { max - min };
    (min, max, residual)
}

/// `max_j f_j(I_j) - min_j f_j(I_j)` over the cells of `p`.
pub fn equalization_residual(family: &[SetFunctionDescriptor], p: &Partition) -> Result<f64> {
    if family.len() != p.n_cells() {
        return Err(Error::Shape(format!("{} set-functions for {} cells", family.len(), p.n_cells())));
    }
    let ev = Evaluator::new(family, p.domain())?;
    Ok(spread(&ev.values(p)?).2)
}

/// Result of one inner march at a fixed level.
#[derive(Debug, Clone, PartialEq)]
pub struct MarchOutcome {
    pub cuts: Vec<f64>,
    /// How far right the last cell can extend with value `≤ level`.
    pub reach: f64,
    pub feasible: bool,
}

struct Inner<'e, 'a> {
    ev: &'e Evaluator<'a>,
    b: f64,
    width_tol: f64,
    value_tol: f64,
    max_iters: usize,
}

impl Inner<'_, '_> {
    fn band(&self, v: f64, level: f64) -> bool {
        (v - level).abs() <= 1e-2 * self.value_tol * level.abs()
    }

    /// Largest `y ∈ [x, b]` with `h_j((x, y)) ≤ level`, given `h_j((x, b)) > level`.
    fn sup_below(&self, j: usize, x: f64, level: f64) -> Result<f64> {
        let (mut lo, mut hi) = (x, self.b);
        let mut v_lo = self.ev.rep(j, Interval::empty_at(x))?;
        for _ in 0..self.max_iters {
            if hi - lo <= self.width_tol && self.band(v_lo, level) {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let v = self.ev.rep(j, Interval::new(x, mid)?)?;
            if v <= level {
                lo = mid;
                v_lo = v;
            } else {
                hi = mid;
            }
        }
        Ok(lo)
    }

    /// Smallest `y ∈ [x, b]` with `h_j((x, y)) ≥ level`, given `h_j(∅) < level ≤ h_j((x, b))`.
    fn inf_above(&self, j: usize, x: f64, level: f64, v_whole: f64) -> Result<f64> {
        let (mut lo, mut hi) = (x, self.b);
        let mut v_hi = v_whole;
        for _ in 0..self.max_iters {
            if hi - lo <= self.width_tol && self.band(v_hi, level) {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let v = self.ev.rep(j, Interval::new(x, mid)?)?;
            if v >= level {
                hi = mid;
                v_hi = v;
            } else {
                lo = mid;
            }
        }
        Ok(hi)
    }

    /// Fill-up march: each cell as long as `h_j ≤ level` allows.
    fn up(&self, a: f64, level: f64) -> Result<MarchOutcome> {
        let n = self.ev.n();
        let mut cuts = Vec::with_capacity(n - 1);
        let mut x = a;
        for j in 0..n {
            if self.ev.rep(j, Interval::empty_at(x))? > level {
                cuts.resize(n - 1, x);
                return Ok(MarchOutcome { cuts, reach: x, feasible: false });
            }
            let y = if x >= self.b || self.ev.rep(j, Interval::new(x, self.b)?)? <= level {
                self.b
            } else {
                self.sup_below(j, x, level)?
            };
            if j + 1 == n {
                return Ok(MarchOutcome { cuts, reach: y, feasible: y >= self.b });
            }
            cuts.push(y);
            x = y;
        }
        unreachable!("the loop returns at the last cell")
    }

    /// Fill-down march: each cell as short as `h_j ≥ level` allows.
    fn down(&self, a: f64, level: f64) -> Result<MarchOutcome> {
        let n = self.ev.n();
        let mut cuts = Vec::with_capacity(n - 1);
        let mut x = a;
        for j in 0..n - 1 {
            let y = if self.ev.rep(j, Interval::empty_at(x))? >= level {
                x
            } else {
                let whole = if x < self.b { self.ev.rep(j, Interval::new(x, self.b)?)? } else { f64::NEG_INFINITY };
                if whole < level {
                    cuts.resize(n - 1, self.b);
                    return Ok(MarchOutcome { cuts, reach: self.b, feasible: false });
                }
                self.inf_above(j, x, level, whole)?
            };
            cuts.push(y);
            x = y;
        }
        let last = self.ev.rep(n - 1, Interval::new(x, self.b)?)?;
        Ok(MarchOutcome { cuts, reach: self.b, feasible: last >= level })
    }
}

fn inner<'e, 'a>(ev: &'e Evaluator<'a>, domain: Interval, cfg: &SolverConfig) -> Inner<'e, 'a> {
    Inner {
        ev,
        b: domain.b(),
        width_tol: cfg.point_tol * domain.len(),
        value_tol: cfg.value_tol,
        max_iters: cfg.max_inner_iters,
    }
}

/// One fill-up march at `level` on the increasing representative of `family`.
/// Its reach is nondecreasing in `level`, and the march is feasible exactly
/// when it reaches the right end of `domain`.
pub fn march(family: &[SetFunctionDescriptor], domain: Interval, level: f64, cfg: &SolverConfig) -> Result<MarchOutcome> {
    cfg.validate()?;
    let ev = Evaluator::new(family, domain)?;
    inner(&ev, domain, cfg).up(domain.a(), level)
}

fn midpoint(lo: f64, hi: f64) -> f64 {
    if lo > 0.0 && hi > 4.0 * lo {
        (lo * hi).sqrt()
    } else {
        0.5 * (lo + hi)
    }
}

fn finish(ev: &Evaluator<'_>, partition: Partition, objective: Objective, outer: usize, cfg: &SolverConfig) -> Result<SolveResult> {
    let values = ev.values(&partition)?;
    let (min, max, residual) = spread(&values);
    let common_value = match objective {
        Objective::Minimax => max,
        Objective::Maximin => min,
    };
    let target = cfg.value_tol * common_value.abs().max(1.0);
    Ok(SolveResult {
        partition,
        common_value,
        residual,
        evaluations: ev.evaluations(),
        converged: residual <= target,
        outer_iterations: outer,
        target,
    })
}

fn stop(lo: f64, hi: f64, cfg: &SolverConfig) -> bool {
    hi - lo <= 1e-3 * cfg.value_tol * hi.abs()
}

/// Minimizes `max_j f_j(I_j)` over partitions of `domain` into `family.len()` cells.
///
/// A result that misses the tolerance is still returned, with `converged`
/// false; see [`SolveResult::require_converged`].
pub fn solve_minimax(family: &[SetFunctionDescriptor], domain: Interval, cfg: &SolverConfig) -> Result<SolveResult> {
    cfg.validate()?;
    let ev = Evaluator::new(family, domain)?;
    let n = family.len();
    if n == 1 {
        return finish(&ev, Partition::whole(domain), Objective::Minimax, 0, cfg);
    }
    let inn = inner(&ev, domain, cfg);
    let a = domain.a();

    let mut lo = (0..n).map(|j| ev.rep(j, Interval::empty_at(a))).collect::<Result<Vec<_>>>()?.into_iter().fold(f64::NEG_INFINITY, f64::max);
    let first = inn.up(a, lo)?;
    if first.feasible {
        return finish(&ev, Partition::new(domain, first.cuts)?, Objective::Minimax, 0, cfg);
    }
    let mut hi = ev.rep(0, domain)?;
    let mut best = inn.up(a, hi)?;
    let mut outer = 0;
    while !best.feasible {
        outer += 1;
        if outer > cfg.max_outer_iters || !hi.is_finite() {
            return Err(Error::Numerics("no feasible level for the minimax march".into()));
        }
        lo = hi;
        hi = 2.0 * hi.abs().max(f64::MIN_POSITIVE);
        best = inn.up(a, hi)?;
    }
    // the uniform first cell is usually close to the optimum
    let probe = ev.rep(0, Interval::new(a, a + domain.len() / n as f64)?)?;
    let mut next = if probe > lo && probe < hi { probe } else { midpoint(lo, hi) };
    while outer < cfg.max_outer_iters && !stop(lo, hi, cfg) {
        outer += 1;
        let m = inn.up(a, next)?;
        if m.feasible {
            hi = next;
            best = m;
        } else {
            lo = next;
        }
        next = midpoint(lo, hi);
        if next <= lo || next >= hi {
            break;
        }
    }
    log::debug!("minimax n={n}: level bracket [{lo:e}, {hi:e}] after {outer} outer steps");
    finish(&ev, Partition::new(domain, best.cuts)?, Objective::Minimax, outer, cfg)
}

/// Maximizes `min_j f_j(I_j)`. The optimal partition coincides with the
/// minimax one; it is computed by an independent fill-down march.
pub fn solve_maximin(family: &[SetFunctionDescriptor], domain: Interval, cfg: &SolverConfig) -> Result<SolveResult> {
    cfg.validate()?;
    let ev = Evaluator::new(family, domain)?;
    let n = family.len();
    if n == 1 {
        return finish(&ev, Partition::whole(domain), Objective::Maximin, 0, cfg);
    }
    let inn = inner(&ev, domain, cfg);
    let a = domain.a();

    // every cell empty but the last is feasible at the empty-set value
    let mut lo = ev.rep(0, Interval::empty_at(a))?;
    let mut best = inn.down(a, lo)?;
    if !best.feasible {
        return Err(Error::Numerics("the maximin march fails at the empty-set value".into()));
    }
    let mut hi = (0..n).map(|j| ev.rep(j, domain)).collect::<Result<Vec<_>>>()?.into_iter().fold(f64::NEG_INFINITY, f64::max);
    let top = inn.down(a, hi)?;
    if top.feasible {
        return finish(&ev, Partition::new(domain, top.cuts)?, Objective::Maximin, 0, cfg);
    }
    let probe = ev.rep(0, Interval::new(a, a + domain.len() / n as f64)?)?;
    let mut next = if probe > lo && probe < hi { probe } else { midpoint(lo, hi) };
    let mut outer = 0;
    while outer < cfg.max_outer_iters && !stop(lo, hi, cfg) {
        outer += 1;
        let m = inn.down(a, next)?;
        if m.feasible {
            lo = next;
            best = m;
        } else {
            hi = next;
        }
        next = midpoint(lo, hi);
        if next <= lo || next >= hi {
            break;
        }
    }
    log::debug!("maximin n={n}: level bracket [{lo:e}, {hi:e}] after {outer} outer steps");
    finish(&ev, Partition::new(domain, best.cuts)?, Objective::Maximin, outer, cfg)
}

/// Dispatches on `objective`.
pub fn solve(objective: Objective, family: &[SetFunctionDescriptor], domain: Interval, cfg: &SolverConfig) -> Result<SolveResult> {
    match objective {
        Objective::Minimax => solve_minimax(family, domain, cfg),
        Objective::Maximin => solve_maximin(family, domain, cfg),
    }
}
