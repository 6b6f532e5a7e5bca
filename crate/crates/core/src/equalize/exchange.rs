//! Pairwise endpoint exchange: repeatedly equalize an argmax cell with a
//! strictly smaller neighbour.

use crate::error::{Error, Result};
use crate::interval::{Interval, Partition};
use crate::setfn::SetFunctionDescriptor;

use super::{spread, Evaluator, SolverConfig};

fn check_shape(family: &[SetFunctionDescriptor], p: &Partition) -> Result<()> {
    if family.len() != p.n_cells() {
        return Err(Error::Shape(format!("{} set-functions for {} cells", family.len(), p.n_cells())));
    }
    if p.n_cells() < 2 {
        return Err(Error::Shape("an exchange needs at least two cells".into()));
    }
    Ok(())
}

fn step(ev: &Evaluator<'_>, p: &Partition, cfg: &SolverConfig) -> Result<Partition> {
    let values = ev.values(p)?;
    let n = values.len();
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if values.iter().all(|&v| v == max) {
        return Err(Error::Degenerate("every cell attains the maximum".into()));
    }
    // values within the solver tolerance of the maximum count as ties
    let floor = max - cfg.value_tol * max.abs().max(1.0);
    let top: Vec<bool> = values.iter().map(|&v| v >= floor).collect();
    if top.iter().all(|&t| t) {
        return Ok(p.clone());
    }
    // lowest argmax cell with a smaller neighbour, right neighbour first
    let (i, _) = (0..n)
        .filter(|&j| top[j])
        .find_map(|j| {
            if j + 1 < n && !top[j + 1] {
                Some((j, j + 1))
            } else if j > 0 && !top[j - 1] {
                Some((j - 1, j))
            } else {
                None
            }
        })
        .expect("some argmax cell borders a smaller one");
    let (left, right) = (p.endpoint(i), p.endpoint(i + 2));
    // h_i((left, t)) - h_{i+1}((t, right)) is nondecreasing in t
    let gap = |t: f64| -> Result<f64> {
        Ok(ev.rep(i, Interval::new(left, t)?)? - ev.rep(i + 1, Interval::new(t, right)?)?)
    };
    let (mut lo, mut hi) = (left, right);
    // bisect down to adjacent floats so the pair ties well inside the tolerance
    for _ in 0..cfg.max_inner_iters {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if gap(mid)? <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut cuts = p.cuts().to_vec();
    cuts[i] = 0.5 * (lo + hi);
    Partition::new(p.domain(), cuts)
}

/// Moves the endpoint shared by an argmax cell and a smaller neighbour to
/// where their values cross. The largest cell value does not increase.
///
/// Cells within `cfg.value_tol` of the maximum count as argmax cells, so a
/// partition that is already equalized to that tolerance comes back as is.
pub fn local_exchange_step(family: &[SetFunctionDescriptor], p: &Partition, cfg: &SolverConfig) -> Result<Partition> {
    cfg.validate()?;
    check_shape(family, p)?;
    let ev = Evaluator::new(family, p.domain())?;
    step(&ev, p, cfg)
}

#[derive(Debug, Clone)]
pub struct ExchangeTrace {
    pub partition: Partition,
    /// `max_j f_j(I_j)` before the first step and after each step.
    pub max_values: Vec<f64>,
    pub steps: usize,
    pub converged: bool,
}

/// Iterates [`local_exchange_step`] until the residual meets `cfg.value_tol`,
/// every cell ties, or `max_steps` is used up.
pub fn local_exchange(
    family: &[SetFunctionDescriptor],
    start: &Partition,
    cfg: &SolverConfig,
    max_steps: usize,
) -> Result<ExchangeTrace> {
    cfg.validate()?;
    check_shape(family, start)?;
    let ev = Evaluator::new(family, start.domain())?;
    let mut p = start.clone();
    let mut max_values = Vec::new();
    let mut steps = 0;
    loop {
        let (_, max, residual) = spread(&ev.values(&p)?);
        max_values.push(max);
        if residual <= cfg.value_tol * max.abs().max(1.0) {
            return Ok(ExchangeTrace { partition: p, max_values, steps, converged: true });
        }
        if steps == max_steps {
            return Ok(ExchangeTrace { partition: p, max_values, steps, converged: false });
        }
        p = match step(&ev, &p, cfg) {
            Ok(next) => next,
            Err(Error::Degenerate(_)) => return Ok(ExchangeTrace { partition: p, max_values, steps, converged: true }),
            Err(e) => return Err(e),
        };
        steps += 1;
    }
}
