//! Exhaustive grid search, used to validate the solvers on small problems.

use crate::error::{Error, Result};
use crate::interval::{Interval, Partition};
use crate::setfn::SetFunctionDescriptor;

use super::{spread, Evaluator, SolveResult};

const MAX_CELLS: usize = 4;
const MAX_GRID: usize = 2000;
const BUDGET: f64 = 1e9;

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

struct Search<'e, 'a> {
    ev: &'e Evaluator<'a>,
    nodes: Vec<f64>,
    first: Vec<f64>,
    last: Vec<f64>,
    best: f64,
    best_cuts: Vec<usize>,
}

impl Search<'_, '_> {
    fn cell(&self, j: usize, from: usize, to: usize) -> Result<f64> {
        let n = self.ev.n();
        if j == 0 {
            Ok(self.first[to])
        } else if j + 1 == n {
            Ok(self.last[from])
        } else {
            self.ev.raw(j, Interval::new(self.nodes[from], self.nodes[to])?)
        }
    }

    /// Places the right endpoint of cell `j`, whose left endpoint is node `from`.
    fn go(&mut self, j: usize, from: usize, running: f64, cuts: &mut Vec<usize>) -> Result<()> {
        let n = self.ev.n();
        if j + 1 == n {
            let v = running.max(self.last[from]);
            if v < self.best {
                self.best = v;
                self.best_cuts = cuts.clone();
            }
            return Ok(());
        }
        for to in from..self.nodes.len() {
            let r = running.max(self.cell(j, from, to)?);
            if r >= self.best {
                continue;
            }
            cuts.push(to);
            self.go(j + 1, to, r, cuts)?;
            cuts.pop();
        }
        Ok(())
    }
}

/// Minimax over all partitions whose cuts lie on `grid_points + 1` equally
/// spaced nodes, empty cells included. Limited to four cells and 2000 grid
/// intervals; `converged` reports a completed enumeration.
pub fn brute_force_oracle(family: &[SetFunctionDescriptor], domain: Interval, grid_points: usize) -> Result<SolveResult> {
    let ev = Evaluator::new(family, domain)?;
    let n = ev.n();
    if n > MAX_CELLS {
        return Err(Error::Invalid(format!("the grid oracle handles at most {MAX_CELLS} cells, got {n}")));
    }
    if grid_points == 0 || grid_points > MAX_GRID {
        return Err(Error::Invalid(format!("grid_points must be in 1..={MAX_GRID}, got {grid_points}")));
    }
    let work = binomial(grid_points + n - 1, n - 1) * n as f64;
    if work > BUDGET {
        return Err(Error::Budget(format!("{work:e} evaluations exceed the budget of {BUDGET:e}")));
    }
    let (a, b) = (domain.a(), domain.b());
    let nodes: Vec<f64> = (0..=grid_points)
        .map(|k| if k == grid_points { b } else { a + domain.len() * k as f64 / grid_points as f64 })
        .collect();
    if n == 1 {
        let p = Partition::whole(domain);
        let v = ev.raw(0, domain)?;
        return Ok(SolveResult {
            partition: p,
            common_value: v,
            residual: 0.0,
            evaluations: ev.evaluations(),
            converged: true,
            outer_iterations: 0,
            target: 0.0,
        });
    }
    let first = nodes.iter().map(|&x| ev.raw(0, Interval::new(a, x)?)).collect::<Result<Vec<_>>>()?;
    let last = nodes.iter().map(|&x| ev.raw(n - 1, Interval::new(x, b)?)).collect::<Result<Vec<_>>>()?;
    let mut s = Search { ev: &ev, nodes, first, last, best: f64::INFINITY, best_cuts: Vec::new() };
    let mut cuts = Vec::with_capacity(n - 1);
    s.go(0, 0, f64::NEG_INFINITY, &mut cuts)?;
    if s.best_cuts.len() != n - 1 {
        return Err(Error::Numerics("the grid oracle found no finite partition value".into()));
    }
    let p = Partition::new(domain, s.best_cuts.iter().map(|&k| s.nodes[k]).collect())?;
    let (_, max, residual) = spread(&ev.values(&p)?);
    Ok(SolveResult {
        partition: p,
        common_value: max,
        residual,
        evaluations: ev.evaluations(),
        converged: true,
        outer_iterations: 0,
        target: residual,
    })
}

/// How far the grid optimum can sit above `result.common_value`: the max cell
/// value after rounding the cuts of `result` to the grid, minus the value.
pub fn grid_resolution_bound(family: &[SetFunctionDescriptor], result: &SolveResult, grid_points: usize) -> Result<f64> {
    let domain = result.partition.domain();
    let ev = Evaluator::new(family, domain)?;
    let h = domain.len() / grid_points as f64;
    let mut prev = domain.a();
    let cuts: Vec<f64> = result
        .partition
        .cuts()
        .iter()
        .map(|&x| {
            let k = ((x - domain.a()) / h).round() as usize;
            let node = if k >= grid_points { domain.b() } else { domain.a() + domain.len() * k as f64 / grid_points as f64 };
            prev = node.max(prev);
            prev
        })
        .collect();
    let p = Partition::new(domain, cuts)?;
    let (_, max, _) = spread(&ev.values(&p)?);
    Ok((max - result.common_value).max(0.0))
}
