//! Bounded intervals and ordered partitions of them into possibly empty cells.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A bounded open interval `(a, b)`. Zero-length intervals encode the empty set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct Interval {
    a: f64,
    b: f64,
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::Invalid(format!("interval endpoints must be finite, got ({a}, {b})")));
        }
        if a > b {
            return Err(Error::Invalid(format!("interval endpoints out of order: ({a}, {b})")));
        }
        Ok(Self { a, b })
    }

    /// Unit interval `(0, 1)`.
    pub fn unit() -> Self {
        Self { a: 0.0, b: 1.0 }
    }

    /// The empty interval located at `x`.
    pub fn empty_at(x: f64) -> Self {
        Self { a: x, b: x }
    }

    /// Interval of length `len` centred at `x`.
    pub fn centered(x: f64, len: f64) -> Result<Self> {
        Self::new(x - 0.5 * len, x + 0.5 * len)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn len(&self) -> f64 {
        self.b - self.a
    }

    pub fn is_empty(&self) -> bool {
        self.a >= self.b
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.a + self.b)
    }

    /// Set inclusion `self ⊆ other`; the empty set is contained in everything.
    pub fn is_subset_of(&self, other: &Interval) -> bool {
        self.is_empty() || (other.a <= self.a && self.b <= other.b)
    }

    /// Set equality, treating all empty intervals as equal.
    pub fn same_set(&self, other: &Interval) -> bool {
        (self.is_empty() && other.is_empty()) || (self.a == other.a && self.b == other.b)
    }

    /// True iff the open intervals share a point.
    pub fn meets(&self, other: &Interval) -> bool {
        self.a.max(other.a) < self.b.min(other.b)
    }

    /// Open intersection; empty results are located at the larger left endpoint.
    pub fn intersect(&self, other: &Interval) -> Interval {
        let a = self.a.max(other.a);
        let b = self.b.min(other.b);
        if a < b {
            Interval { a, b }
        } else {
            Interval::empty_at(a)
        }
    }

    pub fn contains_point(&self, x: f64) -> bool {
        self.a <= x && x <= self.b
    }
}

impl TryFrom<[f64; 2]> for Interval {
    type Error = Error;

    fn try_from(v: [f64; 2]) -> Result<Self> {
        Interval::new(v[0], v[1])
    }
}

impl From<Interval> for [f64; 2] {
    fn from(i: Interval) -> Self {
        [i.a, i.b]
    }
}

/// An ordered partition of `domain` into `cuts.len() + 1` open cells.
///
/// Cells `(x_{j-1}, x_j)` with `x_0 = a` and `x_n = b` may be empty when
/// consecutive cut points coincide.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPartition")]
pub struct Partition {
    domain: Interval,
    cuts: Vec<f64>,
}

#[derive(Deserialize)]
struct RawPartition {
    domain: Interval,
    cuts: Vec<f64>,
}

impl TryFrom<RawPartition> for Partition {
    type Error = Error;

    fn try_from(raw: RawPartition) -> Result<Self> {
        Partition::new(raw.domain, raw.cuts)
    }
}

impl Partition {
    pub fn new(domain: Interval, cuts: Vec<f64>) -> Result<Self> {
        let mut prev = domain.a();
        for &x in &cuts {
            if !x.is_finite() || x < prev || x > domain.b() {
                return Err(Error::Invalid(format!(
                    "cut points must be nondecreasing inside [{}, {}], got {:?}",
                    domain.a(),
                    domain.b(),
                    cuts
                )));
            }
            prev = x;
        }
        Ok(Self { domain, cuts })
    }

    /// The single-cell partition.
    pub fn whole(domain: Interval) -> Self {
        Self { domain, cuts: Vec::new() }
    }

    /// Equal-length cells.
    pub fn uniform(domain: Interval, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Invalid("a partition needs at least one cell".into()));
        }
        let h = domain.len() / n as f64;
        let cuts = (1..n).map(|j| domain.a() + h * j as f64).collect();
        Self::new(domain, cuts)
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn cuts(&self) -> &[f64] {
        &self.cuts
    }

    pub fn into_cuts(self) -> Vec<f64> {
        self.cuts
    }

    pub fn n_cells(&self) -> usize {
        self.cuts.len() + 1
    }

    /// Endpoint `x_j` for `j = 0..=n`.
    pub fn endpoint(&self, j: usize) -> f64 {
        if j == 0 {
            self.domain.a()
        } else if j > self.cuts.len() {
            self.domain.b()
        } else {
            self.cuts[j - 1]
        }
    }

    /// The `j`-th cell, zero-based.
    pub fn cell(&self, j: usize) -> Interval {
        Interval { a: self.endpoint(j), b: self.endpoint(j + 1) }
    }

    pub fn cells(&self) -> impl Iterator<Item = Interval> + '_ {
        (0..self.n_cells()).map(move |j| self.cell(j))
    }

    /// Largest endpoint displacement between two partitions of the same shape.
    pub fn max_cut_distance(&self, other: &Partition) -> Result<f64> {
        check_same_shape(self, other)?;
        Ok(self
            .cuts
            .iter()
            .zip(&other.cuts)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max))
    }
}

fn check_same_shape(p: &Partition, q: &Partition) -> Result<()> {
    if p.domain != q.domain {
        return Err(Error::Shape(format!(
            "partitions live on different domains {:?} and {:?}",
            p.domain, q.domain
        )));
    }
    if p.n_cells() != q.n_cells() {
        return Err(Error::Shape(format!(
            "partitions have {} and {} cells",
            p.n_cells(),
            q.n_cells()
        )));
    }
    Ok(())
}

/// Finds zero-based cell indices `(j1, j2)` with `P_{j1} ⊆ Q_{j1}` and `Q_{j2} ⊆ P_{j2}`.
///
/// Scans the cut indices where `P` lies left of `Q` (`L`) or right of it (`R`).
/// `L` takes priority: `j1 = min L`, `j2 = max L + 1`; otherwise
/// `j1 = max R + 1`, `j2 = min R`. Equal partitions give `(0, 0)`. When the
/// partitions differ both inclusions are strict.
pub fn find_inclusion_indices(p: &Partition, q: &Partition) -> Result<(usize, usize)> {
    check_same_shape(p, q)?;
    if p.n_cells() < 2 {
        return Err(Error::Shape("inclusion indices need at least two cells".into()));
    }
    // 1-based cut indices, matching x_1 .. x_{n-1}
    let left: Vec<usize> = (1..p.n_cells()).filter(|&j| p.endpoint(j) < q.endpoint(j)).collect();
    let right: Vec<usize> = (1..p.n_cells()).filter(|&j| p.endpoint(j) > q.endpoint(j)).collect();

    // cells are I_j = (x_{j-1}, x_j); convert the 1-based cell index to 0-based
    let (j1, j2) = match (left.first(), left.last(), right.first(), right.last()) {
        (Some(&lmin), Some(&lmax), _, _) => (lmin, lmax + 1),
        (None, None, Some(&rmin), Some(&rmax)) => (rmax + 1, rmin),
        _ => (1, 1),
    };
    Ok((j1 - 1, j2 - 1))
}
