//! Large-`n` behaviour of optimal partitions and of the spectrum.
//!
//! Cut points of optimal partitions distribute like `s / ∫ s`, where `s` is
//! the Radon–Nikodym density of the set-function; cell values scale like
//! `∫ s / n` (increasing) or `n / ∫ s` (decreasing). For the eigenvalue
//! family the same constant governs the Weyl law.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::equalize::{solve, Objective, SolveResult, SolverConfig};
use crate::error::{Error, Result};
use crate::interval::{Interval, Partition};
use crate::setfn::SetFunctionDescriptor;
use crate::setfuncs::{sl_first_eigenvalue_sqrt_with_tol, DensityProfile, SET_FUNCTION_TOL};
use crate::sturm::{counting_function, eigenvalue, SlProblem};

/// Margin below which a zero counts as sitting on the boundary of a window.
const BOUNDARY_MARGIN: f64 = 1e-9;
const SPECTRAL_TOL: f64 = 1e-12;

/// Equal point masses `1/(n-1)` at the cuts of an `n`-cell partition.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalMeasure {
    domain: Interval,
    points: Vec<f64>,
}

impl EmpiricalMeasure {
    pub fn new(partition: &Partition) -> Result<Self> {
        if partition.n_cells() < 2 {
            return Err(Error::Degenerate("a single cell has no cut points".into()));
        }
        Ok(Self { domain: partition.domain(), points: partition.cuts().to_vec() })
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// Number of cells of the underlying partition.
    pub fn n(&self) -> usize {
        self.points.len() + 1
    }

    pub fn weight(&self) -> f64 {
        1.0 / self.points.len() as f64
    }

    /// Mass of `(-∞, x]`.
    pub fn cdf(&self, x: f64) -> f64 {
        self.points.partition_point(|&p| p <= x) as f64 * self.weight()
    }
}

pub fn empirical_measure(result: &SolveResult) -> Result<EmpiricalMeasure> {
    EmpiricalMeasure::new(&result.partition)
}

/// The normalized density `s / ∫ s`.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitDensity {
    s: DensityProfile,
    normalization: f64,
}

impl LimitDensity {
    pub fn from_profile(s: DensityProfile) -> Result<Self> {
        if s.min_value() < 0.0 {
            return Err(Error::Invalid("a limit density must be nonnegative".into()));
        }
        let normalization = s.total();
        if !(normalization > 0.0 && normalization.is_finite()) {
            return Err(Error::Invalid(format!("a limit density needs positive finite mass, got {normalization}")));
        }
        Ok(Self { s, normalization })
    }

    /// Uses the Radon–Nikodym density of `f`, restricted to `domain`.
    pub fn from_descriptor(f: &SetFunctionDescriptor, domain: Interval) -> Result<Self> {
        let s = f
            .rn_profile()
            .ok_or_else(|| Error::Invalid("the set-function has no known Radon-Nikodym density".into()))?;
        Self::from_profile(restrict(&s, domain)?)
    }

    pub fn s(&self) -> &DensityProfile {
        &self.s
    }

    /// `∫_I s`.
    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    pub fn domain(&self) -> Interval {
        self.s.domain()
    }

    pub fn density(&self, x: f64) -> f64 {
        self.s.value(x) / self.normalization
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let d = self.domain();
        (self.s.integral(d.a(), x.clamp(d.a(), d.b())) / self.normalization).clamp(0.0, 1.0)
    }

    pub fn mass(&self, j: Interval) -> f64 {
        let j = j.intersect(&self.domain());
        if j.is_empty() {
            0.0
        } else {
            self.s.integral(j.a(), j.b()) / self.normalization
        }
    }
}

fn restrict(s: &DensityProfile, domain: Interval) -> Result<DensityProfile> {
    if s.domain().same_set(&domain) {
        return Ok(s.clone());
    }
    if !domain.is_subset_of(&s.domain()) || domain.is_empty() {
        return Err(Error::Domain("the partition domain is not inside the density's domain".into()));
    }
    let segs = s.segments(domain.a(), domain.b());
    let mut bps = vec![domain.a()];
    bps.extend(segs.iter().map(|g| g.x1));
    match s.representation() {
        crate::setfuncs::Representation::PiecewiseConstant => {
            DensityProfile::piecewise_constant(bps, segs.iter().map(|g| g.v0).collect())
        }
        crate::setfuncs::Representation::SampledGrid => {
            let mut vals = vec![segs[0].v0];
            vals.extend(segs.iter().map(|g| g.v1));
            DensityProfile::sampled_grid(bps, vals)
        }
    }
}

/// `sup_x |F_emp(x) - F_lim(x)|`, attained at the cut points.
pub fn kolmogorov_distance(emp: &EmpiricalMeasure, lim: &LimitDensity) -> Result<f64> {
    if !emp.domain().same_set(&lim.domain()) {
        return Err(Error::Shape("empirical and limit measures live on different domains".into()));
    }
    let m = emp.points().len() as f64;
    Ok(emp.points().iter().enumerate().fold(0.0, |acc, (i, &x)| {
        let f = lim.cdf(x);
        acc.max((f - i as f64 / m).abs()).max(((i + 1) as f64 / m - f).abs())
    }))
}

/// Share of the `n` cells whose open interior meets `J`.
pub fn interval_fraction(emp: &EmpiricalMeasure, j: Interval) -> f64 {
    let d = emp.domain();
    let mut ends = vec![d.a()];
    ends.extend(emp.points());
    ends.push(d.b());
    let meeting = ends
        .windows(2)
        .filter(|c| c[0] < c[1] && c[0].max(j.a()) < c[1].min(j.b()))
        .count();
    meeting as f64 / emp.n() as f64
}

/// `∫ s` for increasing `f`, `1/∫ s` for decreasing `f`.
pub fn value_limit_target(f: &SetFunctionDescriptor, domain: Interval) -> Result<f64> {
    let lim = LimitDensity::from_descriptor(f, domain)?;
    Ok(if f.monotonicity().is_increasing() { lim.normalization() } else { 1.0 / lim.normalization() })
}

fn scaled_value(f: &SetFunctionDescriptor, m: f64, n: usize) -> f64 {
    if f.monotonicity().is_increasing() {
        n as f64 * m
    } else {
        m / n as f64
    }
}

/// `n·M` (increasing) or `M/n` (decreasing) from a fresh minimax solve.
pub fn value_limit_estimate(f: &SetFunctionDescriptor, domain: Interval, n: usize, cfg: &SolverConfig) -> Result<f64> {
    let r = solve(Objective::Minimax, &vec![f.clone(); n], domain, cfg)?;
    Ok(scaled_value(f, r.common_value, n))
}

/// `(1/π) ∫_J √(w/p)` over the problem interval.
pub fn weyl_constant(prob: &SlProblem) -> f64 {
    let iv = prob.interval();
    prob.coeffs().sqrt_w_over_p().integral(iv.a(), iv.b()) / std::f64::consts::PI
}

/// Largest distance between the maximin cuts of the `λ₁^{1/2}` family and
/// the interior zeros of the `n`-th eigenfunction. Fails with
/// [`Error::ToleranceNotReached`] when the partition is not equalized to `tol`.
pub fn zeros_vs_optimal(prob: &SlProblem, n: usize, tol: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::Invalid("comparing zeros with cuts needs n >= 2".into()));
    }
    let f = sl_first_eigenvalue_sqrt_with_tol(std::sync::Arc::new(prob.coeffs().clone()), SET_FUNCTION_TOL);
    let cfg = SolverConfig { value_tol: tol, ..SolverConfig::default() };
    let r = solve(Objective::Maximin, &vec![f; n], prob.interval(), &cfg)?.require_converged()?;
    let zeros = eigenvalue(prob, n, SPECTRAL_TOL)?.zeros;
    Ok(r.cuts().iter().zip(&zeros).map(|(x, z)| (x - z).abs()).fold(0.0, f64::max))
}

/// `N(ξ)/√ξ`.
pub fn weyl_ratio(prob: &SlProblem, xi: f64) -> Result<f64> {
    if !(xi > 0.0) {
        return Err(Error::Invalid(format!("the Weyl ratio needs xi > 0, got {xi}")));
    }
    Ok(counting_function(prob, xi)? as f64 / xi.sqrt())
}

/// `n/√λ_n`.
pub fn eigenvalue_asymptotics_ratio(prob: &SlProblem, n: usize) -> Result<f64> {
    Ok(n as f64 / eigenvalue(prob, n, SPECTRAL_TOL)?.lambda.sqrt())
}

/// Share of the `n - 1` interior zeros of the `n`-th eigenfunction inside
/// `J`, divided by `n`. Zeros within `1e-9·L(I)` of `∂J` are left out.
pub fn zero_distribution_fraction(prob: &SlProblem, n: usize, j: Interval) -> Result<f64> {
    if n < 1 {
        return Err(Error::Invalid("eigenfunction index starts at 1".into()));
    }
    if j.is_empty() {
        return Ok(0.0);
    }
    let eps = BOUNDARY_MARGIN * prob.interval().len();
    let zeros = eigenvalue(prob, n, SPECTRAL_TOL)?.zeros;
    let inside = zeros.iter().filter(|&&z| z > j.a() + eps && z < j.b() - eps).count();
    Ok(inside as f64 / n as f64)
}

/// One `n` of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub n: usize,
    #[serde(rename = "M")]
    pub m: f64,
    pub residual: f64,
    pub kolmogorov: f64,
    pub value_estimate: f64,
    pub target: f64,
    pub rel_err: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepReport {
    pub n_values: Vec<usize>,
    pub values_m: Vec<f64>,
    pub residuals: Vec<f64>,
    pub kolmogorov_distances: Vec<f64>,
    pub value_limit_estimates: Vec<f64>,
    /// `∫ s` or `1/∫ s`.
    pub target: f64,
}

impl SweepReport {
    pub fn rows(&self) -> impl Iterator<Item = SweepRow> + '_ {
        (0..self.n_values.len()).map(move |i| SweepRow {
            n: self.n_values[i],
            m: self.values_m[i],
            residual: self.residuals[i],
            kolmogorov: self.kolmogorov_distances[i],
            value_estimate: self.value_limit_estimates[i],
            target: self.target,
            rel_err: (self.value_limit_estimates[i] - self.target).abs() / self.target,
        })
    }
}

/// Solves for every `n` (in parallel, reported in input order) and records
/// values, residuals, Kolmogorov distances and value-limit estimates.
pub fn sweep(
    f: &SetFunctionDescriptor,
    domain: Interval,
    n_values: &[usize],
    objective: Objective,
    cfg: &SolverConfig,
) -> Result<SweepReport> {
    let lim = LimitDensity::from_descriptor(f, domain)?;
    let target = value_limit_target(f, domain)?;
    if let Some(&n) = n_values.iter().find(|&&n| n < 2) {
        return Err(Error::Invalid(format!("sweeps need n >= 2, got {n}")));
    }
    let results: Vec<Result<(f64, f64, f64)>> = n_values
        .par_iter()
        .map(|&n| {
            let r = solve(objective, &vec![f.clone(); n], domain, cfg)?;
            if !r.converged {
                log::info!("n={n}: residual {:e} above target {:e}", r.residual, r.target);
            }
            let k = kolmogorov_distance(&empirical_measure(&r)?, &lim)?;
            Ok((r.common_value, r.residual, k))
        })
        .collect();
    let mut report = SweepReport { target, ..SweepReport::default() };
    for (&n, res) in n_values.iter().zip(results) {
        let (m, residual, k) = res?;
        report.n_values.push(n);
        report.values_m.push(m);
        report.residuals.push(residual);
        report.kolmogorov_distances.push(k);
        report.value_limit_estimates.push(scaled_value(f, m, n));
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeylRow {
    pub xi: f64,
    #[serde(rename = "N")]
    pub count: usize,
    pub ratio: f64,
    pub target: f64,
}

/// `N(ξ)` and `N(ξ)/√ξ` for each `ξ`, with the Weyl constant as target.
pub fn weyl_sweep(prob: &SlProblem, xis: &[f64]) -> Result<Vec<WeylRow>> {
    let target = weyl_constant(prob);
    xis.iter()
        .map(|&xi| {
            let ratio = weyl_ratio(prob, xi)?;
            Ok(WeylRow { xi, count: counting_function(prob, xi)?, ratio, target })
        })
        .collect()
}

/// Formats a float with 17 significant digits.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_error(e: csv::Error) -> Error {
    Error::Invalid(format!("csv output failed: {e}"))
}

pub fn write_sweep_csv<W: Write>(report: &SweepReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["n", "M", "residual", "kolmogorov", "value_estimate", "target", "rel_err"]).map_err(csv_error)?;
    for r in report.rows() {
        let floats = [r.m, r.residual, r.kolmogorov, r.value_estimate, r.target, r.rel_err].map(format_float);
        let mut rec = vec![r.n.to_string()];
        rec.extend(floats);
        w.write_record(&rec).map_err(csv_error)?;
    }
    w.flush().map_err(|e| Error::Invalid(format!("csv output failed: {e}")))
}

pub fn write_weyl_csv<W: Write>(rows: &[WeylRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["xi", "N", "ratio", "target"]).map_err(csv_error)?;
    for r in rows {
        w.write_record([format_float(r.xi), r.count.to_string(), format_float(r.ratio), format_float(r.target)])
            .map_err(csv_error)?;
    }
    w.flush().map_err(|e| Error::Invalid(format!("csv output failed: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equalize::solve_minimax;
    use crate::setfuncs::{lebesgue, max_distance, measure_density, SlCoefficients};
    use std::f64::consts::PI;

    fn unit() -> Interval {
        Interval::unit()
    }

    fn constant_problem(p: f64, q: f64) -> SlProblem {
        SlProblem::on_domain(SlCoefficients::constant(unit(), p, q, 1.0).unwrap())
    }

    fn two_piece() -> SlProblem {
        let pc = |v: &[f64]| DensityProfile::piecewise_constant(vec![0.0, 0.5, 1.0], v.to_vec()).unwrap();
        SlProblem::on_domain(SlCoefficients::new(pc(&[1.0, 4.0]), pc(&[0.0, 0.0]), pc(&[1.0, 1.0]), None).unwrap())
    }

    fn uniform_emp(n: usize) -> EmpiricalMeasure {
        EmpiricalMeasure::new(&Partition::uniform(unit(), n).unwrap()).unwrap()
    }

    #[test]
    fn empirical_measure_examples() {
        let e = uniform_emp(5);
        assert_eq!(e.points().len(), 4);
        assert_eq!(e.weight(), 0.25);
        assert_eq!(uniform_emp(2).weight(), 1.0);
        assert!(matches!(EmpiricalMeasure::new(&Partition::whole(unit())), Err(Error::Degenerate(_))));
        assert_eq!(e.cdf(0.5), 0.5);
    }

    #[test]
    fn kolmogorov_against_a_scan() {
        let s = DensityProfile::linear(unit(), 0.0, 1.0).unwrap();
        let lim = LimitDensity::from_profile(s).unwrap();
        let cuts = vec![0.25f64.sqrt(), 0.5f64.sqrt(), 0.75f64.sqrt()];
        let emp = EmpiricalMeasure::new(&Partition::new(unit(), cuts).unwrap()).unwrap();
        let k = kolmogorov_distance(&emp, &lim).unwrap();
        let m = 100_000;
        let mut scan: f64 = 0.0;
        for i in 0..=m {
            let x = i as f64 / m as f64;
            let f = x * x;
            // one-sided limits of the empirical CDF at x
            let right = emp.cdf(x);
            let left = emp.points().iter().filter(|&&p| p < x).count() as f64 / 3.0;
            scan = scan.max((right - f).abs()).max((left - f).abs());
        }
        assert!((k - scan).abs() < 1e-4, "{k} vs {scan}");
        assert!(k <= 1.0 / 3.0 + 1e-12);

        for n in [2, 5, 17, 100] {
            let lim = LimitDensity::from_profile(DensityProfile::constant(unit(), 1.0).unwrap()).unwrap();
            assert!(kolmogorov_distance(&uniform_emp(n), &lim).unwrap() <= 1.0 / (n - 1) as f64 + 1e-15);
        }
    }

    #[test]
    fn limit_density_integrates_to_one() {
        for s in [
            DensityProfile::linear(unit(), 1.0, 2.0).unwrap(),
            DensityProfile::piecewise_constant(vec![0.0, 0.3, 1.0], vec![3.0, 0.5]).unwrap(),
        ] {
            let lim = LimitDensity::from_profile(s).unwrap();
            assert!((lim.cdf(1.0) - 1.0).abs() < 1e-12);
            assert!((lim.mass(unit()) - 1.0).abs() < 1e-12);
        }
        let sl = sl_first_eigenvalue_sqrt_with_tol(std::sync::Arc::new(two_piece().coeffs().clone()), 1e-12);
        let lim = LimitDensity::from_descriptor(&sl, unit()).unwrap();
        assert!((lim.normalization() - 0.75 / PI).abs() < 1e-15);
    }

    #[test]
    fn interval_fraction_examples() {
        let e = uniform_emp(10);
        assert_eq!(interval_fraction(&e, unit()), 1.0);
        assert_eq!(interval_fraction(&e, Interval::empty_at(0.3)), 0.0);
        // cells (0, 0.1) ... (0.4, 0.5) meet (0, 0.5); (0.5, 0.6) only touches it
        assert_eq!(interval_fraction(&e, Interval::new(0.0, 0.5).unwrap()), 0.5);
        assert_eq!(interval_fraction(&e, Interval::new(0.0, 0.55).unwrap()), 0.6);
    }

    #[test]
    fn value_limit_examples() {
        let cfg = SolverConfig::default();
        let half = max_distance(DensityProfile::constant(unit(), 1.0).unwrap()).unwrap();
        let lin = measure_density(DensityProfile::linear(unit(), 0.0, 1.0).unwrap()).unwrap();
        for n in [2, 7, 64] {
            assert!((value_limit_estimate(&half, unit(), n, &cfg).unwrap() - 0.5).abs() < 1e-9);
            assert!((value_limit_estimate(&lin, unit(), n, &cfg).unwrap() - 0.5).abs() < 1e-9);
        }
        assert_eq!(value_limit_target(&half, unit()).unwrap(), 0.5);
        let sl = sl_first_eigenvalue_sqrt_with_tol(std::sync::Arc::new(constant_problem(1.0, 0.0).coeffs().clone()), 1e-12);
        assert!((value_limit_estimate(&sl, unit(), 16, &cfg).unwrap() - PI).abs() < 1e-8);
        assert!((value_limit_target(&sl, unit()).unwrap() - PI).abs() < 1e-14);
        assert!(value_limit_target(&crate::setfuncs::avg_distance(DensityProfile::constant(unit(), 1.0).unwrap(), 1.0).unwrap(), unit()).is_err());
    }

    #[test]
    fn zeros_match_cuts() {
        assert!(zeros_vs_optimal(&constant_problem(1.0, 0.0), 4, 1e-10).unwrap() <= 1e-8);
        assert!(zeros_vs_optimal(&two_piece(), 3, 1e-10).unwrap() <= 1e-6);
        assert!(zeros_vs_optimal(&two_piece(), 2, 1e-10).unwrap() <= 1e-8);
        assert!(zeros_vs_optimal(&two_piece(), 1, 1e-10).is_err());
    }

    #[test]
    fn weyl_examples() {
        let unit_p = constant_problem(1.0, 0.0);
        let r = weyl_ratio(&unit_p, (100.0 * PI).powi(2)).unwrap();
        assert!((r - 1.0 / PI).abs() < 1e-12);
        assert_eq!(weyl_ratio(&unit_p, 9.0).unwrap(), 0.0);
        assert!(weyl_ratio(&unit_p, 0.0).is_err());
        let p4 = constant_problem(4.0, 0.0);
        let r = weyl_ratio(&p4, 1e7).unwrap();
        assert!((r - 0.5 / PI).abs() < 1e-3);
        assert!((weyl_constant(&p4) - 0.5 / PI).abs() < 1e-15);
    }

    #[test]
    fn eigenvalue_ratio_examples() {
        let unit_p = constant_problem(1.0, 0.0);
        for n in [1, 3, 40] {
            assert!((eigenvalue_asymptotics_ratio(&unit_p, n).unwrap() - 1.0 / PI).abs() < 1e-10);
        }
        let shifted = constant_problem(1.0, 5.0);
        let r1 = eigenvalue_asymptotics_ratio(&shifted, 1).unwrap();
        assert!((r1 - 1.0 / (PI * PI + 5.0).sqrt()).abs() < 1e-10);
        let r = eigenvalue_asymptotics_ratio(&shifted, 200).unwrap();
        assert!((r - 1.0 / PI).abs() < 1e-5);
    }

    #[test]
    fn zero_fraction_examples() {
        let unit_p = constant_problem(1.0, 0.0);
        let half = Interval::new(0.0, 0.5).unwrap();
        assert_eq!(zero_distribution_fraction(&unit_p, 10, half).unwrap(), 0.4);
        assert_eq!(zero_distribution_fraction(&unit_p, 10, unit()).unwrap(), 0.9);
        assert_eq!(zero_distribution_fraction(&unit_p, 10, Interval::empty_at(0.2)).unwrap(), 0.0);
    }

    #[test]
    fn sweep_and_csv() {
        let lin = measure_density(DensityProfile::linear(unit(), 0.0, 1.0).unwrap()).unwrap();
        let ns = [2, 4, 8, 16];
        let report = sweep(&lin, unit(), &ns, Objective::Minimax, &SolverConfig::default()).unwrap();
        assert_eq!(report.n_values, ns);
        for r in report.rows() {
            assert!((r.value_estimate - 0.5).abs() < 1e-9);
            assert!(r.rel_err < 1e-8);
        }
        let mut buf = Vec::new();
        write_sweep_csv(&report, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "n,M,residual,kolmogorov,value_estimate,target,rel_err");
        assert!(lines.next().unwrap().starts_with("2,2.5000000000"));

        let rows = weyl_sweep(&constant_problem(1.0, 0.0), &[1e2, 1e3]).unwrap();
        assert_eq!(rows[0].count, 3);
        let mut buf = Vec::new();
        write_weyl_csv(&rows, &mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("xi,N,ratio,target\n1.0000000000000000e2,3,"));

        let uniform = solve_minimax(&vec![lebesgue(unit()).unwrap(); 3], unit(), &SolverConfig::default()).unwrap();
        assert_eq!(empirical_measure(&uniform).unwrap().points().len(), 2);
    }
}
