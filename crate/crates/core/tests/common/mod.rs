//! Random problem generators and property checks shared by the integration
//! and acceptance tests.

#![allow(dead_code)]

use std::sync::Arc;

use equipart::equalize::{solve_maximin, solve_minimax, SolverConfig};
use equipart::setfuncs::{
    avg_distance, avg_distance_normalized, length_power, max_distance, measure_density, sl_first_eigenvalue_sqrt,
    sl_first_eigenvalue_sqrt_with_tol, DensityProfile, SlCoefficients,
};
use equipart::sturm::{eigenvalue, SlProblem};
use equipart::{compose_monotone, reciprocal, Interval, MonotoneMap, Partition, SetFunctionDescriptor};
use rand::{Rng, RngExt};

pub type Check = std::result::Result<(), String>;

pub fn unit() -> Interval {
    Interval::unit()
}

fn breakpoints(rng: &mut impl Rng, max_pieces: usize) -> Vec<f64> {
    let m = rng.random_range(1..=max_pieces);
    let mut bps: Vec<f64> = (1..m).map(|_| rng.random_range(0.05..0.95)).collect();
    bps.sort_by(f64::total_cmp);
    bps.dedup_by(|a, b| (*a - *b).abs() < 1e-3);
    bps.insert(0, 0.0);
    bps.push(1.0);
    bps
}

/// Positive piecewise-constant or piecewise-linear weights on `(0, 1)`.
pub fn random_density(rng: &mut impl Rng) -> DensityProfile {
    let bps = breakpoints(rng, 5);
    if rng.random_bool(0.5) {
        let vals = (0..bps.len() - 1).map(|_| rng.random_range(0.2..5.0)).collect();
        DensityProfile::piecewise_constant(bps, vals).unwrap()
    } else {
        let vals = (0..bps.len()).map(|_| rng.random_range(0.2..5.0)).collect();
        DensityProfile::sampled_grid(bps, vals).unwrap()
    }
}

pub fn random_coefficients(rng: &mut impl Rng) -> SlCoefficients {
    let bps = breakpoints(rng, 4);
    let k = bps.len() - 1;
    let mut draw = |lo: f64, hi: f64| {
        DensityProfile::piecewise_constant(bps.clone(), (0..k).map(|_| rng.random_range(lo..hi)).collect()).unwrap()
    };
    let (p, q, w) = (draw(0.25, 4.0), draw(0.0, 4.0), draw(0.25, 4.0));
    SlCoefficients::new(p, q, w, None).unwrap()
}

pub fn random_problem(rng: &mut impl Rng) -> SlProblem {
    SlProblem::on_domain(random_coefficients(rng))
}

pub fn random_sl(rng: &mut impl Rng) -> SetFunctionDescriptor {
    sl_first_eigenvalue_sqrt(random_coefficients(rng))
}

pub fn two_piece_coefficients() -> SlCoefficients {
    let pc = |v: [f64; 2]| DensityProfile::piecewise_constant(vec![0.0, 0.5, 1.0], v.to_vec()).unwrap();
    SlCoefficients::new(pc([1.0, 4.0]), pc([0.0, 0.0]), pc([1.0, 1.0]), None).unwrap()
}

pub fn constant_coefficients(p: f64, q: f64, w: f64) -> SlCoefficients {
    SlCoefficients::constant(unit(), p, q, w).unwrap()
}

/// One descriptor of every built-in kind, plus the two transforms.
pub fn builtins(rho: &DensityProfile, coeffs: SlCoefficients) -> Vec<(&'static str, SetFunctionDescriptor)> {
    let sl = sl_first_eigenvalue_sqrt_with_tol(Arc::new(coeffs), 1e-12);
    vec![
        ("measure", measure_density(rho.clone()).unwrap()),
        ("avg_distance", avg_distance(rho.clone(), 2.0).unwrap()),
        ("avg_distance_normalized", avg_distance_normalized(rho.clone(), 1.0).unwrap()),
        ("max_distance", max_distance(rho.clone()).unwrap()),
        ("length_power", length_power(unit(), 3.0).unwrap()),
        ("sl_sqrt", sl.clone()),
        ("reciprocal_sl_sqrt", reciprocal(&sl)),
    ]
}

pub fn random_interval(rng: &mut impl Rng) -> Interval {
    let x: f64 = rng.random_range(0.0..1.0);
    let y = rng.random_range(0.0..1.0);
    Interval::new(x.min(y), x.max(y)).unwrap()
}

/// A random `inner ⊆ outer` with `inner` nonempty.
pub fn random_nest(rng: &mut impl Rng) -> (Interval, Interval) {
    let mut pts: Vec<f64> = (0..4).map(|_| rng.random_range(0.0..1.0)).collect();
    pts.sort_by(f64::total_cmp);
    if pts[2] - pts[1] < 1e-6 {
        pts[2] = (pts[1] + 1e-3).min(1.0);
        pts[3] = pts[3].max(pts[2]);
    }
    (Interval::new(pts[1], pts[2]).unwrap(), Interval::new(pts[0], pts[3]).unwrap())
}

/// `f(inner)` vs `f(outer)` in the declared direction, strictly when declared strict
/// and the nest is proper.
pub fn check_monotone(f: &SetFunctionDescriptor, inner: Interval, outer: Interval) -> Check {
    let (vi, vo) = (f.evaluate(inner).map_err(|e| e.to_string())?, f.evaluate(outer).map_err(|e| e.to_string())?);
    let m = f.monotonicity();
    let slack = 1e-12 * vi.abs().max(vo.abs());
    let ok = if m.is_increasing() { vi <= vo + slack } else { vi + slack >= vo };
    if !ok {
        return Err(format!("{f:?}: f({inner:?}) = {vi} vs f({outer:?}) = {vo}"));
    }
    let proper = outer.len() - inner.len() > 1e-3;
    if m.strict && proper && vi == vo {
        return Err(format!("{f:?}: not strict on {inner:?} within {outer:?}"));
    }
    Ok(())
}

/// Increments `|f((x+δ, y)) - f((x, y))|` for `δ = 2^{-k}`, `k = 5..=16`, are
/// nonincreasing and shrink at least a hundredfold.
pub fn check_continuity(f: &SetFunctionDescriptor, x: f64, y: f64) -> Check {
    let base = f.evaluate(Interval::new(x, y).unwrap()).map_err(|e| e.to_string())?;
    let mut incs = Vec::new();
    for k in 5..=16 {
        let d = 0.5f64.powi(k) * (y - x);
        let v = f.evaluate(Interval::new(x + d, y).unwrap()).map_err(|e| e.to_string())?;
        incs.push((v - base).abs());
    }
    let noise = 1e-10 * base.abs().max(1.0);
    for w in incs.windows(2) {
        if w[1] > w[0] + noise {
            return Err(format!("{f:?} on ({x}, {y}): increments {incs:?}"));
        }
    }
    if incs[incs.len() - 1] > incs[0] / 100.0 + noise {
        return Err(format!("{f:?} on ({x}, {y}): increments do not vanish {incs:?}"));
    }
    Ok(())
}

/// Measures add over adjacent intervals; average distances are strictly superadditive.
pub fn check_additivity(rho: &DensityProfile, rng: &mut impl Rng) -> Check {
    let mut p: Vec<f64> = (0..3).map(|_| rng.random_range(0.0..1.0)).collect();
    p.sort_by(f64::total_cmp);
    if p[1] - p[0] < 1e-4 || p[2] - p[1] < 1e-4 {
        return Ok(());
    }
    let (l, r, whole) = (Interval::new(p[0], p[1]).unwrap(), Interval::new(p[1], p[2]).unwrap(), Interval::new(p[0], p[2]).unwrap());
    let mu = measure_density(rho.clone()).unwrap();
    let ev = |f: &SetFunctionDescriptor, j| f.evaluate(j).unwrap();
    let (a, b, c) = (ev(&mu, l), ev(&mu, r), ev(&mu, whole));
    if (a + b - c).abs() > 1e-13 * c.max(1.0) {
        return Err(format!("measure not additive on {p:?}: {a} + {b} vs {c}"));
    }
    let avg = avg_distance(rho.clone(), rng.random_range(1.0..3.0)).unwrap();
    let (a, b, c) = (ev(&avg, l), ev(&avg, r), ev(&avg, whole));
    if !(c > (a + b) * (1.0 + 1e-9)) {
        return Err(format!("average distance additive on {p:?}: {a} + {b} vs {c}"));
    }
    Ok(())
}

/// `k - 1` interior zeros for `λ_k`, strictly increasing, interlacing with `λ_{k+1}`.
pub fn check_zeros_interlace(prob: &SlProblem, kmax: usize) -> Check {
    let iv = prob.interval();
    let mut prev: Option<(f64, Vec<f64>)> = None;
    for k in 1..=kmax {
        let r = eigenvalue(prob, k, 1e-12).map_err(|e| e.to_string())?;
        if r.zeros.len() != k - 1 {
            return Err(format!("k={k}: {} zeros", r.zeros.len()));
        }
        if !r.zeros.windows(2).all(|w| w[0] < w[1]) || !r.zeros.iter().all(|&z| z > iv.a() && z < iv.b()) {
            return Err(format!("k={k}: zeros out of order or not interior {:?}", r.zeros));
        }
        if let Some((lam, zs)) = &prev {
            if !(r.lambda > *lam) {
                return Err(format!("k={k}: eigenvalues not increasing"));
            }
            let mut nodes = vec![iv.a()];
            nodes.extend(zs);
            nodes.push(iv.b());
            for g in nodes.windows(2) {
                let inside = r.zeros.iter().filter(|&&z| z > g[0] && z < g[1]).count();
                if inside != 1 {
                    return Err(format!("k={k}: {inside} zeros between {} and {}", g[0], g[1]));
                }
            }
        }
        prev = Some((r.lambda, r.zeros));
    }
    Ok(())
}

/// Cuts are unchanged by an increasing reparametrization of the values
/// and by the reciprocal with minimax swapped for maximin.
pub fn check_transform_invariance(f: &SetFunctionDescriptor, n: usize, e: f64, tol: f64) -> Check {
    let cfg = SolverConfig::default();
    let fam = |g: &SetFunctionDescriptor| vec![g.clone(); n];
    let base = solve_minimax(&fam(f), unit(), &cfg).map_err(|e| e.to_string())?;
    let g = compose_monotone(f, MonotoneMap::increasing(move |t: f64| t.powf(e) + t));
    let composed = solve_minimax(&fam(&g), unit(), &cfg).map_err(|e| e.to_string())?;
    let flipped = solve_maximin(&fam(&reciprocal(f)), unit(), &cfg).map_err(|e| e.to_string())?;
    let d1 = base.partition.max_cut_distance(&composed.partition).unwrap();
    let d2 = base.partition.max_cut_distance(&flipped.partition).unwrap();
    if d1 > tol || d2 > tol {
        return Err(format!("{f:?} n={n}: cut shifts {d1:e} (composed), {d2:e} (reciprocal)"));
    }
    Ok(())
}

pub fn uniform_cuts(n: usize) -> Partition {
    Partition::uniform(unit(), n).unwrap()
}
