use std::io::Write;

use equipart::asymptotics::{format_float, sweep, weyl_sweep, write_sweep_csv, write_weyl_csv};
use equipart::equalize::{brute_force_oracle, grid_resolution_bound, solve};
use equipart::sturm::{eigenvalue, DEFAULT_TOL};
use equipart::{Objective, SetFunctionDescriptor, SolveResult};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::config::{Format, RunConfig};
use crate::CliError;

const ZERO_TOL: f64 = 1e-13;

/// Bytes to write plus an optional failure to report after writing them.
pub struct Output {
    pub body: Vec<u8>,
    pub failure: Option<CliError>,
}

impl Output {
    fn ok(body: Vec<u8>) -> Self {
        Self { body, failure: None }
    }
}

fn to_json<T: Serialize + ?Sized>(v: &T) -> Result<Vec<u8>, CliError> {
    let mut out = serde_json::to_vec_pretty(v).map_err(|e| CliError::Numerics(format!("serialization failed: {e}")))?;
    out.push(b'\n');
    Ok(out)
}

fn csv_rows(header: &str, rows: impl IntoIterator<Item = Vec<String>>) -> Vec<u8> {
    let mut out = Vec::new();
    writeln!(out, "{header}").unwrap();
    for r in rows {
        writeln!(out, "{}", r.join(",")).unwrap();
    }
    out
}

fn unconverged(r: &SolveResult) -> Option<CliError> {
    (!r.converged).then(|| CliError::Numerics(format!("residual {:e} exceeds target {:e}", r.residual, r.target)))
}

fn cells_csv(r: &SolveResult, family: &[SetFunctionDescriptor]) -> Result<Vec<u8>, CliError> {
    let mut rows = Vec::new();
    for (j, (c, f)) in r.partition.cells().zip(family).enumerate() {
        let v = f.evaluate(c)?;
        rows.push(vec![j.to_string(), format_float(c.a()), format_float(c.b()), format_float(v)]);
    }
    Ok(csv_rows("cell,left,right,value", rows))
}

pub fn solve_cmd(cfg: &RunConfig) -> Result<Output, CliError> {
    let n = cfg.n()?;
    let family = cfg.family(n)?;
    let r = solve(cfg.problem.objective, &family, cfg.domain()?, &cfg.solver)?;
    log::info!("solved n={n}: value {} with {} evaluations", r.common_value, r.evaluations);
    let body = match cfg.format(Format::Json) {
        Format::Json => to_json(&r)?,
        Format::Csv => cells_csv(&r, &family)?,
    };
    Ok(Output { body, failure: unconverged(&r) })
}

pub fn oracle_cmd(cfg: &RunConfig) -> Result<Output, CliError> {
    if cfg.problem.objective != Objective::Minimax {
        return Err(CliError::Config("the grid oracle solves minimax problems only".into()));
    }
    let n = cfg.n()?;
    let family = cfg.family(n)?;
    let domain = cfg.domain()?;
    let grid = cfg.problem.grid_points;
    let oracle = brute_force_oracle(&family, domain, grid)?;
    let solved = solve(Objective::Minimax, &family, domain, &cfg.solver)?;
    let bound = grid_resolution_bound(&family, &solved, grid)?;
    let body = match cfg.format(Format::Json) {
        Format::Json => to_json(&json!({
            "grid_points": grid,
            "oracle": oracle,
            "solver": solved,
            "resolution_bound": bound,
        }))?,
        Format::Csv => cells_csv(&oracle, &family)?,
    };
    Ok(Output::ok(body))
}

pub fn sweep_cmd(cfg: &RunConfig) -> Result<Output, CliError> {
    let f = cfg.single()?;
    let ns = cfg.n_values()?;
    let report = sweep(&f, cfg.domain()?, &ns, cfg.problem.objective, &cfg.solver)?;
    let body = match cfg.format(Format::Csv) {
        Format::Csv => {
            let mut out = Vec::new();
            write_sweep_csv(&report, &mut out)?;
            out
        }
        Format::Json => to_json(&report.rows().collect::<Vec<_>>())?,
    };
    Ok(Output::ok(body))
}

#[derive(Serialize)]
struct EigenRow {
    k: usize,
    lambda: f64,
    zeros: Vec<f64>,
}

pub fn sturm_eig_cmd(cfg: &RunConfig) -> Result<Output, CliError> {
    let prob = cfg.sl_problem()?;
    let rows: Vec<EigenRow> = cfg
        .k_values()?
        .par_iter()
        .map(|&k| {
            let r = eigenvalue(&prob, k, DEFAULT_TOL)?;
            Ok(EigenRow { k, lambda: r.lambda, zeros: r.zeros })
        })
        .collect::<Result<_, equipart::Error>>()?;
    let body = match cfg.format(Format::Json) {
        Format::Json => to_json(&rows)?,
        Format::Csv => csv_rows("k,lambda", rows.iter().map(|r| vec![r.k.to_string(), format_float(r.lambda)])),
    };
    Ok(Output::ok(body))
}

pub fn zeros_cmd(cfg: &RunConfig) -> Result<Output, CliError> {
    let prob = cfg.sl_problem()?;
    let n = cfg.n()?;
    let eig = eigenvalue(&prob, n, ZERO_TOL)?;
    let r = solve(Objective::Maximin, &vec![cfg.single()?; n], prob.interval(), &cfg.solver)?;
    let dist = r.cuts().iter().zip(&eig.zeros).map(|(x, z)| (x - z).abs()).fold(0.0, f64::max);
    let body = match cfg.format(Format::Json) {
        Format::Json => to_json(&json!({
            "n": n,
            "lambda": eig.lambda,
            "zeros": eig.zeros,
            "cuts": r.cuts(),
            "max_distance": dist,
        }))?,
        Format::Csv => csv_rows(
            "j,zero,cut",
            eig.zeros.iter().zip(r.cuts()).enumerate().map(|(j, (z, x))| {
                vec![(j + 1).to_string(), format_float(*z), format_float(*x)]
            }),
        ),
    };
    Ok(Output { body, failure: unconverged(&r) })
}

pub fn weyl_cmd(cfg: &RunConfig) -> Result<Output, CliError> {
    let prob = cfg.sl_problem()?;
    let rows = weyl_sweep(&prob, &cfg.xi_values()?)?;
    let body = match cfg.format(Format::Csv) {
        Format::Csv => {
            let mut out = Vec::new();
            write_weyl_csv(&rows, &mut out)?;
            out
        }
        Format::Json => to_json(&rows)?,
    };
    Ok(Output::ok(body))
}
