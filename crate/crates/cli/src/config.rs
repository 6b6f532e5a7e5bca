//! Run configuration: JSON schema, dotted overrides and problem assembly.

use std::path::Path;
use std::sync::Arc;

use equipart::setfuncs::{
    avg_distance, avg_distance_normalized, length_power, max_distance, measure_density, sl_first_eigenvalue_sqrt_with_tol,
    DensityProfile, SlCoefficients, SET_FUNCTION_TOL,
};
use equipart::sturm::SlProblem;
use equipart::{reciprocal, Interval, Objective, SetFunctionDescriptor, SolverConfig};
use serde::Deserialize;
use serde_json::Value;

use crate::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Informational; the subcommand on the command line decides what runs.
    #[serde(default)]
    pub command: Option<String>,
    pub problem: ProblemSpec,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub path: Option<String>,
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub domain: Option<[f64; 2]>,
    /// One set-function repeated over all cells.
    pub family: Option<FamilySpec>,
    /// One set-function per cell; fixes `n`.
    pub families: Option<Vec<FamilySpec>>,
    pub n: Option<usize>,
    pub n_values: Option<Vec<usize>>,
    /// Inclusive `[first, last]`.
    pub n_range: Option<[usize; 2]>,
    pub k: Option<usize>,
    pub k_max: Option<usize>,
    pub xi_values: Option<Vec<f64>>,
    pub xi_range: Option<XiRange>,
    #[serde(default = "default_grid")]
    pub grid_points: usize,
    #[serde(default = "default_objective")]
    pub objective: Objective,
}

fn default_grid() -> usize {
    1000
}

fn default_objective() -> Objective {
    Objective::Minimax
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct XiRange {
    pub from: f64,
    pub to: f64,
    pub count: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    #[default]
    Log,
    Linear,
}

#[derive(Debug, Clone, Deserialize)]
pub struct FamilySpec {
    #[serde(flatten)]
    pub kind: KindSpec,
    /// Use `1/f` instead of `f`.
    #[serde(default)]
    pub reciprocal: bool,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum KindSpec {
    MeasureDensity {
        rho: DensityProfile,
    },
    AvgDistance {
        rho: DensityProfile,
        r: f64,
        #[serde(default)]
        normalized: bool,
    },
    MaxDistance {
        rho: DensityProfile,
    },
    LengthPower {
        exponent: f64,
    },
    SlFirstEigenvalueSqrt {
        p: DensityProfile,
        q: DensityProfile,
        w: DensityProfile,
        beta: Option<f64>,
        tol: Option<f64>,
    },
}

impl KindSpec {
    fn own_domain(&self) -> Option<Interval> {
        match self {
            KindSpec::MeasureDensity { rho } | KindSpec::AvgDistance { rho, .. } | KindSpec::MaxDistance { rho } => {
                Some(rho.domain())
            }
            KindSpec::SlFirstEigenvalueSqrt { p, .. } => Some(p.domain()),
            KindSpec::LengthPower { .. } => None,
        }
    }

    pub fn coefficients(&self) -> Result<Option<SlCoefficients>, CliError> {
        match self {
            KindSpec::SlFirstEigenvalueSqrt { p, q, w, beta, .. } => {
                Ok(Some(SlCoefficients::new(p.clone(), q.clone(), w.clone(), *beta)?))
            }
            _ => Ok(None),
        }
    }

    pub fn build(&self, domain: Interval) -> Result<SetFunctionDescriptor, CliError> {
        let f = match self {
            KindSpec::MeasureDensity { rho } => measure_density(rho.clone())?,
            KindSpec::AvgDistance { rho, r, normalized: false } => avg_distance(rho.clone(), *r)?,
            KindSpec::AvgDistance { rho, r, normalized: true } => avg_distance_normalized(rho.clone(), *r)?,
            KindSpec::MaxDistance { rho } => max_distance(rho.clone())?,
            KindSpec::LengthPower { exponent } => length_power(domain, *exponent)?,
            KindSpec::SlFirstEigenvalueSqrt { tol, .. } => {
                let c = self.coefficients()?.expect("sl kind");
                sl_first_eigenvalue_sqrt_with_tol(Arc::new(c), tol.unwrap_or(SET_FUNCTION_TOL))
            }
        };
        let d = f.domain();
        if d.a() > domain.a() || d.b() < domain.b() {
            return Err(CliError::Config(format!("family domain {d:?} does not cover the problem domain {domain:?}")));
        }
        Ok(f)
    }
}

impl FamilySpec {
    pub fn build(&self, domain: Interval) -> Result<SetFunctionDescriptor, CliError> {
        let f = self.kind.build(domain)?;
        Ok(if self.reciprocal { reciprocal(&f) } else { f })
    }
}

impl RunConfig {
    pub fn load(path: &Path, overrides: &[(String, String)]) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut doc: Value = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{} is not valid JSON: {e}", path.display())))?;
        for (key, raw) in overrides {
            apply_override(&mut doc, key, raw)?;
        }
        let cfg: RunConfig = serde_json::from_value(doc).map_err(|e| CliError::Config(format!("bad config: {e}")))?;
        cfg.solver.validate()?;
        Ok(cfg)
    }

    pub fn domain(&self) -> Result<Interval, CliError> {
        if let Some([a, b]) = self.problem.domain {
            return Ok(Interval::new(a, b)?);
        }
        self.specs()?
            .iter()
            .find_map(|s| s.kind.own_domain())
            .ok_or_else(|| CliError::Config("problem.domain is required for length_power families".into()))
    }

    pub fn specs(&self) -> Result<Vec<&FamilySpec>, CliError> {
        match (&self.problem.family, &self.problem.families) {
            (Some(f), None) => Ok(vec![f]),
            (None, Some(fs)) if !fs.is_empty() => Ok(fs.iter().collect()),
            (None, Some(_)) => Err(CliError::Config("problem.families is empty".into())),
            (None, None) => Err(CliError::Config("problem.family or problem.families is required".into())),
            (Some(_), Some(_)) => Err(CliError::Config("give problem.family or problem.families, not both".into())),
        }
    }

    /// The family for `n` cells.
    pub fn family(&self, n: usize) -> Result<Vec<SetFunctionDescriptor>, CliError> {
        let domain = self.domain()?;
        let specs = self.specs()?;
        if self.problem.families.is_some() {
            if specs.len() != n {
                return Err(CliError::Config(format!("{} families given for n = {n}", specs.len())));
            }
            return specs.iter().map(|s| s.build(domain)).collect();
        }
        Ok(vec![specs[0].build(domain)?; n])
    }

    /// The single repeated set-function of a sweep.
    pub fn single(&self) -> Result<SetFunctionDescriptor, CliError> {
        match &self.problem.family {
            Some(f) if self.problem.families.is_none() => f.build(self.domain()?),
            _ => Err(CliError::Config("this command needs a single problem.family".into())),
        }
    }

    pub fn sl_problem(&self) -> Result<SlProblem, CliError> {
        let spec = match &self.problem.family {
            Some(f) if self.problem.families.is_none() => f,
            _ => return Err(CliError::Config("this command needs a single problem.family".into())),
        };
        let coeffs = spec
            .kind
            .coefficients()?
            .ok_or_else(|| CliError::Config("this command needs an sl_first_eigenvalue_sqrt family".into()))?;
        Ok(SlProblem::new(coeffs, self.domain()?)?)
    }

    pub fn n(&self) -> Result<usize, CliError> {
        match (self.problem.n, &self.problem.families) {
            (Some(n), _) if n >= 1 => Ok(n),
            (Some(_), _) => Err(CliError::Config("problem.n must be at least 1".into())),
            (None, Some(fs)) => Ok(fs.len()),
            (None, None) => Err(CliError::Config("problem.n is required".into())),
        }
    }

    pub fn n_values(&self) -> Result<Vec<usize>, CliError> {
        match (&self.problem.n_values, self.problem.n_range) {
            (Some(v), None) if !v.is_empty() => Ok(v.clone()),
            (None, Some([a, b])) if a <= b => Ok((a..=b).collect()),
            (None, None) => self.n().map(|n| vec![n]),
            _ => Err(CliError::Config("give a nonempty problem.n_values or an increasing problem.n_range".into())),
        }
    }

    pub fn k_values(&self) -> Result<Vec<usize>, CliError> {
        let ks: Vec<usize> = match (self.problem.k, self.problem.k_max) {
            (Some(k), None) => vec![k],
            (None, Some(m)) => (1..=m).collect(),
            _ => return Err(CliError::Config("give exactly one of problem.k and problem.k_max".into())),
        };
        if ks.is_empty() || ks[0] == 0 {
            return Err(CliError::Config("eigenvalue indices start at 1".into()));
        }
        Ok(ks)
    }

    pub fn xi_values(&self) -> Result<Vec<f64>, CliError> {
        let xs = match (&self.problem.xi_values, &self.problem.xi_range) {
            (Some(v), None) => v.clone(),
            (None, Some(r)) => r.values()?,
            _ => return Err(CliError::Config("give exactly one of problem.xi_values and problem.xi_range".into())),
        };
        if xs.is_empty() || xs.iter().any(|x| !x.is_finite() || *x <= 0.0) {
            return Err(CliError::Config("xi values must be positive and finite".into()));
        }
        Ok(xs)
    }

    pub fn format(&self, default: Format) -> Format {
        self.output.format.unwrap_or(default)
    }
}

impl XiRange {
    fn values(&self) -> Result<Vec<f64>, CliError> {
        if !(self.from > 0.0 && self.to >= self.from && self.to.is_finite()) || self.count == 0 {
            return Err(CliError::Config("xi_range needs 0 < from <= to and count >= 1".into()));
        }
        if self.count == 1 {
            return Ok(vec![self.to]);
        }
        let last = (self.count - 1) as f64;
        let mut xs: Vec<f64> = (0..self.count)
            .map(|i| {
                let t = i as f64 / last;
                match self.spacing {
                    Spacing::Log => self.from * (self.to / self.from).powf(t),
                    Spacing::Linear => self.from + (self.to - self.from) * t,
                }
            })
            .collect();
        xs[0] = self.from;
        xs[self.count - 1] = self.to;
        Ok(xs)
    }
}

/// Splits `--a.b=v` and `--a.b v` out of `args`, returning the remaining
/// arguments and the `(path, value)` pairs.
pub fn split_overrides(args: Vec<String>) -> Result<(Vec<String>, Vec<(String, String)>), CliError> {
    let mut rest = Vec::new();
    let mut overrides = Vec::new();
    let mut it = args.into_iter();
    while let Some(arg) = it.next() {
        let Some(body) = arg.strip_prefix("--") else {
            rest.push(arg);
            continue;
        };
        let (key, value) = match body.split_once('=') {
            Some((k, v)) => (k.to_string(), Some(v.to_string())),
            None => (body.to_string(), None),
        };
        if !key.contains('.') {
            rest.push(arg);
            continue;
        }
        let value = match value {
            Some(v) => v,
            None => it.next().ok_or_else(|| CliError::Config(format!("override --{key} needs a value")))?,
        };
        overrides.push((key, value));
    }
    Ok((rest, overrides))
}

/// Sets the scalar at a dotted path; numeric segments index arrays.
pub fn apply_override(doc: &mut Value, key: &str, raw: &str) -> Result<(), CliError> {
    let value: Value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    if value.is_object() || value.is_array() {
        return Err(CliError::Config(format!("override --{key} must be a scalar")));
    }
    let mut node = doc;
    let parts: Vec<&str> = key.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        let last = i + 1 == parts.len();
        node = match node {
            Value::Array(items) => {
                let idx: usize = part
                    .parse()
                    .map_err(|_| CliError::Config(format!("override --{key}: {part} is not an array index")))?;
                items
                    .get_mut(idx)
                    .ok_or_else(|| CliError::Config(format!("override --{key}: index {idx} out of range")))?
            }
            Value::Object(map) => map.entry(part.to_string()).or_insert_with(|| {
                if last {
                    Value::Null
                } else {
                    Value::Object(Default::default())
                }
            }),
            _ => return Err(CliError::Config(format!("override --{key}: {part} is inside a scalar"))),
        };
    }
    if node.is_object() || node.is_array() {
        return Err(CliError::Config(format!("override --{key} would replace a non-scalar")));
    }
    *node = value;
    Ok(())
}
