//! Static checks of a configuration: coefficient bounds, family compatibility
//! and a seeded monotonicity probe. Nothing is solved.

use equipart::setfuncs::SlCoefficients;
use equipart::{compatible, Interval, SetFunctionDescriptor};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{KindSpec, RunConfig};
use crate::CliError;

const PROBES: usize = 64;

#[derive(Debug, Default, Serialize)]
pub struct Diagnostics {
    pub ok: bool,
    pub violations: Vec<String>,
    pub compatibility: Vec<String>,
    pub monotonicity_probes: usize,
    pub monotonicity: Vec<String>,
}

pub fn validate(cfg: &RunConfig) -> Result<Diagnostics, CliError> {
    let mut d = Diagnostics::default();
    let specs = cfg.specs()?;
    let domain = match cfg.domain() {
        Ok(dom) => Some(dom),
        Err(e) => {
            d.violations.push(e.message().to_string());
            None
        }
    };
    let mut built: Vec<Option<SetFunctionDescriptor>> = Vec::new();
    for (i, s) in specs.iter().enumerate() {
        if let KindSpec::SlFirstEigenvalueSqrt { p, q, w, beta, .. } = &s.kind {
            let v = SlCoefficients::violations(p, q, w, *beta);
            d.violations.extend(v.iter().map(|m| format!("family {i}: {m}")));
            if !v.is_empty() {
                built.push(None);
                continue;
            }
        }
        match domain.map(|dom| s.build(dom)) {
            Some(Ok(f)) => built.push(Some(f)),
            Some(Err(e)) => {
                d.violations.push(format!("family {i}: {}", e.message()));
                built.push(None);
            }
            None => built.push(None),
        }
    }
    for (i, pair) in built.windows(2).enumerate() {
        if let [Some(f), Some(g)] = pair {
            if !compatible(f, g) {
                d.compatibility.push(format!(
                    "families {i} and {}: {:?}/{:?} with empty values {} and {}",
                    i + 1,
                    f.direction(),
                    g.direction(),
                    f.empty_value(),
                    g.empty_value()
                ));
            }
        }
    }
    if let Some(dom) = domain {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        for (i, f) in built.iter().enumerate() {
            let Some(f) = f else { continue };
            for _ in 0..PROBES {
                d.monotonicity_probes += 1;
                if let Some(msg) = probe(f, dom, &mut rng) {
                    d.monotonicity.push(format!("family {i}: {msg}"));
                }
            }
        }
    }
    d.ok = d.violations.is_empty() && d.compatibility.is_empty() && d.monotonicity.is_empty();
    Ok(d)
}

/// Compares `f` on a random nested pair inside `dom`.
fn probe(f: &SetFunctionDescriptor, dom: Interval, rng: &mut ChaCha8Rng) -> Option<String> {
    let mut t: [f64; 4] = std::array::from_fn(|_| rng.random_range(0.0..1.0));
    t.sort_by(f64::total_cmp);
    let at = |s: f64| dom.a() + s * dom.len();
    let outer = Interval::new(at(t[0]), at(t[3])).ok()?;
    let inner = Interval::new(at(t[1]), at(t[2])).ok()?;
    let (vi, vo) = match (f.evaluate(inner), f.evaluate(outer)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return Some(format!("evaluation failed: {e}")),
    };
    let slack = 1e-12 * vi.abs().max(vo.abs());
    let ok = if f.monotonicity().is_increasing() { vi <= vo + slack } else { vi + slack >= vo };
    (!ok).then(|| format!("f({inner:?}) = {vi} against f({outer:?}) = {vo}"))
}
