//! The batch commands. Each returns an [`Outcome`] so the binary only prints
//! and exits.

use std::path::Path;

use serde_json::json;
use supercluster::compat::{check_compatible, Mode};
use supercluster::laurent::{laurent_certify, scan_allowed_sequences};
use supercluster::quiver::differential_report;
use supercluster::render::Style;
use supercluster::seed::{QuantumSeed, SeedError};

use crate::input::{read_source, SeedSource};
use crate::{EXIT_INCOMPATIBLE, EXIT_MALFORMED, EXIT_NOT_ALLOWED, EXIT_NOT_DIVISIBLE, EXIT_OK};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Self { code: EXIT_OK, stdout, stderr: String::new() }
    }

    fn fail(code: i32, stderr: String) -> Self {
        Self { code, stdout: String::new(), stderr }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Pretty,
    Latex,
}

fn pretty_json<T: serde::Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn load(path: &Path) -> Result<SeedSource, Outcome> {
    read_source(path).map_err(|e| Outcome::fail(EXIT_MALFORMED, format!("error: {e}\n")))
}

/// Maps a seed construction error onto the exit-code contract.
fn seed_error(err: SeedError) -> Outcome {
    match err {
        SeedError::Incompatible(report) | SeedError::CompatibilityLost { report, .. } => Outcome {
            code: EXIT_INCOMPATIBLE,
            stdout: pretty_json(&report),
            stderr: "error: pair is not compatible\n".into(),
        },
        SeedError::Dimension(e) => Outcome::fail(EXIT_MALFORMED, format!("error: {e}\n")),
        other => Outcome::fail(EXIT_MALFORMED, format!("error: {other}\n")),
    }
}

pub fn validate(path: &Path, mode: Option<Mode>) -> Outcome {
    let src = match load(path) {
        Ok(s) => s,
        Err(o) => return o,
    };
    let mode = src.mode(mode);
    let (quiver, lambda) = match &src {
        SeedSource::Input(i) => (&i.quiver, &i.lambda),
        SeedSource::State(s) => (s.quiver(), s.lambda_init()),
    };
    match check_compatible(quiver, lambda, mode) {
        Ok(report) => {
            let code = if report.ok { EXIT_OK } else { EXIT_INCOMPATIBLE };
            Outcome { code, stdout: pretty_json(&report), stderr: String::new() }
        }
        Err(e) => Outcome::fail(EXIT_MALFORMED, format!("error: {}: {e}\n", path.display())),
    }
}

/// Parses `1,2,1` into 1-based vertices; the empty string is the empty sequence.
pub fn parse_seq(text: &str) -> Result<Vec<usize>, String> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| match s.parse::<usize>() {
            Ok(v) if v >= 1 => Ok(v),
            _ => Err(format!("invalid vertex {s:?} in sequence")),
        })
        .collect()
}

fn check_range(seed: &QuantumSeed, seq: &[usize]) -> Result<(), Outcome> {
    let dim = seed.torus().shape().dim();
    match seq.iter().position(|&v| v > dim) {
        Some(t) => Err(Outcome::fail(
            EXIT_MALFORMED,
            format!("error: step {}: vertex {} out of range 1..={dim}\n", t + 1, seq[t]),
        )),
        None => Ok(()),
    }
}

/// One line per variable, `X1 = …` or `X_{1} = …`.
pub fn render_lines(seed: &QuantumSeed, style: Style) -> String {
    let mut out = String::new();
    for (i, text) in seed.render_vars(style).into_iter().enumerate() {
        match style {
            Style::Pretty => out.push_str(&format!("X{} = {text}\n", i + 1)),
            Style::Latex => out.push_str(&format!("X_{{{}}} = {text}\n", i + 1)),
        }
    }
    out
}

pub fn mutate(path: &Path, seq: &[usize], format: Format, mode: Option<Mode>) -> Outcome {
    let seed = match load(path).map(|s| s.into_seed(mode)) {
        Ok(Ok(s)) => s,
        Ok(Err(e)) => return seed_error(e),
        Err(o) => return o,
    };
    if let Err(o) = check_range(&seed, seq) {
        return o;
    }
    let mut cur = seed;
    for (t, &v) in seq.iter().enumerate() {
        match cur.mutate(v - 1) {
            Ok(next) => cur = next,
            Err(SeedError::Frozen { vertex }) => {
                let body = json!({"step": t + 1, "vertex": vertex, "reason": "frozen"});
                return Outcome::fail(
                    EXIT_NOT_ALLOWED,
                    format!("error: step {}: vertex {vertex} is frozen\n{body}\n", t + 1),
                );
            }
            Err(SeedError::NotAllowed(a)) => {
                let body = json!({"step": t + 1, "vertex": a.vertex, "reason": "not-allowed", "analysis": a});
                return Outcome::fail(
                    EXIT_NOT_ALLOWED,
                    format!("error: step {}: mutation at vertex {} is not allowed\n{body}\n", t + 1, a.vertex),
                );
            }
            Err(e @ SeedError::NotDivisible { .. }) => {
                return Outcome::fail(EXIT_NOT_DIVISIBLE, format!("error: step {}: {e}\n", t + 1));
            }
            Err(e) => return seed_error(e),
        }
    }
    match format {
        Format::Json => Outcome::ok(pretty_json(&cur)),
        Format::Pretty => Outcome::ok(render_lines(&cur, Style::Pretty)),
        Format::Latex => Outcome::ok(render_lines(&cur, Style::Latex)),
    }
}

/// Certifies one sequence, or with `depth` every allowed sequence up to that length.
pub fn laurent_check(path: &Path, seq: &[usize], depth: Option<usize>, mode: Option<Mode>) -> Outcome {
    let seed = match load(path).map(|s| s.into_seed(mode)) {
        Ok(Ok(s)) => s,
        Ok(Err(e)) => return seed_error(e),
        Err(o) => return o,
    };
    if let Some(depth) = depth {
        let scan = scan_allowed_sequences(&seed, depth);
        let code = if scan.failures.is_empty() { EXIT_OK } else { EXIT_NOT_DIVISIBLE };
        return Outcome { code, stdout: pretty_json(&scan), stderr: String::new() };
    }
    if let Err(o) = check_range(&seed, seq) {
        return o;
    }
    let zero_based: Vec<usize> = seq.iter().map(|v| v - 1).collect();
    let (cert, _) = laurent_certify(&seed, &zero_based);
    let code = if cert.refused() {
        EXIT_NOT_ALLOWED
    } else if !cert.overall || !cert.all_integral() {
        EXIT_NOT_DIVISIBLE
    } else {
        EXIT_OK
    };
    Outcome { code, stdout: pretty_json(&cert), stderr: String::new() }
}

pub fn allowed_report(max_n: usize, max_m: usize, max_mult: u32, sample: usize) -> Outcome {
    Outcome::ok(pretty_json(&differential_report(max_n, max_m, max_mult, sample)))
}
