use std::path::{Path, PathBuf};
use std::time::Duration;

use intdyn::Error;
use serde_json::{json, Value};

use crate::analysis::Request;
use crate::Analysis;

pub struct Outcome {
    pub results: Value,
    /// `(file name, contents)` written next to the report.
    pub sidecars: Vec<(String, String)>,
}

fn toolkit() -> Value {
    json!({ "name": "intdyn", "version": env!("CARGO_PKG_VERSION") })
}

fn timing(elapsed: Duration, threads: usize) -> Value {
    json!({ "elapsed_ms": elapsed.as_millis() as u64, "threads": threads })
}

fn write_json(path: &Path, value: &Value) -> std::io::Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(std::io::Error::other)?;
    text.push('\n');
    std::fs::write(path, text)
}

/// Everything except `timing` depends only on the request.
pub fn write_report(
    out: &Path,
    req: &Request,
    results: Value,
    sidecars: &[(String, String)],
    elapsed: Duration,
    threads: usize,
) -> std::io::Result<PathBuf> {
    let report = json!({
        "toolkit": toolkit(),
        "request": {
            "map": req.map_spec,
            "analysis": req.analysis.name(),
            "params": req.params,
        },
        "results": results,
        "provenance": req.provenance(),
        "sidecars": sidecars.iter().map(|(name, _)| name.clone()).collect::<Vec<_>>(),
        "timing": timing(elapsed, threads),
    });
    for (name, contents) in sidecars {
        std::fs::write(out.join(name), contents)?;
    }
    let path = out.join("report.json");
    write_json(&path, &report)?;
    Ok(path)
}

pub fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Parse(_) => "parse",
        Error::Input(_) => "input",
        Error::Precondition(_) => "precondition",
        Error::Budget { .. } => "budget",
        Error::NotInfinite(_) => "not_infinite",
        Error::NotAligned(_) => "not_aligned",
        Error::Outside(_) => "outside",
        Error::NotFound(_) => "not_found",
        Error::Stalled(_) => "stalled",
        Error::Construction(_) => "construction",
        Error::Internal(_) => "internal",
    }
}

pub fn write_error(
    out: &Path,
    analysis: Analysis,
    e: &Error,
    elapsed: Duration,
    threads: usize,
) -> std::io::Result<()> {
    let report = json!({
        "toolkit": toolkit(),
        "request": { "analysis": analysis.name() },
        "error": { "kind": error_kind(e), "message": e.to_string() },
        "timing": timing(elapsed, threads),
    });
    write_json(&out.join("report.json"), &report)
}
