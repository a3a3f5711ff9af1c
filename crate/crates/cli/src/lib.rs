//! Scenario runner for the mcflab laboratory: parses scenario files, runs
//! them, persists CSV and JSON artifacts and compares summaries.

pub mod config;
pub mod scenario;

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde_json::{json, Map, Value};

pub use config::{Check, Initial, ScenarioConfig};
pub use scenario::{execute, Outcome};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(#[from] mcflab::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Numerical(_) => 3,
            Self::Config(_) | Self::Io { .. } => 2,
        }
    }
}

fn io_error(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.to_path_buf(), source }
}

/// Scenario files shipped with the tool, in listing order.
pub const BUILTIN: [(&str, &str); 10] = [
    ("circle", include_str!("../scenarios/circle.cfg")),
    ("circle_fine", include_str!("../scenarios/circle_fine.cfg")),
    ("ellipse", include_str!("../scenarios/ellipse.cfg")),
    ("ellipse_flat", include_str!("../scenarios/ellipse_flat.cfg")),
    ("custom_support", include_str!("../scenarios/custom_support.cfg")),
    ("oval", include_str!("../scenarios/oval.cfg")),
    ("oval_engine", include_str!("../scenarios/oval_engine.cfg")),
    ("grim", include_str!("../scenarios/grim.cfg")),
    ("bowl2", include_str!("../scenarios/bowl2.cfg")),
    ("bowl3", include_str!("../scenarios/bowl3.cfg")),
];

pub fn builtin(name: &str) -> Option<Result<ScenarioConfig, CliError>> {
    BUILTIN.iter().find(|(n, _)| *n == name).map(|(_, text)| ScenarioConfig::parse(text))
}

/// Rows `(name, kind, anchor)` whose fields contain `filter`.
pub fn list_catalog(filter: Option<&str>) -> Result<Vec<[String; 3]>, CliError> {
    let mut rows = Vec::new();
    for (_, text) in BUILTIN {
        let c = ScenarioConfig::parse(text)?;
        let row = [c.name.clone(), c.initial.kind().to_string(), c.anchor.clone()];
        if filter.is_none_or(|f| row.iter().any(|field| field.contains(f))) {
            rows.push(row);
        }
    }
    Ok(rows)
}

/// Seventeen significant digits, enough to round-trip every `f64`.
fn float(v: f64) -> String {
    format!("{v:.16e}")
}

fn json_number(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        json!(v.to_string())
    }
}

fn value_number(v: &Value) -> Option<f64> {
    match v {
        Value::Number(n) => n.as_f64(),
        Value::String(s) => s.parse().ok(),
        _ => None,
    }
}

/// Writes through a temporary file in the same directory, then renames.
fn write_atomic(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    let tmp = dir.join(format!(".{name}.tmp"));
    std::fs::write(&tmp, contents).map_err(io_error(&tmp))?;
    let target = dir.join(name);
    std::fs::rename(&tmp, &target).map_err(io_error(&target))
}

pub fn flow_csv(outcome: &Outcome) -> String {
    let mut s = String::from("t,theta_index,h\n");
    if let Some(flow) = &outcome.flow {
        for (t, frame) in flow.times().iter().zip(flow.frames()) {
            let t = float(*t);
            for (i, h) in frame.values().iter().enumerate() {
                let _ = writeln!(s, "{t},{i},{}", float(*h));
            }
        }
    }
    s
}

pub fn diagnostics_csv(outcome: &Outcome, channels: &[String]) -> String {
    let mut s = String::from("t,channel,value\n");
    let series = &outcome.series;
    for (m, t) in series.times.iter().enumerate() {
        let t = float(*t);
        for name in channels {
            if let Some(values) = series.channel(name) {
                let _ = writeln!(s, "{t},{name},{}", float(values[m]));
            }
        }
    }
    s
}

fn profile_csv(header: &[&str], rows: &[Vec<f64>]) -> String {
    let mut s = header.join(",") + "\n";
    for row in rows {
        s += &row.iter().map(|v| float(*v)).collect::<Vec<_>>().join(",");
        s.push('\n');
    }
    s
}

pub fn summary(config: &ScenarioConfig, outcome: &Outcome) -> Value {
    let mut assertions = Vec::new();
    for (name, check) in &config.asserts {
        let value = outcome.constants.get(name).copied();
        assertions.push(json!({
            "name": name,
            "check": check.to_string(),
            "value": value.map(json_number).unwrap_or(Value::Null),
            "pass": value.is_some_and(|v| check.holds(v)),
        }));
    }
    for (name, expected) in &config.expects {
        let value = outcome.labels.get(name);
        assertions.push(json!({
            "name": name,
            "check": format!("== {expected}"),
            "value": value,
            "pass": value == Some(expected),
        }));
    }
    let pass = assertions.iter().all(|a| a["pass"] == json!(true));
    let constants: Map<String, Value> = outcome.constants.iter().map(|(k, v)| (k.clone(), json_number(*v))).collect();
    json!({
        "scenario": config.name,
        "kind": config.initial.kind(),
        "resolution": config.resolution,
        "labels": outcome.labels,
        "constants": constants,
        "assertions": assertions,
        "pass": pass,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunReport {
    pub name: String,
    pub dir: PathBuf,
    pub pass: bool,
    pub failed: Vec<String>,
}

/// Runs one scenario into `dir` and reports its assertions.
pub fn run_scenario(config: &ScenarioConfig, dir: &Path) -> Result<RunReport, CliError> {
    let outcome = execute(config)?;
    std::fs::create_dir_all(dir).map_err(io_error(dir))?;
    write_atomic(dir, "flow.csv", &flow_csv(&outcome))?;
    write_atomic(dir, "diagnostics.csv", &diagnostics_csv(&outcome, &config.diagnostics))?;
    if let Some((header, rows)) = &outcome.profile {
        write_atomic(dir, "profile.csv", &profile_csv(header, rows))?;
    }
    let summary = summary(config, &outcome);
    let text = serde_json::to_string_pretty(&summary).map_err(|e| CliError::Config(e.to_string()))? + "\n";
    write_atomic(dir, "summary.json", &text)?;
    let failed = summary["assertions"]
        .as_array()
        .into_iter()
        .flatten()
        .filter(|a| a["pass"] != json!(true))
        .map(|a| format!("{} {} (got {})", a["name"].as_str().unwrap_or(""), a["check"].as_str().unwrap_or(""), a["value"]))
        .collect::<Vec<_>>();
    Ok(RunReport { name: config.name.clone(), dir: dir.to_path_buf(), pass: failed.is_empty(), failed })
}

/// Runs scenarios on up to `jobs` threads; results keep the input order.
pub fn run_all(configs: &[ScenarioConfig], out: Option<&Path>, jobs: usize) -> Result<Vec<Result<RunReport, CliError>>, CliError> {
    let dirs: Vec<PathBuf> = configs.iter().map(|c| c.run_dir(out)).collect();
    let distinct: BTreeSet<&PathBuf> = dirs.iter().collect();
    if distinct.len() != dirs.len() {
        return Err(CliError::Config("scenarios share an output directory".into()));
    }
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<Result<RunReport, CliError>>>> = Mutex::new((0..configs.len()).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..jobs.clamp(1, configs.len().max(1)) {
            scope.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::Relaxed);
                if k >= configs.len() {
                    break;
                }
                let result = run_scenario(&configs[k], &dirs[k]);
                results.lock().expect("worker panicked")[k] = Some(result);
            });
        }
    });
    Ok(results.into_inner().expect("worker panicked").into_iter().map(|r| r.expect("every scenario ran")).collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct Difference {
    pub key: String,
    pub a: String,
    pub b: String,
    pub abs: f64,
    pub rel: f64,
    pub flagged: bool,
}

fn read_summary(path: &Path) -> Result<Value, CliError> {
    let file = if path.is_dir() { path.join("summary.json") } else { path.to_path_buf() };
    let text = std::fs::read_to_string(&file).map_err(io_error(&file))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", file.display())))
}

/// Key-by-key differences of two summaries. Numbers pass when either the
/// absolute or the relative difference is within `tol`; labels must match.
pub fn compare(a: &Path, b: &Path, tol: f64) -> Result<Vec<Difference>, CliError> {
    let (sa, sb) = (read_summary(a)?, read_summary(b)?);
    let mut out = Vec::new();
    for section in ["labels", "constants"] {
        let empty = Map::new();
        let ma = sa[section].as_object().unwrap_or(&empty);
        let mb = sb[section].as_object().unwrap_or(&empty);
        let keys: BTreeSet<&String> = ma.keys().chain(mb.keys()).collect();
        for key in keys {
            let (va, vb) = (ma.get(key), mb.get(key));
            let show = |v: Option<&Value>| v.map_or("missing".to_string(), |v| v.to_string());
            let (abs, rel, flagged) = match (va.and_then(value_number), vb.and_then(value_number)) {
                (Some(x), Some(y)) if section == "constants" => {
                    let abs = if x == y { 0.0 } else { (x - y).abs() };
                    let rel = if abs == 0.0 { 0.0 } else { abs / x.abs().max(y.abs()) };
                    (abs, rel, !(abs <= tol || rel <= tol))
                }
                _ => (f64::NAN, f64::NAN, va != vb),
            };
            out.push(Difference { key: format!("{section}.{key}"), a: show(va), b: show(vb), abs, rel, flagged });
        }
    }
    Ok(out)
}
