//! Flat `key = value` scenario files, one dotted key per line.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::CliError;

/// Channels a scenario may write to `diagnostics.csv`.
pub const CHANNELS: [&str; 12] = [
    "typeI",
    "rescaled_diam",
    "eccentricity",
    "pinching",
    "width_min",
    "width_max",
    "diameter",
    "inradius",
    "circumradius",
    "gaussian_density",
    "density_deficit",
    "harnack_min",
];

#[derive(Clone, Debug, PartialEq)]
pub enum Initial {
    Circle { t0: f64 },
    /// `engine` evolves the sampled oval instead of using the closed form.
    Oval { t0: f64, engine: bool },
    Ellipse { a: f64, b: f64, t0: f64 },
    CustomSupport { values: Vec<f64>, t0: f64 },
    Grim,
    Bowl { n: usize, r_max: f64 },
}

impl Initial {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::Circle { .. } => "circle",
            Self::Oval { .. } => "oval",
            Self::Ellipse { .. } => "ellipse",
            Self::CustomSupport { .. } => "custom_support",
            Self::Grim => "grim",
            Self::Bowl { .. } => "bowl",
        }
    }

    pub fn t0(&self) -> Option<f64> {
        match self {
            Self::Circle { t0 } | Self::Oval { t0, .. } | Self::Ellipse { t0, .. } | Self::CustomSupport { t0, .. } => Some(*t0),
            Self::Grim | Self::Bowl { .. } => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Check {
    Le(f64),
    Ge(f64),
    Lt(f64),
    Gt(f64),
    Near { target: f64, tol: f64 },
    Within { lo: f64, hi: f64 },
}

impl Check {
    pub fn holds(&self, v: f64) -> bool {
        match *self {
            Self::Le(x) => v <= x,
            Self::Ge(x) => v >= x,
            Self::Lt(x) => v < x,
            Self::Gt(x) => v > x,
            Self::Near { target, tol } => (v - target).abs() <= tol,
            Self::Within { lo, hi } => (lo..=hi).contains(&v),
        }
    }
}

impl std::fmt::Display for Check {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Le(x) => write!(f, "<= {x}"),
            Self::Ge(x) => write!(f, ">= {x}"),
            Self::Lt(x) => write!(f, "< {x}"),
            Self::Gt(x) => write!(f, "> {x}"),
            Self::Near { target, tol } => write!(f, "{target} +- {tol}"),
            Self::Within { lo, hi } => write!(f, "[{lo}, {hi}]"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioConfig {
    pub name: String,
    /// Statement exercised by the scenario, shown by `list`.
    pub anchor: String,
    pub initial: Initial,
    pub t_end: f64,
    pub resolution: usize,
    pub cadence: f64,
    pub diagnostics: Vec<String>,
    pub output_dir: PathBuf,
    /// Checks on summary constants, keyed by constant name.
    pub asserts: BTreeMap<String, Check>,
    /// Expected summary labels.
    pub expects: BTreeMap<String, String>,
}

fn config_error(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn number(map: &BTreeMap<String, String>, key: &str) -> Result<f64, CliError> {
    let raw = map.get(key).ok_or_else(|| config_error(format!("missing key {key}")))?;
    let v: f64 = raw.parse().map_err(|_| config_error(format!("{key}: not a number: {raw}")))?;
    if !v.is_finite() {
        return Err(config_error(format!("{key}: must be finite")));
    }
    Ok(v)
}

fn parse_check(key: &str, raw: &str) -> Result<Check, CliError> {
    let bad = || config_error(format!("{key}: cannot parse check {raw:?}"));
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad());
    let raw = raw.trim();
    for (op, make) in [("<=", Check::Le as fn(f64) -> Check), (">=", Check::Ge), ("<", Check::Lt), (">", Check::Gt)] {
        if let Some(rest) = raw.strip_prefix(op) {
            return Ok(make(num(rest)?));
        }
    }
    if let Some((lo, hi)) = raw.strip_prefix('[').and_then(|r| r.strip_suffix(']')).and_then(|r| r.split_once(',')) {
        let (lo, hi) = (num(lo)?, num(hi)?);
        if lo > hi {
            return Err(bad());
        }
        return Ok(Check::Within { lo, hi });
    }
    match raw.split_once("+-") {
        Some((target, tol)) => {
            let tol = num(tol)?;
            if tol < 0.0 {
                return Err(bad());
            }
            Ok(Check::Near { target: num(target)?, tol })
        }
        None => Err(bad()),
    }
}

fn safe_name(name: &str) -> bool {
    !name.is_empty()
        && name != "."
        && name != ".."
        && name.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut map = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| config_error(format!("line {}: expected key = value", lineno + 1)))?;
            let key = key.trim().to_string();
            if map.insert(key.clone(), value.trim().to_string()).is_some() {
                return Err(config_error(format!("line {}: duplicate key {key}", lineno + 1)));
            }
        }
        let text_of = |key: &str| map.get(key).cloned().ok_or_else(|| config_error(format!("missing key {key}")));
        let name = text_of("name")?;
        if !safe_name(&name) {
            return Err(config_error(format!("name {name:?} is not filesystem-safe")));
        }
        let kind = text_of("initial.kind")?;
        let initial = match kind.as_str() {
            "circle" => Initial::Circle { t0: number(&map, "initial.t0")? },
            "oval" => Initial::Oval {
                t0: number(&map, "initial.t0")?,
                engine: match map.get("initial.engine").map(String::as_str) {
                    None | Some("false") => false,
                    Some("true") => true,
                    Some(other) => return Err(config_error(format!("initial.engine: expected true or false, got {other}"))),
                },
            },
            "ellipse" => Initial::Ellipse { a: number(&map, "initial.a")?, b: number(&map, "initial.b")?, t0: number(&map, "initial.t0")? },
            "custom_support" => {
                let values = text_of("initial.values")?
                    .split(',')
                    .map(|s| s.trim().parse::<f64>().map_err(|_| config_error(format!("initial.values: bad entry {s:?}"))))
                    .collect::<Result<Vec<_>, _>>()?;
                Initial::CustomSupport { values, t0: number(&map, "initial.t0")? }
            }
            "grim" => Initial::Grim,
            "bowl" => {
                let n = number(&map, "initial.n")?;
                if n.fract() != 0.0 || !(2.0..=4.0).contains(&n) {
                    return Err(config_error(format!("initial.n must be an integer in 2..=4, got {n}")));
                }
                Initial::Bowl { n: n as usize, r_max: number(&map, "initial.r_max")? }
            }
            other => return Err(config_error(format!("unknown initial.kind {other}"))),
        };
        let t_end = match initial.t0() {
            Some(t0) => {
                let t_end = number(&map, "t_end")?;
                if !(t0 < t_end && t_end < 0.0) {
                    return Err(config_error(format!("need t0 < t_end < 0, got t0 = {t0}, t_end = {t_end}")));
                }
                t_end
            }
            None => map.get("t_end").map(|_| number(&map, "t_end")).transpose()?.unwrap_or(0.0),
        };
        let resolution = match &initial {
            Initial::CustomSupport { values, .. } => values.len(),
            _ => map.get("resolution").map(|_| number(&map, "resolution")).transpose()?.unwrap_or(256.0) as usize,
        };
        let cadence = map.get("cadence").map(|_| number(&map, "cadence")).transpose()?.unwrap_or(100.0);
        if cadence <= 0.0 {
            return Err(config_error("cadence must be positive"));
        }
        let diagnostics: Vec<String> = match map.get("diagnostics").map(String::as_str) {
            None | Some("all") => CHANNELS.iter().map(|c| c.to_string()).collect(),
            Some("") | Some("none") => Vec::new(),
            Some(list) => list.split(',').map(|s| s.trim().to_string()).collect(),
        };
        if let Some(bad) = diagnostics.iter().find(|c| !CHANNELS.contains(&c.as_str())) {
            return Err(config_error(format!("unknown diagnostics channel {bad}")));
        }
        let mut asserts = BTreeMap::new();
        let mut expects = BTreeMap::new();
        for (key, value) in &map {
            if let Some(constant) = key.strip_prefix("assert.") {
                asserts.insert(constant.to_string(), parse_check(key, value)?);
            } else if let Some(label) = key.strip_prefix("expect.") {
                expects.insert(label.to_string(), value.clone());
            } else if !matches!(
                key.as_str(),
                "name" | "anchor" | "t_end" | "resolution" | "cadence" | "diagnostics" | "output_dir"
            ) && !key.starts_with("initial.")
            {
                return Err(config_error(format!("unknown key {key}")));
            }
        }
        let config = Self {
            name,
            anchor: map.get("anchor").cloned().unwrap_or_default(),
            initial,
            t_end,
            resolution,
            cadence,
            diagnostics,
            output_dir: PathBuf::from(map.get("output_dir").map(String::as_str).unwrap_or("runs")),
            asserts,
            expects,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| config_error(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Overrides the grid size; rejected for custom support data.
    pub fn with_resolution(mut self, n: usize) -> Result<Self, CliError> {
        if matches!(self.initial, Initial::CustomSupport { .. }) && n != self.resolution {
            return Err(config_error("custom_support takes its resolution from initial.values"));
        }
        self.resolution = n;
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.resolution < 64 {
            return Err(config_error(format!("resolution must be at least 64, got {}", self.resolution)));
        }
        match self.initial {
            Initial::Ellipse { a, b, .. } if !(a > 0.0 && b > 0.0) => Err(config_error("ellipse axes must be positive")),
            Initial::Bowl { r_max, .. } if r_max <= 0.0 => Err(config_error("initial.r_max must be positive")),
            _ => Ok(()),
        }
    }

    /// Directory owned by this scenario.
    pub fn run_dir(&self, out: Option<&Path>) -> PathBuf {
        out.unwrap_or(&self.output_dir).join(&self.name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const CIRCLE: &str = "name = circle\ninitial.kind = circle\ninitial.t0 = -2\nt_end = -0.1\n";

    #[test]
    fn parses_defaults() {
        let c = ScenarioConfig::parse(CIRCLE).unwrap();
        assert_eq!(c.initial, Initial::Circle { t0: -2.0 });
        assert_eq!(c.resolution, 256);
        assert_eq!(c.diagnostics.len(), CHANNELS.len());
        assert_eq!(c.run_dir(None), PathBuf::from("runs/circle"));
    }

    #[test]
    fn parses_checks() {
        let text = format!("{CIRCLE}assert.a = <= 1e-8\nassert.b = 1.5 +- 1e-3\nassert.c = > 0\nassert.d = [0.95, 1]\nexpect.blowdown = Circle\n");
        let c = ScenarioConfig::parse(&text).unwrap();
        assert_eq!(c.asserts["a"], Check::Le(1e-8));
        assert_eq!(c.asserts["b"], Check::Near { target: 1.5, tol: 1e-3 });
        assert!(c.asserts["c"].holds(1.0) && !c.asserts["c"].holds(0.0));
        assert_eq!(c.asserts["d"], Check::Within { lo: 0.95, hi: 1.0 });
        assert_eq!(c.expects["blowdown"], "Circle");
    }

    #[test]
    fn rejects_bad_configs() {
        for bad in [
            CIRCLE.replace("-0.1", "0.5"),
            CIRCLE.replace("-0.1", "-3"),
            CIRCLE.replace("name = circle", "name = ../x"),
            format!("{CIRCLE}resolution = 32\n"),
            format!("{CIRCLE}diagnostics = nonsense\n"),
            format!("{CIRCLE}colour = red\n"),
            format!("{CIRCLE}t_end = -1\n"),
            format!("{CIRCLE}assert.x = about 3\n"),
            CIRCLE.replace("kind = circle", "kind = spiral"),
            "name = b\ninitial.kind = bowl\ninitial.n = 2.5\ninitial.r_max = 10\n".to_string(),
        ] {
            assert!(matches!(ScenarioConfig::parse(&bad), Err(CliError::Config(_))), "{bad}");
        }
    }

    #[test]
    fn custom_support_fixes_resolution() {
        let values = vec!["1.0"; 64].join(",");
        let c = ScenarioConfig::parse(&format!("name = c\ninitial.kind = custom_support\ninitial.values = {values}\ninitial.t0 = -1\nt_end = -0.5\n")).unwrap();
        assert_eq!(c.resolution, 64);
        assert!(c.clone().with_resolution(64).is_ok());
        assert!(c.with_resolution(128).is_err());
    }
}
