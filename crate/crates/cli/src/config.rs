//! Sectioned key/value experiment configuration: parsing, validation, and
//! canonical rendering.
//!
//! The format is a flat INI-style text with four fixed sections:
//!
//! ```text
//! [experiment]
//! name = free-oracle
//! dimension = 1
//! seed = 7
//!
//! [grid]
//! points = 512
//! half_width = 20
//!
//! [solver]
//! lambda = 0
//! dt = 1e-3
//!
//! [params]
//! amplitude = 0.8
//!
//! [output]
//! dir = out/free-oracle
//! ```
//!
//! `[params]` keys are experiment-specific strings; every other section has a
//! fixed schema (see `docs/config.md`). Errors carry the offending line
//! number so a malformed file can be fixed without guesswork.

use std::collections::BTreeMap;
use std::fmt;

/// A configuration problem, with the 1-based line it came from when the
/// problem is tied to a specific line of input.
#[derive(Debug, Clone)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl ConfigError {
    pub fn at(line: usize, message: impl Into<String>) -> Self {
        ConfigError { line: Some(line), message: message.into() }
    }

    pub fn general(message: impl Into<String>) -> Self {
        ConfigError { line: None, message: message.into() }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(n) => write!(f, "config error at line {n}: {}", self.message),
            None => write!(f, "config error: {}", self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

type Result<T> = std::result::Result<T, ConfigError>;

/// A fully validated experiment configuration.
///
/// `rho` is intentionally absent: the regularity exponent is always derived
/// from the dimension (see [`ExperimentConfig::rho`]) and attempting to set
/// it in a config file is rejected.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    /// Experiment kind; must match a registered runner.
    pub name: String,
    /// Spatial dimension, 1 or 2.
    pub dimension: u32,
    /// Seed for any randomized sampling inside the experiment.
    pub seed: u64,
    /// Points per axis (power of two).
    pub points: u32,
    /// Half-width of the periodic box.
    pub half_width: f64,
    /// Nonlinearity coupling.
    pub lambda: f64,
    /// Time step.
    pub dt: f64,
    /// Whether the solver applies a spectral de-aliasing filter.
    pub dealias: bool,
    /// Experiment-specific parameters, validated by the runner.
    pub params: BTreeMap<String, String>,
    /// Directory for results.csv / manifest.json / snapshots.
    pub out_dir: String,
    /// Whether the runner should also write field snapshots.
    pub snapshots: bool,
}

impl ExperimentConfig {
    /// Regularity exponent used by the growth and pairing estimates; always
    /// derived from the dimension, never user-set.
    pub fn rho(&self) -> f64 {
        (self.dimension as f64 + 1.0) / 2.0
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.params.get(key).map(|s| s.as_str())
    }

    /// Required float parameter.
    pub fn param_f64(&self, key: &str) -> Result<f64> {
        match self.raw(key) {
            Some(v) => parse_f64(key, v),
            None => Err(ConfigError::general(format!("missing required param `{key}`"))),
        }
    }

    /// Optional float parameter with a documented default.
    pub fn param_f64_or(&self, key: &str, default: f64) -> Result<f64> {
        match self.raw(key) {
            Some(v) => parse_f64(key, v),
            None => Ok(default),
        }
    }

    /// Optional integer parameter with a documented default.
    pub fn param_u64_or(&self, key: &str, default: u64) -> Result<u64> {
        match self.raw(key) {
            Some(v) => v
                .parse::<u64>()
                .map_err(|_| ConfigError::general(format!("param `{key}`: not an integer: `{v}`"))),
            None => Ok(default),
        }
    }

    /// Required comma-separated float list parameter.
    pub fn param_list_f64(&self, key: &str) -> Result<Vec<f64>> {
        let v = self
            .raw(key)
            .ok_or_else(|| ConfigError::general(format!("missing required param `{key}`")))?;
        let mut out = Vec::new();
        for piece in v.split(',') {
            out.push(parse_f64(key, piece.trim())?);
        }
        if out.is_empty() {
            return Err(ConfigError::general(format!("param `{key}`: empty list")));
        }
        Ok(out)
    }

    /// Optional comma-separated float list with a default.
    pub fn param_list_f64_or(&self, key: &str, default: &[f64]) -> Result<Vec<f64>> {
        if self.raw(key).is_some() {
            self.param_list_f64(key)
        } else {
            Ok(default.to_vec())
        }
    }

    /// Rejects any `[params]` key not in the runner's allow-list.
    pub fn check_param_keys(&self, allowed: &[&str]) -> Result<()> {
        for key in self.params.keys() {
            if !allowed.contains(&key.as_str()) {
                return Err(ConfigError::general(format!(
                    "unknown param `{key}` for experiment `{}` (allowed: {})",
                    self.name,
                    allowed.join(", ")
                )));
            }
        }
        Ok(())
    }

    /// Canonical text rendering; parsing the output reproduces the config.
    pub fn render(&self) -> String {
        let mut s = String::new();
        s.push_str("[experiment]\n");
        s.push_str(&format!("name = {}\n", self.name));
        s.push_str(&format!("dimension = {}\n", self.dimension));
        s.push_str(&format!("seed = {}\n", self.seed));
        s.push_str("\n[grid]\n");
        s.push_str(&format!("points = {}\n", self.points));
        s.push_str(&format!("half_width = {}\n", self.half_width));
        s.push_str("\n[solver]\n");
        s.push_str(&format!("lambda = {}\n", self.lambda));
        s.push_str(&format!("dt = {}\n", self.dt));
        s.push_str(&format!("dealias = {}\n", self.dealias));
        if !self.params.is_empty() {
            s.push_str("\n[params]\n");
            for (k, v) in &self.params {
                s.push_str(&format!("{k} = {v}\n"));
            }
        }
        s.push_str("\n[output]\n");
        s.push_str(&format!("dir = {}\n", self.out_dir));
        s.push_str(&format!("snapshots = {}\n", self.snapshots));
        s
    }
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    let x: f64 = v
        .parse()
        .map_err(|_| ConfigError::general(format!("param `{key}`: not a number: `{v}`")))?;
    if !x.is_finite() {
        return Err(ConfigError::general(format!("param `{key}`: not finite: `{v}`")));
    }
    Ok(x)
}

const SECTIONS: [&str; 5] = ["experiment", "grid", "solver", "params", "output"];

struct RawEntry {
    line: usize,
    value: String,
}

/// Parses and validates a configuration text.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    // first pass: collect (section, key) -> (line, value), rejecting
    // malformed lines, unknown sections, and duplicate keys.
    let mut entries: BTreeMap<(String, String), RawEntry> = BTreeMap::new();
    let mut section: Option<String> = None;
    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = strip_comment(raw_line).trim();
        if line.is_empty() {
            continue;
        }
        if let Some(inner) = line.strip_prefix('[') {
            let name = inner
                .strip_suffix(']')
                .ok_or_else(|| ConfigError::at(line_no, "unterminated section header"))?
                .trim();
            if !SECTIONS.contains(&name) {
                return Err(ConfigError::at(
                    line_no,
                    format!("unknown section `[{name}]` (expected one of [{}])", SECTIONS.join("], [")),
                ));
            }
            section = Some(name.to_string());
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(ConfigError::at(line_no, format!("expected `key = value`, got `{line}`")));
        };
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if key.is_empty() {
            return Err(ConfigError::at(line_no, "empty key"));
        }
        let Some(sec) = section.clone() else {
            return Err(ConfigError::at(line_no, format!("key `{key}` appears before any section header")));
        };
        if key == "rho" {
            return Err(ConfigError::at(
                line_no,
                "`rho` is derived from the dimension as (d + 1) / 2 and cannot be set",
            ));
        }
        if entries.insert((sec.clone(), key.clone()), RawEntry { line: line_no, value }).is_some() {
            return Err(ConfigError::at(line_no, format!("duplicate key `{key}` in section `[{sec}]`")));
        }
    }

    // second pass: lift typed fields out, leaving [params] free-form.
    let mut fields = Fields { entries };
    let name = fields.required("experiment", "name")?;
    if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') {
        return Err(ConfigError::general(format!(
            "field `name` in [experiment]: invalid experiment name `{name}`"
        )));
    }
    let dimension = fields.required_parsed::<u32>("experiment", "dimension")?;
    if dimension != 1 && dimension != 2 {
        return Err(ConfigError::general(format!(
            "field `dimension` in [experiment]: must be 1 or 2, got {dimension}"
        )));
    }
    let seed = fields.optional_parsed::<u64>("experiment", "seed")?.unwrap_or(0);

    let points = fields.required_parsed::<u32>("grid", "points")?;
    if !points.is_power_of_two() || points < 8 {
        return Err(ConfigError::general(format!(
            "field `points` in [grid]: must be a power of two >= 8, got {points}"
        )));
    }
    let half_width = fields.required_parsed::<f64>("grid", "half_width")?;
    if !(half_width.is_finite() && half_width > 0.0) {
        return Err(ConfigError::general(format!(
            "field `half_width` in [grid]: must be a positive number, got {half_width}"
        )));
    }

    let lambda = fields.required_parsed::<f64>("solver", "lambda")?;
    if !lambda.is_finite() {
        return Err(ConfigError::general("field `lambda` in [solver]: must be finite".to_string()));
    }
    let dt = fields.required_parsed::<f64>("solver", "dt")?;
    if !(dt.is_finite() && dt > 0.0) {
        return Err(ConfigError::general(format!(
            "field `dt` in [solver]: must be a positive number, got {dt}"
        )));
    }
    let dealias = fields.optional_parsed::<bool>("solver", "dealias")?.unwrap_or(false);

    let out_dir = fields
        .optional("output", "dir")
        .unwrap_or_else(|| format!("out/{name}"));
    let snapshots = fields.optional_parsed::<bool>("output", "snapshots")?.unwrap_or(false);

    // whatever remains must live in [params]; anything else is an unknown key.
    let mut params = BTreeMap::new();
    for ((sec, key), entry) in fields.entries {
        if sec == "params" {
            params.insert(key, entry.value);
        } else {
            return Err(ConfigError::at(entry.line, format!("unknown key `{key}` in section `[{sec}]`")));
        }
    }

    Ok(ExperimentConfig {
        name,
        dimension,
        seed,
        points,
        half_width,
        lambda,
        dt,
        dealias,
        params,
        out_dir,
        snapshots,
    })
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(pos) => &line[..pos],
        None => line,
    }
}

struct Fields {
    entries: BTreeMap<(String, String), RawEntry>,
}

impl Fields {
    fn take(&mut self, section: &str, key: &str) -> Option<RawEntry> {
        self.entries.remove(&(section.to_string(), key.to_string()))
    }

    fn required(&mut self, section: &str, key: &str) -> Result<String> {
        self.take(section, key)
            .map(|e| e.value)
            .ok_or_else(|| ConfigError::general(format!("missing required field `{key}` in [{section}]")))
    }

    fn required_parsed<T: std::str::FromStr>(&mut self, section: &str, key: &str) -> Result<T> {
        let entry = self
            .take(section, key)
            .ok_or_else(|| ConfigError::general(format!("missing required field `{key}` in [{section}]")))?;
        entry.value.parse::<T>().map_err(|_| {
            ConfigError::at(entry.line, format!("field `{key}` in [{section}]: cannot parse `{}`", entry.value))
        })
    }

    fn optional(&mut self, section: &str, key: &str) -> Option<String> {
        self.take(section, key).map(|e| e.value)
    }

    fn optional_parsed<T: std::str::FromStr>(&mut self, section: &str, key: &str) -> Result<Option<T>> {
        match self.take(section, key) {
            None => Ok(None),
            Some(entry) => entry.value.parse::<T>().map(Some).map_err(|_| {
                ConfigError::at(entry.line, format!("field `{key}` in [{section}]: cannot parse `{}`", entry.value))
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOOD: &str = "\
[experiment]
name = free-oracle
dimension = 1
seed = 7

[grid]
points = 512
half_width = 20

[solver]
lambda = 0
dt = 1e-3

[params]
amplitude = 0.8
t_end = 1.0

[output]
dir = out/free-oracle
";

    #[test]
    fn parses_a_complete_config() {
        let cfg = parse_config(GOOD).unwrap();
        assert_eq!(cfg.name, "free-oracle");
        assert_eq!(cfg.dimension, 1);
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.points, 512);
        assert_eq!(cfg.half_width, 20.0);
        assert_eq!(cfg.lambda, 0.0);
        assert_eq!(cfg.dt, 1e-3);
        assert!(!cfg.dealias);
        assert_eq!(cfg.out_dir, "out/free-oracle");
        assert_eq!(cfg.param_f64("amplitude").unwrap(), 0.8);
        assert_eq!(cfg.param_f64_or("missing", 2.5).unwrap(), 2.5);
        assert_eq!(cfg.rho(), 1.0);
    }

    #[test]
    fn rho_is_derived_and_cannot_be_set() {
        let text = GOOD.replace("amplitude = 0.8", "rho = 1.0");
        let err = parse_config(&text).unwrap_err();
        assert!(err.message.contains("derived from the dimension"), "{err}");
        assert!(err.line.is_some());
        // dimension 2 derives 3/2
        let text = GOOD.replace("dimension = 1", "dimension = 2");
        assert_eq!(parse_config(&text).unwrap().rho(), 1.5);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let text = GOOD.replace("points = 512", "points 512");
        let err = parse_config(&text).unwrap_err();
        assert_eq!(err.line, Some(7));
        assert!(err.message.contains("key = value"), "{err}");

        let text = GOOD.replace("[grid]", "[mesh]");
        let err = parse_config(&text).unwrap_err();
        assert_eq!(err.line, Some(6));

        let text = format!("{GOOD}\n[params]\namplitude = 0.9\n");
        let err = parse_config(&text).unwrap_err();
        assert!(err.message.contains("duplicate key `amplitude`"), "{err}");
    }

    #[test]
    fn validates_field_domains() {
        for (from, to, needle) in [
            ("points = 512", "points = 500", "power of two"),
            ("dimension = 1", "dimension = 3", "must be 1 or 2"),
            ("dt = 1e-3", "dt = 0", "positive"),
            ("half_width = 20", "half_width = -4", "positive"),
            ("name = free-oracle", "name = bad name!", "invalid experiment name"),
        ] {
            let text = GOOD.replace(from, to);
            let err = parse_config(&text).unwrap_err();
            assert!(err.message.contains(needle), "{from} -> {to}: {err}");
        }
        let text = GOOD.replace("dt = 1e-3", "");
        let err = parse_config(&text).unwrap_err();
        assert!(err.message.contains("missing required field `dt`"), "{err}");
    }

    #[test]
    fn render_round_trips() {
        let cfg = parse_config(GOOD).unwrap();
        let text = cfg.render();
        let back = parse_config(&text).unwrap();
        assert_eq!(back.name, cfg.name);
        assert_eq!(back.params, cfg.params);
        assert_eq!(back.out_dir, cfg.out_dir);
        assert_eq!(text, back.render());
    }

    #[test]
    fn comments_and_unknown_keys() {
        let text = GOOD.replace("seed = 7", "seed = 7  # fixed for reproducibility");
        assert_eq!(parse_config(&text).unwrap().seed, 7);

        let text = GOOD.replace("seed = 7", "seed = 7\ncolor = blue");
        let err = parse_config(&text).unwrap_err();
        assert!(err.message.contains("unknown key `color`"), "{err}");

        let cfg = parse_config(GOOD).unwrap();
        assert!(cfg.check_param_keys(&["amplitude", "t_end"]).is_ok());
        let err = cfg.check_param_keys(&["amplitude"]).unwrap_err();
        assert!(err.message.contains("unknown param `t_end`"), "{err}");
    }

    #[test]
    fn list_params_parse() {
        let text = GOOD.replace("amplitude = 0.8", "amplitude = 0.8\ntimes = 0.5, 1, 2");
        let cfg = parse_config(&text).unwrap();
        assert_eq!(cfg.param_list_f64("times").unwrap(), vec![0.5, 1.0, 2.0]);
        assert_eq!(cfg.param_list_f64_or("absent", &[3.0]).unwrap(), vec![3.0]);
        assert!(cfg.param_list_f64("absent").is_err());
    }
}
