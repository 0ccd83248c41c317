//! Experiment configuration: flat `key = value` text under bracketed
//! section headers. Unknown keys are rejected and every numeric parameter is
//! range-checked before dispatch.

use isoperi_core::weights::{self, WeightPair, WeightProfile};
use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for ConfigError {}

type CResult<T> = Result<T, ConfigError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    Profile,
    OneDim,
    CurveSweep,
    Fuglede,
    Symmetrize,
    Counterexample1,
    Counterexample2,
    Calibrate,
}

impl ExperimentKind {
    pub fn parse(s: &str) -> CResult<Self> {
        Ok(match s {
            "profile" => ExperimentKind::Profile,
            "one-dim" => ExperimentKind::OneDim,
            "curve-sweep" => ExperimentKind::CurveSweep,
            "fuglede" => ExperimentKind::Fuglede,
            "symmetrize" => ExperimentKind::Symmetrize,
            "counterexample-1" => ExperimentKind::Counterexample1,
            "counterexample-2" => ExperimentKind::Counterexample2,
            "calibrate" => ExperimentKind::Calibrate,
            other => {
                return Err(ConfigError(format!(
                    "experiment.kind: unknown experiment {other:?}"
                )))
            }
        })
    }

    pub fn needs_weights(self) -> bool {
        !matches!(
            self,
            ExperimentKind::Counterexample1 | ExperimentKind::Counterexample2
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Profile => "profile",
            ExperimentKind::OneDim => "one-dim",
            ExperimentKind::CurveSweep => "curve-sweep",
            ExperimentKind::Fuglede => "fuglede",
            ExperimentKind::Symmetrize => "symmetrize",
            ExperimentKind::Counterexample1 => "counterexample-1",
            ExperimentKind::Counterexample2 => "counterexample-2",
            ExperimentKind::Calibrate => "calibrate",
        }
    }
}

/// Parsed and validated experiment configuration.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub seed: u64,
    pub output: PathBuf,
    pub plot: bool,
    pub weights: Option<WeightPair>,
    pub params: BTreeMap<String, String>,
}

impl ExperimentConfig {
    pub fn f64_param(&self, key: &str, default: f64) -> CResult<f64> {
        match self.params.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse::<f64>()
                .map_err(|_| ConfigError(format!("params.{key}: bad number {v:?}"))),
        }
    }

    pub fn usize_param(&self, key: &str, default: usize) -> CResult<usize> {
        match self.params.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse::<usize>()
                .map_err(|_| ConfigError(format!("params.{key}: bad integer {v:?}"))),
        }
    }

    pub fn list_param(&self, key: &str, default: &[f64]) -> CResult<Vec<f64>> {
        match self.params.get(key) {
            None => Ok(default.to_vec()),
            Some(v) => v
                .split_whitespace()
                .map(|t| {
                    t.parse::<f64>()
                        .map_err(|_| ConfigError(format!("params.{key}: bad number {t:?}")))
                })
                .collect(),
        }
    }

    pub fn require_in(&self, key: &str, value: f64, lo: f64, hi: f64) -> CResult<f64> {
        if value < lo || value > hi {
            return Err(ConfigError(format!(
                "params.{key} = {value} outside [{lo}, {hi}]"
            )));
        }
        Ok(value)
    }
}

fn parse_sections(text: &str) -> CResult<BTreeMap<String, Vec<(String, String)>>> {
    let mut sections: BTreeMap<String, Vec<(String, String)>> = BTreeMap::new();
    let mut current = String::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            current = name.trim().to_string();
            sections.entry(current.clone()).or_default();
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(ConfigError(format!(
                "line {}: expected 'key = value', got {line:?}",
                no + 1
            )));
        };
        if current.is_empty() {
            return Err(ConfigError(format!(
                "line {}: key outside any [section]",
                no + 1
            )));
        }
        sections
            .get_mut(&current)
            .unwrap()
            .push((key.trim().to_string(), value.trim().to_string()));
    }
    Ok(sections)
}

const KNOWN_SECTIONS: [&str; 3] = ["experiment", "weights", "params"];
const EXPERIMENT_KEYS: [&str; 4] = ["kind", "seed", "output", "plot"];
const WEIGHT_KEYS: [&str; 13] = [
    "file",
    "n",
    "r_max",
    "psi.kind",
    "psi.a",
    "psi.coeffs",
    "psi.knots_r",
    "psi.knots_v",
    "psi.slope_left",
    "psi.slope_right",
    "g.kind",
    "g.coeffs",
    "g.a",
];

fn issue_list(text: &str, base_dir: &Path) -> (Vec<String>, Option<ExperimentConfig>) {
    let mut issues = Vec::new();
    let sections = match parse_sections(text) {
        Ok(s) => s,
        Err(e) => return (vec![e.0], None),
    };
    for name in sections.keys() {
        if !KNOWN_SECTIONS.contains(&name.as_str()) {
            issues.push(format!("unknown section [{name}]"));
        }
    }
    let empty = Vec::new();
    let exp = sections.get("experiment").unwrap_or(&empty);
    if sections.get("experiment").is_none() {
        issues.push("experiment: section required".into());
    }
    let mut kind = None;
    let mut seed = 0u64;
    let mut output = PathBuf::from("out");
    let mut plot = false;
    for (k, v) in exp {
        if !EXPERIMENT_KEYS.contains(&k.as_str()) {
            issues.push(format!("experiment.{k}: unknown key"));
            continue;
        }
        match k.as_str() {
            "kind" => match ExperimentKind::parse(v) {
                Ok(kd) => kind = Some(kd),
                Err(e) => issues.push(e.0),
            },
            "seed" => match v.parse::<u64>() {
                Ok(s) => seed = s,
                Err(_) => issues.push(format!("experiment.seed: bad integer {v:?}")),
            },
            "output" => output = base_dir.join(v),
            "plot" => match v.parse::<bool>() {
                Ok(b) => plot = b,
                Err(_) => issues.push(format!("experiment.plot: expected true/false, got {v:?}")),
            },
            _ => unreachable!(),
        }
    }
    let Some(kind) = kind else {
        issues.push("experiment.kind: required".into());
        return (issues, None);
    };

    // Weights.
    let weights_section = sections.get("weights");
    let mut weights = None;
    if let Some(entries) = weights_section {
        for (k, _) in entries {
            if !WEIGHT_KEYS.contains(&k.as_str()) {
                issues.push(format!("weights.{k}: unknown key"));
            }
        }
        match build_weights(entries, base_dir) {
            Ok(p) => weights = Some(p),
            Err(e) => issues.push(e.0),
        }
    }
    if kind.needs_weights() && weights.is_none() && weights_section.is_none() {
        issues.push("weights: required".into());
    }

    // Params are validated per-experiment at dispatch; here only key names.
    let params: BTreeMap<String, String> = sections
        .get("params")
        .map(|entries| entries.iter().cloned().collect())
        .unwrap_or_default();
    for key in params.keys() {
        if !param_allowed(kind, key) {
            issues.push(format!("params.{key}: unknown key for {}", kind.name()));
        }
    }

    let config = ExperimentConfig {
        kind,
        seed,
        output,
        plot,
        weights,
        params,
    };
    (issues, Some(config))
}

fn param_allowed(kind: ExperimentKind, key: &str) -> bool {
    let allowed: &[&str] = match kind {
        ExperimentKind::Profile => &["r_min", "r_max", "steps"],
        ExperimentKind::OneDim => &[
            "volume",
            "x_max",
            "lambda_steps",
            "grid_points",
            "max_intervals",
            "v_min",
            "v_max",
            "v_steps",
        ],
        ExperimentKind::CurveSweep => &["r_star", "k0_min", "k0_max", "k0_steps"],
        ExperimentKind::Fuglede => &[
            "radius",
            "trials",
            "band",
            "amplitude",
            "grid_points",
            "polar_points",
            "azimuth_points",
        ],
        ExperimentKind::Symmetrize => &["trials"],
        ExperimentKind::Counterexample1 => &[
            "n", "m", "v", "l", "eps", "h", "l_prime", "l_second", "delta",
        ],
        ExperimentKind::Counterexample2 => &["n", "eps_list", "g0", "radius"],
        ExperimentKind::Calibrate => &["samples", "r_ball", "distances"],
    };
    allowed.contains(&key)
}

fn build_weights(entries: &[(String, String)], base_dir: &Path) -> CResult<WeightPair> {
    let map: BTreeMap<&str, &str> = entries
        .iter()
        .map(|(k, v)| (k.as_str(), v.as_str()))
        .collect();
    if let Some(file) = map.get("file") {
        let path = base_dir.join(file);
        let text = std::fs::read_to_string(&path)
            .map_err(|e| ConfigError(format!("weights.file: cannot read {path:?}: {e}")))?;
        return weights::pair_from_text(&text)
            .map_err(|e| ConfigError(format!("weights.file: {e}")));
    }
    let n: u32 = map
        .get("n")
        .ok_or_else(|| ConfigError("weights.n: required for inline weights".into()))?
        .parse()
        .map_err(|_| ConfigError("weights.n: bad integer".into()))?;
    let r_max: f64 = map
        .get("r_max")
        .unwrap_or(&"10")
        .parse()
        .map_err(|_| ConfigError("weights.r_max: bad number".into()))?;
    let psi = build_profile("psi", &map)?;
    let g = build_profile("g", &map)?;
    WeightPair::new(psi, g, n, r_max).map_err(|e| ConfigError(format!("weights: {e}")))
}

fn build_profile(which: &str, map: &BTreeMap<&str, &str>) -> CResult<WeightProfile> {
    let kind_key = format!("{which}.kind");
    let kind = map
        .get(kind_key.as_str())
        .ok_or_else(|| ConfigError(format!("weights.{which}.kind: required")))?;
    let list = |suffix: &str| -> CResult<Vec<f64>> {
        let key = format!("{which}.{suffix}");
        map.get(key.as_str())
            .ok_or_else(|| ConfigError(format!("weights.{key}: required")))?
            .split_whitespace()
            .map(|t| {
                t.parse::<f64>()
                    .map_err(|_| ConfigError(format!("weights.{key}: bad number {t:?}")))
            })
            .collect()
    };
    let scalar = |suffix: &str| -> CResult<f64> {
        let key = format!("{which}.{suffix}");
        map.get(key.as_str())
            .ok_or_else(|| ConfigError(format!("weights.{key}: required")))?
            .parse::<f64>()
            .map_err(|_| ConfigError(format!("weights.{key}: bad number")))
    };
    match *kind {
        "gaussian" => Ok(WeightProfile::gaussian(scalar("a")?)),
        "polynomial" => Ok(WeightProfile::polynomial(list("coeffs")?)),
        "cubic-spline" => WeightProfile::cubic_spline(
            list("knots_r")?,
            list("knots_v")?,
            scalar("slope_left")?,
            scalar("slope_right")?,
        )
        .map_err(|e| ConfigError(format!("weights.{which}: {e}"))),
        other => Err(ConfigError(format!(
            "weights.{which}.kind: inline weights support gaussian/polynomial/cubic-spline, got {other:?} (use weights.file for piecewise pairs)"
        ))),
    }
}

/// Validate without running; returns the issue list (empty = valid).
pub fn validate(text: &str, base_dir: &Path) -> Vec<String> {
    issue_list(text, base_dir).0
}

/// Parse a config file into a ready-to-run configuration.
pub fn load(path: &Path) -> CResult<ExperimentConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError(format!("cannot read {path:?}: {e}")))?;
    let base = path.parent().unwrap_or(Path::new("."));
    let (issues, config) = issue_list(&text, base);
    if !issues.is_empty() {
        return Err(ConfigError(issues.join("; ")));
    }
    config.ok_or_else(|| ConfigError("invalid configuration".into()))
}
