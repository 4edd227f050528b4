//! Flat key=value configuration files with command-line overrides.
//!
//! Unknown keys are rejected so typos surface as usage errors. Every key is
//! optional; defaults come from the library.

use covernet::communities::WeightScheme;
use covernet::datasets::{truncated_geometric_weights, GeneratorParams};
use covernet::experiment::{AlgorithmParams, ParamGrid};
use covernet::graph::KnnRule;
use covernet::metrics::EfficiencyMode;
use std::collections::BTreeMap;
use std::path::Path;

#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

const KNOWN_KEYS: &[&str] = &[
    "intra_mean",
    "intra_sd",
    "inter_mean",
    "inter_sd",
    "prototype_pull",
    "asymmetry_jitter",
    "backbone_scale",
    "cardinality_weights",
    "cardinality_mean",
    "w_th",
    "r_th",
    "alpha",
    "margin",
    "d_th",
    "refine_c",
    "km_k_min",
    "km_k_max",
    "knn_rule",
    "weight_scheme",
    "pm2_fixpoint",
    "thresholds",
    "er_trials",
    "efficiency",
    "grid_thresholds",
    "grid_r_th",
    "grid_alpha",
    "grid_margin",
];

/// Parsed configuration; consumers pull typed values out of it.
#[derive(Debug, Default)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Config, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Config, ConfigError> {
        let mut values = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError(format!(
                    "line {}: expected key=value, got {line:?}",
                    idx + 1
                )));
            };
            let key = key.trim().to_string();
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(ConfigError(format!("line {}: unknown key {key:?}", idx + 1)));
            }
            values.insert(key, value.trim().to_string());
        }
        Ok(Config { values })
    }

    fn get<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, ConfigError> {
        match self.values.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse::<T>()
                .map(Some)
                .map_err(|_| ConfigError(format!("key {key}: cannot parse {raw:?}"))),
        }
    }

    fn get_list<T: std::str::FromStr>(&self, key: &str) -> Result<Option<Vec<T>>, ConfigError> {
        match self.values.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .split(',')
                .map(|tok| tok.trim().parse::<T>())
                .collect::<Result<Vec<T>, _>>()
                .map(Some)
                .map_err(|_| ConfigError(format!("key {key}: cannot parse list {raw:?}"))),
        }
    }

    /// Generator parameters with config overrides applied.
    pub fn generator_params(&self) -> Result<GeneratorParams, ConfigError> {
        let mut p = GeneratorParams::default();
        if let Some(v) = self.get("intra_mean")? {
            p.intra_mean = v;
        }
        if let Some(v) = self.get("intra_sd")? {
            p.intra_sd = v;
        }
        if let Some(v) = self.get("inter_mean")? {
            p.inter_mean = v;
        }
        if let Some(v) = self.get("inter_sd")? {
            p.inter_sd = v;
        }
        if let Some(v) = self.get("prototype_pull")? {
            p.prototype_pull = v;
        }
        if let Some(v) = self.get("asymmetry_jitter")? {
            p.asymmetry_jitter = v;
        }
        if let Some(v) = self.get("backbone_scale")? {
            p.backbone_scale = v;
        }
        if let Some(mean) = self.get::<f64>("cardinality_mean")? {
            p.cardinality_weights = truncated_geometric_weights(2, 18, mean);
        }
        if let Some(raw) = self.values.get("cardinality_weights") {
            // size:weight pairs, e.g. "2:0.5,3:0.3,4:0.2".
            let mut weights = Vec::new();
            for tok in raw.split(',') {
                let Some((size, weight)) = tok.trim().split_once(':') else {
                    return Err(ConfigError(format!(
                        "cardinality_weights: expected size:weight, got {tok:?}"
                    )));
                };
                let size = size.trim().parse::<usize>().map_err(|_| {
                    ConfigError(format!("cardinality_weights: bad size {size:?}"))
                })?;
                let weight = weight.trim().parse::<f64>().map_err(|_| {
                    ConfigError(format!("cardinality_weights: bad weight {weight:?}"))
                })?;
                weights.push((size, weight));
            }
            p.cardinality_weights = weights;
        }
        Ok(p)
    }

    /// Detector parameters: tuned per-algorithm defaults plus overrides.
    pub fn algorithm_params(&self, base: AlgorithmParams) -> Result<AlgorithmParams, ConfigError> {
        let mut p = base;
        if let Some(v) = self.get("w_th")? {
            p.community.w_th = v;
        }
        if let Some(v) = self.get("r_th")? {
            p.community.r_th = v;
        }
        if let Some(v) = self.get("alpha")? {
            p.community.alpha = v;
        }
        if let Some(v) = self.get("margin")? {
            p.community.margin = v;
        }
        if let Some(v) = self.get("d_th")? {
            p.d_th = v;
        }
        if let Some(v) = self.get("refine_c")? {
            p.refine_c = v;
        }
        let k_min: Option<usize> = self.get("km_k_min")?;
        let k_max: Option<usize> = self.get("km_k_max")?;
        match (k_min, k_max) {
            (Some(lo), Some(hi)) => p.km_k_range = Some((lo, hi)),
            (None, None) => {}
            _ => {
                return Err(ConfigError(
                    "km_k_min and km_k_max must be set together".into(),
                ))
            }
        }
        if let Some(raw) = self.values.get("knn_rule") {
            p.community.knn_rule = match raw.as_str() {
                "union" => KnnRule::Union,
                "intersection" => KnnRule::Intersection,
                other => return Err(ConfigError(format!("knn_rule: unknown value {other:?}"))),
            };
        }
        if let Some(raw) = self.values.get("weight_scheme") {
            p.community.weight_scheme = match raw.as_str() {
                "complement" => WeightScheme::Complement,
                "reciprocal" => WeightScheme::Reciprocal,
                "unit" => WeightScheme::Unit,
                other => {
                    return Err(ConfigError(format!("weight_scheme: unknown value {other:?}")))
                }
            };
        }
        if let Some(v) = self.get("pm2_fixpoint")? {
            p.community.pm2_fixpoint = v;
        }
        Ok(p)
    }

    /// Sweep thresholds (default 0.05..=0.50 in steps of 0.05).
    pub fn sweep_thresholds(&self) -> Result<Vec<f64>, ConfigError> {
        Ok(self
            .get_list("thresholds")?
            .unwrap_or_else(|| (1..=10).map(|i| 0.05 * i as f64).collect()))
    }

    pub fn er_trials(&self) -> Result<usize, ConfigError> {
        Ok(self.get("er_trials")?.unwrap_or(100))
    }

    pub fn efficiency_mode(&self) -> Result<EfficiencyMode, ConfigError> {
        match self.values.get("efficiency").map(String::as_str) {
            None | Some("hop") => Ok(EfficiencyMode::HopCount),
            Some("weighted") => Ok(EfficiencyMode::Weighted),
            Some(other) => Err(ConfigError(format!("efficiency: unknown mode {other:?}"))),
        }
    }

    pub fn param_grid(&self) -> Result<ParamGrid, ConfigError> {
        let mut grid = ParamGrid::default();
        if let Some(v) = self.get_list("grid_thresholds")? {
            grid.thresholds = v;
        }
        if let Some(v) = self.get_list("grid_r_th")? {
            grid.r_th = v;
        }
        if let Some(v) = self.get_list("grid_alpha")? {
            grid.alpha = v;
        }
        if let Some(v) = self.get_list("grid_margin")? {
            grid.margin = v;
        }
        Ok(grid)
    }
}
