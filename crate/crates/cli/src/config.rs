// Copyright 2026 The ifm-cnot Developers
// SPDX-License-Identifier: Apache-2.0

//! Experiment configuration.
//!
//! Configs are JSON objects. Every key is optional and unknown keys are
//! rejected:
//!
//! ```json
//! {
//!   "scheme": "single",
//!   "convention": "ideal",
//!   "arm_phases": [0.0, 0.0, 0.0, 0.0],
//!   "target_interaction": true,
//!   "input": "basis4",
//!   "noise": {"p_dephase": 0.1, "epsilon": {"fixed": 0.05}, "eta": 0.0,
//!             "kappa": 0.0, "loss_passes": "both"},
//!   "cavity_r": 0.99,
//!   "sweep": [{"parameter": "p_dephase", "from": 0.0, "to": 1.0, "steps": 11}],
//!   "shots": 10000,
//!   "seed": 7,
//!   "output": {"format": "both", "path": "results/run"}
//! }
//! ```
//!
//! `input` is `"basis4"`, `"bell"`, `{"random": {"seed": 1, "count": 20}}`
//! or `{"custom": [{"alpha": [re, im], "beta": .., "gamma": .., "delta": ..}]}`.
//! `epsilon` is `"none"`, `{"fixed": e}` or `{"uniform": max}`. When
//! `cavity_r` is set, `eta` is replaced by the leakage of a resonant cavity
//! with that mirror reflectivity.

use std::fmt;
use std::path::PathBuf;

use ifm_core::cavity::{routing_error, CavityParams};
use ifm_core::{
    EpsilonDist, GateInput, IfmError, NoiseModel, PhaseConvention, Scheme, SchemeVariant,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: u32 = 1;

pub const MAX_SWEEP_AXES: usize = 2;
pub const MAX_GRID_POINTS: usize = 10_000;
pub const MAX_SHOTS: i64 = 100_000_000;
pub const MAX_RANDOM_INPUTS: u64 = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scheme: SchemeVariant,
    pub convention: PhaseConvention,
    pub arm_phases: [f64; 4],
    pub target_interaction: bool,
    pub input: InputPreset,
    pub noise: NoiseModel,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cavity_r: Option<f64>,
    pub sweep: Vec<SweepAxis>,
    pub shots: i64,
    pub seed: u64,
    pub output: OutputSpec,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            scheme: SchemeVariant::SinglePulse,
            convention: PhaseConvention::Ideal,
            arm_phases: [0.0; 4],
            target_interaction: true,
            input: InputPreset::Basis4,
            noise: NoiseModel::ideal(),
            cavity_r: None,
            sweep: Vec::new(),
            shots: 0,
            seed: 0,
            output: OutputSpec::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum InputPreset {
    /// The four inputs `|c⟩|±⟩`.
    #[default]
    Basis4,
    /// `(|0⟩ + |1⟩)/√2 ⊗ |+⟩`.
    Bell,
    Random {
        seed: u64,
        count: u64,
    },
    Custom(Vec<GateInput>),
}

impl InputPreset {
    /// Labeled inputs in a fixed order.
    pub fn inputs(&self) -> Vec<(String, GateInput)> {
        match self {
            InputPreset::Basis4 => (0..4)
                .map(|k| {
                    let (c, t) = (k / 2, k % 2);
                    (format!("{c}{}", target_symbol(t)), GateInput::basis(c, t))
                })
                .collect(),
            InputPreset::Bell => vec![("bell".into(), GateInput::bell())],
            InputPreset::Random { seed, count } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                (0..*count)
                    .map(|k| (format!("random{k}"), GateInput::random(&mut rng)))
                    .collect()
            }
            InputPreset::Custom(list) => list
                .iter()
                .enumerate()
                .map(|(k, input)| (format!("custom{k}"), *input))
                .collect(),
        }
    }

    fn validate(&self) -> CliResult<()> {
        match self {
            InputPreset::Random { count, .. } if *count == 0 || *count > MAX_RANDOM_INPUTS => {
                Err(CliError::Config(format!(
                    "input.random.count = {count} is outside [1, {MAX_RANDOM_INPUTS}]"
                )))
            }
            InputPreset::Custom(list) if list.is_empty() => Err(CliError::Config(
                "input.custom needs at least one input".into(),
            )),
            InputPreset::Custom(list) => {
                for (k, input) in list.iter().enumerate() {
                    input
                        .validate()
                        .map_err(|e| CliError::Config(format!("input.custom[{k}]: {e}")))?;
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

/// `+` for target index 0, `-` for 1.
pub fn target_symbol(t: usize) -> &'static str {
    if t == 0 {
        "+"
    } else {
        "-"
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    PDephase,
    /// Fixed pulse-area deficit.
    Epsilon,
    /// Upper end of a uniform deficit distribution.
    EpsilonMax,
    Eta,
    Kappa,
    CavityR,
}

impl SweepParam {
    pub const ALL: [SweepParam; 6] = [
        SweepParam::PDephase,
        SweepParam::Epsilon,
        SweepParam::EpsilonMax,
        SweepParam::Eta,
        SweepParam::Kappa,
        SweepParam::CavityR,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepParam::PDephase => "p_dephase",
            SweepParam::Epsilon => "epsilon",
            SweepParam::EpsilonMax => "epsilon_max",
            SweepParam::Eta => "eta",
            SweepParam::Kappa => "kappa",
            SweepParam::CavityR => "cavity_r",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.name() == name)
    }

    fn apply(self, cfg: &mut ExperimentConfig, value: f64) {
        match self {
            SweepParam::PDephase => cfg.noise.p_dephase = value,
            SweepParam::Epsilon => cfg.noise.epsilon = EpsilonDist::Fixed(value),
            SweepParam::EpsilonMax => cfg.noise.epsilon = EpsilonDist::Uniform(value),
            SweepParam::Eta => cfg.noise.eta = value,
            SweepParam::Kappa => cfg.noise.kappa = value,
            SweepParam::CavityR => cfg.cavity_r = Some(value),
        }
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `steps` evenly spaced values from `from` to `to`, both included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxis {
    pub parameter: SweepParam,
    pub from: f64,
    pub to: f64,
    pub steps: i64,
}

impl SweepAxis {
    pub fn values(&self) -> Vec<f64> {
        let n = usize::try_from(self.steps).unwrap_or(0);
        (0..n)
            .map(|k| match k {
                0 => self.from,
                k if k + 1 == n => self.to,
                k => self.from + (self.to - self.from) * k as f64 / (n - 1) as f64,
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
    /// CSV and JSON side by side, `<path>.csv` and `<path>.json`.
    Both,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    pub format: OutputFormat,
    /// Standard output when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
}

/// One grid point of a (possibly empty) sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct GridPoint {
    pub index: usize,
    pub axes: Vec<(SweepParam, f64)>,
    /// The base config with this point's values applied and no sweep.
    pub config: ExperimentConfig,
}

impl ExperimentConfig {
    pub fn scheme(&self) -> Scheme {
        let mut s = Scheme::new(self.scheme, self.convention).with_arm_phases(self.arm_phases);
        s.target_interaction = self.target_interaction;
        s
    }

    /// The noise model with `eta` taken from the cavity when one is set.
    pub fn noise_model(&self) -> CliResult<NoiseModel> {
        let mut nm = self.noise;
        if let Some(r) = self.cavity_r {
            let cavity = CavityParams::resonant(r).map_err(range_error)?;
            nm.eta = routing_error(&cavity);
        }
        nm.validate().map_err(range_error)?;
        Ok(nm)
    }

    pub fn grid_size(&self) -> usize {
        self.sweep
            .iter()
            .map(|a| usize::try_from(a.steps).unwrap_or(0))
            .product()
    }

    /// Grid points in row-major order, last axis fastest.
    pub fn grid(&self) -> Vec<GridPoint> {
        let axes: Vec<(SweepParam, Vec<f64>)> = self
            .sweep
            .iter()
            .map(|a| (a.parameter, a.values()))
            .collect();
        let mut base = self.clone();
        base.sweep.clear();
        (0..self.grid_size())
            .map(|index| {
                let mut rest = index;
                let mut coords = vec![0; axes.len()];
                for (slot, (_, values)) in coords.iter_mut().zip(&axes).rev() {
                    *slot = rest % values.len();
                    rest /= values.len();
                }
                let mut config = base.clone();
                let point: Vec<(SweepParam, f64)> = axes
                    .iter()
                    .zip(&coords)
                    .map(|((param, values), &k)| {
                        param.apply(&mut config, values[k]);
                        (*param, values[k])
                    })
                    .collect();
                GridPoint {
                    index,
                    axes: point,
                    config,
                }
            })
            .collect()
    }

    pub fn validate(&self) -> CliResult<()> {
        if !(0..=MAX_SHOTS).contains(&self.shots) {
            return Err(CliError::Config(format!(
                "shots = {} is outside [0, {MAX_SHOTS}]",
                self.shots
            )));
        }
        if self.arm_phases.iter().any(|p| !p.is_finite()) {
            return Err(CliError::Config("arm_phases must be finite".into()));
        }
        self.input.validate()?;
        self.validate_sweep()?;
        for point in self.grid() {
            point
                .config
                .noise_model()
                .map_err(|e| match (e, point.axes.is_empty()) {
                    (CliError::Config(msg), false) => {
                        CliError::Config(format!("sweep point {}: {msg}", point.index))
                    }
                    (e, _) => e,
                })?;
        }
        Ok(())
    }

    fn validate_sweep(&self) -> CliResult<()> {
        if self.sweep.len() > MAX_SWEEP_AXES {
            return Err(CliError::Config(format!(
                "sweep has {} axes, at most {MAX_SWEEP_AXES} are allowed",
                self.sweep.len()
            )));
        }
        for (k, axis) in self.sweep.iter().enumerate() {
            if axis.steps < 1 {
                return Err(CliError::Config(format!(
                    "sweep[{k}].steps = {} must be at least 1",
                    axis.steps
                )));
            }
            if !axis.from.is_finite() || !axis.to.is_finite() {
                return Err(CliError::Config(format!(
                    "sweep[{k}] bounds must be finite"
                )));
            }
            if axis.parameter == SweepParam::Eta && self.cavity_r.is_some() {
                return Err(CliError::Config(
                    "sweeping eta conflicts with cavity_r, which sets eta".into(),
                ));
            }
        }
        if let [a, b] = self.sweep.as_slice() {
            let eps = [SweepParam::Epsilon, SweepParam::EpsilonMax];
            let clash = a.parameter == b.parameter
                || (eps.contains(&a.parameter) && eps.contains(&b.parameter))
                || [a.parameter, b.parameter] == [SweepParam::Eta, SweepParam::CavityR]
                || [a.parameter, b.parameter] == [SweepParam::CavityR, SweepParam::Eta];
            if clash {
                return Err(CliError::Config(format!(
                    "sweep axes {} and {} set the same quantity",
                    a.parameter, b.parameter
                )));
            }
        }
        let size = self
            .sweep
            .iter()
            .try_fold(1usize, |acc, a| acc.checked_mul(a.steps as usize));
        match size {
            Some(n) if n <= MAX_GRID_POINTS => Ok(()),
            _ => Err(CliError::Config(format!(
                "sweep grid exceeds {MAX_GRID_POINTS} points"
            ))),
        }
    }
}

fn range_error(e: IfmError) -> CliError {
    match e {
        IfmError::OutOfRange { .. } => CliError::Config(e.to_string()),
        other => CliError::Model(other),
    }
}

/// Maps a serde_json error to a config error that leads with its location.
fn json_error(e: &serde_json::Error) -> CliError {
    let full = e.to_string();
    let suffix = format!(" at line {} column {}", e.line(), e.column());
    let msg = full.strip_suffix(&suffix).unwrap_or(&full);
    let kind = match e.classify() {
        serde_json::error::Category::Syntax | serde_json::error::Category::Eof => "syntax error",
        _ => "invalid config",
    };
    if e.line() == 0 {
        CliError::Config(format!("{kind}: {msg}"))
    } else {
        CliError::Config(format!(
            "{kind} at line {}, column {}: {msg}",
            e.line(),
            e.column()
        ))
    }
}

/// Parses and validates a config document.
pub fn parse_config(text: &str) -> CliResult<ExperimentConfig> {
    let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| json_error(&e))?;
    cfg.validate()?;
    Ok(cfg)
}

/// Overlays `top` on `base`, merging nested objects key by key.
pub fn merge_values(base: &mut Value, top: Value) {
    match (base, top) {
        (Value::Object(b), Value::Object(t)) => {
            for (k, v) in t {
                merge_values(b.entry(k).or_insert(Value::Null), v);
            }
        }
        (slot, v) => *slot = v,
    }
}

/// Builds the config from command-line settings with an optional config
/// file laid over them; keys present in the file win.
pub fn resolve(flags: Value, file_text: Option<&str>) -> CliResult<ExperimentConfig> {
    let mut merged = flags;
    if let Some(text) = file_text {
        // Parse on its own first so errors point into the file.
        let _: ExperimentConfig = serde_json::from_str(text).map_err(|e| json_error(&e))?;
        let file: Value = serde_json::from_str(text).map_err(|e| json_error(&e))?;
        merge_values(&mut merged, file);
    }
    let cfg: ExperimentConfig = serde_json::from_value(merged).map_err(|e| json_error(&e))?;
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn minimal_config_takes_defaults() {
        let cfg = parse_config(r#"{"scheme": "dual"}"#).unwrap();
        assert_eq!(cfg.scheme, SchemeVariant::DualPulse);
        assert_eq!(
            cfg,
            ExperimentConfig {
                scheme: SchemeVariant::DualPulse,
                ..Default::default()
            }
        );
        assert_eq!(parse_config("{}").unwrap(), ExperimentConfig::default());
    }

    #[test]
    fn two_axis_grid_plan() {
        let cfg = parse_config(
            r#"{"sweep": [
                {"parameter": "p_dephase", "from": 0, "to": 1, "steps": 3},
                {"parameter": "epsilon", "from": 0.0, "to": 0.1, "steps": 4}
            ]}"#,
        )
        .unwrap();
        let grid = cfg.grid();
        assert_eq!(grid.len(), 12);
        assert_eq!(
            grid[5].axes,
            vec![
                (SweepParam::PDephase, 0.5),
                (SweepParam::Epsilon, grid[5].axes[1].1)
            ]
        );
        assert_eq!(
            grid[5].config.noise.epsilon,
            EpsilonDist::Fixed(grid[5].axes[1].1)
        );
        assert!((grid[5].axes[1].1 - 0.1 / 3.0).abs() < 1e-15);
        assert_eq!(grid[11].axes[1].1, 0.1);
        assert!(grid.iter().all(|p| p.config.sweep.is_empty()));
    }

    #[test]
    fn no_sweep_is_one_point() {
        let grid = ExperimentConfig::default().grid();
        assert_eq!(grid.len(), 1);
        assert!(grid[0].axes.is_empty());
    }

    #[test]
    fn negative_shots_name_the_field() {
        let err = parse_config(r#"{"shots": -1}"#).unwrap_err();
        assert!(
            matches!(err, CliError::Config(ref m) if m.contains("shots")),
            "{err}"
        );
    }

    #[test]
    fn syntax_errors_report_the_line() {
        let err = parse_config("{\n  \"scheme\": \"single\",\n  \"seed\": 3,,\n}").unwrap_err();
        assert!(
            matches!(err, CliError::Config(ref m) if m.starts_with("syntax error at line 3")),
            "{err}"
        );
    }

    #[test]
    fn unknown_keys_rejected() {
        let err = parse_config("{\n\"scheme\": \"single\",\n\"sheme\": 1}").unwrap_err();
        assert!(
            matches!(err, CliError::Config(ref m) if m.contains("line 3") && m.contains("sheme")),
            "{err}"
        );
        assert!(parse_config(r#"{"noise": {"p": 0.1}}"#).is_err());
    }

    #[test]
    fn range_errors_name_the_field() {
        for (text, field) in [
            (r#"{"noise": {"p_dephase": 1.5}}"#, "p_dephase"),
            (r#"{"noise": {"eta": 1.0}}"#, "eta"),
            (r#"{"noise": {"kappa": -0.1}}"#, "kappa"),
            (r#"{"noise": {"epsilon": {"fixed": 0.7}}}"#, "epsilon"),
            (r#"{"cavity_r": 1.0}"#, "cavity r"),
            (
                r#"{"sweep": [{"parameter": "eta", "from": 0, "to": 1, "steps": 3}]}"#,
                "eta",
            ),
        ] {
            let err = parse_config(text).unwrap_err();
            assert!(
                matches!(err, CliError::Config(ref m) if m.contains(field)),
                "{text}: {err}"
            );
        }
    }

    #[test]
    fn sweep_limits() {
        let axis = |p: &str| json!({"parameter": p, "from": 0, "to": 0.1, "steps": 2});
        let three = json!({"sweep": [axis("p_dephase"), axis("kappa"), axis("eta")]});
        assert!(parse_config(&three.to_string()).is_err());
        let dup = json!({"sweep": [axis("kappa"), axis("kappa")]});
        assert!(parse_config(&dup.to_string()).is_err());
        let eps = json!({"sweep": [axis("epsilon"), axis("epsilon_max")]});
        assert!(parse_config(&eps.to_string()).is_err());
        let zero = json!({"sweep": [{"parameter": "kappa", "from": 0, "to": 1, "steps": 0}]});
        assert!(parse_config(&zero.to_string()).is_err());
    }

    #[test]
    fn cavity_sets_eta() {
        let cfg = parse_config(r#"{"cavity_r": 0.99}"#).unwrap();
        let eta = cfg.noise_model().unwrap().eta;
        assert!((eta - 1.01e-4).abs() < 1e-6);
    }

    #[test]
    fn input_presets() {
        assert_eq!(
            InputPreset::Basis4
                .inputs()
                .iter()
                .map(|(l, _)| l.as_str())
                .collect::<Vec<_>>(),
            ["0+", "0-", "1+", "1-"]
        );
        let r = parse_config(r#"{"input": {"random": {"seed": 3, "count": 5}}}"#).unwrap();
        assert_eq!(r.input.inputs().len(), 5);
        assert_eq!(r.input.inputs(), r.input.inputs());
        let custom = r#"{"input": {"custom": [{"alpha": [1, 0], "beta": [0, 0], "gamma": [0, 0], "delta": [1, 0]}]}}"#;
        let c = parse_config(custom).unwrap();
        assert_eq!(c.input.inputs()[0].1, GateInput::basis(0, 1));
        let bad = r#"{"input": {"custom": [{"alpha": [1, 0], "beta": [1, 0], "gamma": [1, 0], "delta": [0, 0]}]}}"#;
        assert!(parse_config(bad).is_err());
        assert!(parse_config(r#"{"input": {"random": {"seed": 3, "count": 0}}}"#).is_err());
    }

    #[test]
    fn file_overrides_flags() {
        let flags = json!({"scheme": "dual", "seed": 4, "noise": {"p_dephase": 0.2, "kappa": 0.5}});
        let cfg = resolve(flags, Some(r#"{"seed": 9, "noise": {"kappa": 1.0}}"#)).unwrap();
        assert_eq!(cfg.scheme, SchemeVariant::DualPulse);
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.noise.p_dephase, 0.2);
        assert_eq!(cfg.noise.kappa, 1.0);
    }

    #[test]
    fn serialized_config_round_trips() {
        let text = r#"{"scheme": "dual", "convention": "physical", "cavity_r": 0.9,
            "noise": {"epsilon": {"uniform": 0.1}, "loss_passes": "forward_only"},
            "input": {"random": {"seed": 1, "count": 2}},
            "sweep": [{"parameter": "kappa", "from": 0, "to": 1, "steps": 3}],
            "output": {"format": "both", "path": "out/x"}}"#;
        let cfg = parse_config(text).unwrap();
        let again = parse_config(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(cfg, again);
    }
}
