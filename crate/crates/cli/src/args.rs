// Copyright 2026 The ifm-cnot Developers
// SPDX-License-Identifier: Apache-2.0

//! Command-line interface. Flags mirror the config keys.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use crate::error::{CliError, CliResult};
use crate::experiment::Command;

#[derive(Debug, Parser)]
#[command(
    name = "ifm-cnot",
    version,
    about = "Simulate an interaction-free CNOT gate"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Sub,
}

#[derive(Debug, Subcommand)]
pub enum Sub {
    /// Truth table of the gate in the `|0⟩,|1⟩ ⊗ |+⟩,|−⟩` basis.
    TruthTable(ExperimentArgs),
    /// Gate report and per-input fidelities at every grid point.
    Run(ExperimentArgs),
    /// Like `run`, but at least one sweep axis is required.
    Sweep(ExperimentArgs),
    /// Detector clicks drawn from the routed state.
    Sample(ExperimentArgs),
    /// Re-run a JSON result and check it reproduces byte for byte.
    Replay {
        /// JSON result written by an earlier command.
        file: PathBuf,
        /// Write the re-run results here, in the stored format.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args, Default)]
pub struct ExperimentArgs {
    /// JSON config; its keys override flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_parser = ["single", "dual"])]
    pub scheme: Option<String>,
    #[arg(long, value_parser = ["ideal", "physical"])]
    pub convention: Option<String>,
    /// Four end-mirror phases in radians, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub arm_phases: Option<Vec<f64>>,
    /// Leave the target untouched by the reflected pulse.
    #[arg(long)]
    pub no_target_interaction: bool,
    /// `basis4`, `bell` or `random:SEED:COUNT`.
    #[arg(long)]
    pub input: Option<String>,
    #[arg(long)]
    pub p_dephase: Option<f64>,
    /// Fixed pulse-area deficit.
    #[arg(long, conflicts_with = "epsilon_max")]
    pub epsilon: Option<f64>,
    /// Deficit drawn uniformly from `[0, max)`.
    #[arg(long)]
    pub epsilon_max: Option<f64>,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub kappa: Option<f64>,
    #[arg(long, value_parser = ["both", "forward_only"])]
    pub loss_passes: Option<String>,
    /// Mirror reflectivity of a resonant cavity; sets eta.
    #[arg(long)]
    pub cavity_r: Option<f64>,
    /// `PARAM:FROM:TO:STEPS`, up to two times.
    #[arg(long)]
    pub sweep: Vec<String>,
    #[arg(long, allow_negative_numbers = true)]
    pub shots: Option<i64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_parser = ["csv", "json", "both"])]
    pub format: Option<String>,
    /// Output file; with `--format both` the extension is replaced.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl Sub {
    pub fn experiment(&self) -> Option<(Command, &ExperimentArgs)> {
        match self {
            Sub::TruthTable(a) => Some((Command::TruthTable, a)),
            Sub::Run(a) => Some((Command::Run, a)),
            Sub::Sweep(a) => Some((Command::Sweep, a)),
            Sub::Sample(a) => Some((Command::Sample, a)),
            Sub::Replay { .. } => None,
        }
    }
}

impl ExperimentArgs {
    /// The config keys set on the command line.
    pub fn to_value(&self) -> CliResult<Value> {
        let mut root = Map::new();
        let mut noise = Map::new();
        let mut output = Map::new();
        let set = |map: &mut Map<String, Value>, key: &str, v: Option<Value>| {
            if let Some(v) = v {
                map.insert(key.into(), v);
            }
        };
        set(&mut root, "scheme", self.scheme.clone().map(Value::from));
        set(
            &mut root,
            "convention",
            self.convention.clone().map(Value::from),
        );
        if let Some(phases) = &self.arm_phases {
            if phases.len() != 4 {
                return Err(CliError::Config(format!(
                    "--arm-phases needs 4 values, got {}",
                    phases.len()
                )));
            }
            root.insert("arm_phases".into(), Value::from(phases.clone()));
        }
        if self.no_target_interaction {
            root.insert("target_interaction".into(), Value::Bool(false));
        }
        set(
            &mut root,
            "input",
            self.input.as_deref().map(parse_input).transpose()?,
        );
        set(&mut root, "cavity_r", self.cavity_r.map(Value::from));
        set(&mut root, "shots", self.shots.map(Value::from));
        set(&mut root, "seed", self.seed.map(Value::from));
        if !self.sweep.is_empty() {
            let axes = self
                .sweep
                .iter()
                .map(|s| parse_sweep(s))
                .collect::<CliResult<Vec<_>>>()?;
            root.insert("sweep".into(), Value::Array(axes));
        }
        set(&mut noise, "p_dephase", self.p_dephase.map(Value::from));
        set(
            &mut noise,
            "epsilon",
            self.epsilon.map(|e| json!({ "fixed": e })),
        );
        set(
            &mut noise,
            "epsilon",
            self.epsilon_max.map(|e| json!({ "uniform": e })),
        );
        set(&mut noise, "eta", self.eta.map(Value::from));
        set(&mut noise, "kappa", self.kappa.map(Value::from));
        set(
            &mut noise,
            "loss_passes",
            self.loss_passes.clone().map(Value::from),
        );
        set(&mut output, "format", self.format.clone().map(Value::from));
        set(
            &mut output,
            "path",
            self.out
                .as_ref()
                .map(|p| Value::from(p.display().to_string())),
        );
        if !noise.is_empty() {
            root.insert("noise".into(), Value::Object(noise));
        }
        if !output.is_empty() {
            root.insert("output".into(), Value::Object(output));
        }
        Ok(Value::Object(root))
    }
}

fn parse_input(text: &str) -> CliResult<Value> {
    match text.split(':').collect::<Vec<_>>().as_slice() {
        ["basis4"] | ["bell"] => Ok(Value::from(text)),
        ["random", seed, count] => {
            let num = |s: &str| {
                s.parse::<u64>()
                    .map_err(|_| CliError::Config(format!("--input {text}: `{s}` is not a count")))
            };
            Ok(json!({ "random": { "seed": num(seed)?, "count": num(count)? } }))
        }
        _ => Err(CliError::Config(format!(
            "--input {text}: expected basis4, bell or random:SEED:COUNT"
        ))),
    }
}

fn parse_sweep(text: &str) -> CliResult<Value> {
    let bad = || CliError::Config(format!("--sweep {text}: expected PARAM:FROM:TO:STEPS"));
    let [param, from, to, steps] = text.split(':').collect::<Vec<_>>()[..] else {
        return Err(bad());
    };
    let from: f64 = from.parse().map_err(|_| bad())?;
    let to: f64 = to.parse().map_err(|_| bad())?;
    let steps: i64 = steps.parse().map_err(|_| bad())?;
    Ok(json!({ "parameter": param, "from": from, "to": to, "steps": steps }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{resolve, InputPreset, SweepParam};
    use ifm_core::{EpsilonDist, SchemeVariant};

    fn args(line: &[&str]) -> ExperimentArgs {
        let mut full = vec!["ifm-cnot", "run"];
        full.extend(line);
        match Cli::try_parse_from(full).unwrap().command {
            Sub::Run(a) => a,
            _ => unreachable!(),
        }
    }

    #[test]
    fn flags_map_to_config() {
        let a = args(&[
            "--scheme",
            "dual",
            "--input",
            "random:4:3",
            "--epsilon-max",
            "0.1",
            "--kappa",
            "0.5",
            "--sweep",
            "p_dephase:0:1:5",
            "--shots",
            "10",
            "--seed",
            "2",
            "--arm-phases",
            "0,-1,2,3",
        ]);
        let cfg = resolve(a.to_value().unwrap(), None).unwrap();
        assert_eq!(cfg.scheme, SchemeVariant::DualPulse);
        assert_eq!(cfg.input, InputPreset::Random { seed: 4, count: 3 });
        assert_eq!(cfg.noise.epsilon, EpsilonDist::Uniform(0.1));
        assert_eq!(cfg.sweep[0].parameter, SweepParam::PDephase);
        assert_eq!(cfg.sweep[0].steps, 5);
        assert_eq!(cfg.arm_phases, [0.0, -1.0, 2.0, 3.0]);
        assert_eq!((cfg.shots, cfg.seed), (10, 2));
    }

    #[test]
    fn no_flags_is_default() {
        let cfg = resolve(args(&[]).to_value().unwrap(), None).unwrap();
        assert_eq!(cfg, Default::default());
    }

    #[test]
    fn bad_flag_values() {
        assert!(args(&["--input", "random:x:3"]).to_value().is_err());
        assert!(args(&["--sweep", "kappa:0:1"]).to_value().is_err());
        assert!(args(&["--arm-phases", "0,1"]).to_value().is_err());
        let neg = args(&["--shots", "-1"]);
        assert!(matches!(
            resolve(neg.to_value().unwrap(), None),
            Err(CliError::Config(_))
        ));
        assert!(Cli::try_parse_from([
            "ifm-cnot",
            "run",
            "--epsilon",
            "0.1",
            "--epsilon-max",
            "0.1"
        ])
        .is_err());
    }
}
