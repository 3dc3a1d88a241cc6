// Copyright 2026 The ifm-cnot Developers
// SPDX-License-Identifier: Apache-2.0

//! Running configs and writing their results.
//!
//! CSV output starts with a `# ifm-cnot schema <version> <command>` comment
//! line followed by a header row. Columns by command:
//!
//! * `truth-table`: `point, <axes>, control_in, target_in, control_out,
//!   target_out, probability`
//! * `run`, `sweep`: `point, <axes>, eta, avg_gate_fidelity,
//!   process_fidelity, bell_fidelity, concurrence, success_prob,
//!   pulse_purity, probe_purity, fidelity_0+, fidelity_0-, fidelity_1+,
//!   fidelity_1-, mean_input_fidelity, min_input_fidelity`
//! * `sample`: `point, <axes>, input, shots, count_arm2, count_arm3,
//!   count_lost, p_arm2, p_arm3, p_lost, tv_distance`
//!
//! The JSON document carries `schema_version`, `command`, the resolved
//! `config` and one entry per grid point.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use ifm_core::gate::{Stage, PULSE};
use ifm_core::metrics::GateReport;
use ifm_core::quantum::partial_trace;
use ifm_core::{characterize, run_gate, PulseConfig};
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::{target_symbol, ExperimentConfig, GridPoint, OutputFormat, SCHEMA_VERSION};
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    TruthTable,
    Run,
    Sweep,
    Sample,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Command::TruthTable => "truth-table",
            Command::Run => "run",
            Command::Sweep => "sweep",
            Command::Sample => "sample",
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AxisValue {
    pub parameter: String,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct InputResult {
    pub label: String,
    pub fidelity: f64,
    pub post_selected_fidelity: f64,
    pub success_prob: f64,
    pub concurrence: f64,
}

/// Detector readings: arm 2 (reflected), arm 3 (transmitted), pulse lost.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Detectors<T> {
    pub arm2: T,
    pub arm3: T,
    pub lost: T,
}

#[derive(Debug, Clone, Serialize)]
pub struct SampleResult {
    pub label: String,
    pub shots: u64,
    pub probabilities: Detectors<f64>,
    pub counts: Detectors<u64>,
    /// Total-variation distance between click frequencies and probabilities;
    /// absent without shots.
    pub tv_distance: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PointResult {
    pub index: usize,
    pub axes: Vec<AxisValue>,
    /// Leakage actually used at this point.
    pub eta: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<GateReport>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub inputs: Vec<InputResult>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub samples: Vec<SampleResult>,
}

#[derive(Serialize)]
struct Document<'a> {
    schema_version: u32,
    command: Command,
    config: &'a ExperimentConfig,
    points: &'a [PointResult],
}

/// Rendered results of one experiment.
#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub command: Command,
    pub points: Vec<PointResult>,
    pub csv: String,
    pub json: String,
}

/// Evaluates every grid point of `cfg`. Points run in parallel and are
/// collected in grid order; all points share the config seed.
pub fn run_experiment(cfg: &ExperimentConfig, command: Command) -> CliResult<ExperimentOutput> {
    cfg.validate()?;
    if command == Command::Sweep && cfg.sweep.is_empty() {
        return Err(CliError::Config(
            "sweep needs at least one sweep axis".into(),
        ));
    }
    let grid = cfg.grid();
    let points = grid
        .par_iter()
        .map(|point| evaluate_point(point, command))
        .collect::<CliResult<Vec<_>>>()?;
    let csv = render_csv(cfg, command, &points)?;
    let doc = Document {
        schema_version: SCHEMA_VERSION,
        command,
        config: cfg,
        points: &points,
    };
    let mut json = serde_json::to_string_pretty(&doc)
        .map_err(|e| CliError::Io(format!("serializing results: {e}")))?;
    json.push('\n');
    Ok(ExperimentOutput {
        command,
        points,
        csv,
        json,
    })
}

fn evaluate_point(point: &GridPoint, command: Command) -> CliResult<PointResult> {
    let cfg = &point.config;
    let scheme = cfg.scheme();
    let nm = cfg.noise_model()?;
    let mut result = PointResult {
        index: point.index,
        axes: point
            .axes
            .iter()
            .map(|(p, v)| AxisValue {
                parameter: p.name().into(),
                value: *v,
            })
            .collect(),
        eta: nm.eta,
        report: None,
        inputs: Vec::new(),
        samples: Vec::new(),
    };
    match command {
        Command::TruthTable => {
            result.report = Some(characterize(&scheme, &nm, cfg.seed)?);
        }
        Command::Run | Command::Sweep => {
            result.report = Some(characterize(&scheme, &nm, cfg.seed)?);
            for (label, input) in cfg.input.inputs() {
                let run = run_gate(&scheme, &input, &nm, cfg.seed)?;
                result.inputs.push(InputResult {
                    label,
                    fidelity: run.fidelity,
                    post_selected_fidelity: run.post_selected_fidelity,
                    success_prob: run.success_prob,
                    concurrence: run.concurrence,
                });
            }
        }
        Command::Sample => {
            let shots = cfg.shots as u64;
            for (k, (label, input)) in cfg.input.inputs().into_iter().enumerate() {
                let run = run_gate(&scheme, &input, &nm, cfg.seed)?;
                let routed = run
                    .snapshots
                    .iter()
                    .find(|s| s.stage == Stage::Routed)
                    .expect("run records the routed stage");
                let probabilities = detector_probabilities(&routed.state.to_density())?;
                let stream = ((point.index as u64) << 32) | k as u64;
                result
                    .samples
                    .push(sample_clicks(label, probabilities, shots, cfg.seed, stream));
            }
        }
    }
    Ok(result)
}

/// Born probabilities of the detectors for a state just after routing.
pub fn detector_probabilities(rho: &ifm_core::DensityMatrix) -> CliResult<Detectors<f64>> {
    let pulse = partial_trace(rho, &[PULSE])?;
    let diag = pulse.diagonal();
    let weight = |c: PulseConfig| diag[c.index()].max(0.0);
    Ok(Detectors {
        arm2: weight(PulseConfig::Reflected),
        arm3: weight(PulseConfig::Transmitted),
        lost: weight(PulseConfig::LostForward) + weight(PulseConfig::LostReturn),
    })
}

/// Draws `shots` detector clicks from `probabilities` with the given seed and
/// ChaCha stream.
pub fn sample_clicks(
    label: String,
    probabilities: Detectors<f64>,
    shots: u64,
    seed: u64,
    stream: u64,
) -> SampleResult {
    let p = [probabilities.arm2, probabilities.arm3, probabilities.lost];
    let mut counts = [0u64; 3];
    if shots > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        let dist = WeightedIndex::new(p).expect("detector weights sum to one");
        for _ in 0..shots {
            counts[dist.sample(&mut rng)] += 1;
        }
    }
    let total: f64 = p.iter().sum();
    let tv_distance = (shots > 0).then(|| {
        0.5 * counts
            .iter()
            .zip(&p)
            .map(|(&n, &q)| (n as f64 / shots as f64 - q / total).abs())
            .sum::<f64>()
    });
    SampleResult {
        label,
        shots,
        probabilities,
        counts: Detectors {
            arm2: counts[0],
            arm3: counts[1],
            lost: counts[2],
        },
        tv_distance,
    }
}

fn render_csv(
    cfg: &ExperimentConfig,
    command: Command,
    points: &[PointResult],
) -> CliResult<String> {
    let axis_names: Vec<String> = cfg
        .sweep
        .iter()
        .map(|a| a.parameter.name().to_string())
        .collect();
    let mut header: Vec<String> = vec!["point".into()];
    header.extend(axis_names);
    let tail: &[&str] = match command {
        Command::TruthTable => &[
            "control_in",
            "target_in",
            "control_out",
            "target_out",
            "probability",
        ],
        Command::Run | Command::Sweep => &[
            "eta",
            "avg_gate_fidelity",
            "process_fidelity",
            "bell_fidelity",
            "concurrence",
            "success_prob",
            "pulse_purity",
            "probe_purity",
            "fidelity_0+",
            "fidelity_0-",
            "fidelity_1+",
            "fidelity_1-",
            "mean_input_fidelity",
            "min_input_fidelity",
        ],
        Command::Sample => &[
            "input",
            "shots",
            "count_arm2",
            "count_arm3",
            "count_lost",
            "p_arm2",
            "p_arm3",
            "p_lost",
            "tv_distance",
        ],
    };
    header.extend(tail.iter().map(|s| s.to_string()));

    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(&header).map_err(csv_error)?;
    for point in points {
        let mut lead = vec![point.index.to_string()];
        lead.extend(point.axes.iter().map(|a| a.value.to_string()));
        let mut rows: Vec<Vec<String>> = Vec::new();
        match command {
            Command::TruthTable => {
                for row in &point
                    .report
                    .as_ref()
                    .expect("truth table report")
                    .truth_table
                {
                    rows.push(vec![
                        row.control_in.to_string(),
                        target_symbol(row.target_in).into(),
                        row.control_out.to_string(),
                        target_symbol(row.target_out).into(),
                        row.probability.to_string(),
                    ]);
                }
            }
            Command::Run | Command::Sweep => {
                let r = point.report.as_ref().expect("gate report");
                let fids: Vec<f64> = point.inputs.iter().map(|i| i.fidelity).collect();
                let mean = fids.iter().sum::<f64>() / fids.len() as f64;
                let min = fids.iter().copied().fold(f64::INFINITY, f64::min);
                let mut row: Vec<String> = [
                    point.eta,
                    r.avg_gate_fidelity,
                    r.process_fidelity,
                    r.bell_fidelity,
                    r.concurrence,
                    r.success_prob,
                    r.pulse_purity,
                    r.probe_purity,
                ]
                .iter()
                .chain(&r.state_fidelities)
                .map(f64::to_string)
                .collect();
                row.push(mean.to_string());
                row.push(min.to_string());
                rows.push(row);
            }
            Command::Sample => {
                for s in &point.samples {
                    rows.push(vec![
                        s.label.clone(),
                        s.shots.to_string(),
                        s.counts.arm2.to_string(),
                        s.counts.arm3.to_string(),
                        s.counts.lost.to_string(),
                        s.probabilities.arm2.to_string(),
                        s.probabilities.arm3.to_string(),
                        s.probabilities.lost.to_string(),
                        s.tv_distance.map_or(String::new(), |d| d.to_string()),
                    ]);
                }
            }
        }
        for row in rows {
            let mut record = lead.clone();
            record.extend(row);
            writer.write_record(&record).map_err(csv_error)?;
        }
    }
    let body = writer
        .into_inner()
        .map_err(|e| CliError::Io(format!("writing CSV: {e}")))?;
    let body = String::from_utf8(body).expect("CSV of UTF-8 fields");
    Ok(format!(
        "# ifm-cnot schema {SCHEMA_VERSION} {command}\n{body}"
    ))
}

fn csv_error(e: csv::Error) -> CliError {
    CliError::Io(format!("writing CSV: {e}"))
}

/// Writes `output` as configured and returns the files written. Without a
/// path the results go to standard output.
pub fn write_outputs(output: &ExperimentOutput, cfg: &ExperimentConfig) -> CliResult<Vec<PathBuf>> {
    let format = cfg.output.format;
    let Some(path) = &cfg.output.path else {
        let stdout = std::io::stdout();
        let mut lock = stdout.lock();
        let text = match format {
            OutputFormat::Csv => output.csv.clone(),
            OutputFormat::Json => output.json.clone(),
            OutputFormat::Both => format!("{}\n{}", output.csv, output.json),
        };
        lock.write_all(text.as_bytes())
            .map_err(|e| CliError::io("writing to stdout", e))?;
        return Ok(Vec::new());
    };
    let targets: Vec<(PathBuf, &str)> = match format {
        OutputFormat::Csv => vec![(path.clone(), output.csv.as_str())],
        OutputFormat::Json => vec![(path.clone(), output.json.as_str())],
        OutputFormat::Both => vec![
            (path.with_extension("csv"), output.csv.as_str()),
            (path.with_extension("json"), output.json.as_str()),
        ],
    };
    for (file, text) in &targets {
        if let Some(dir) = file.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).map_err(|e| CliError::io(dir.display(), e))?;
        }
        fs::write(file, text).map_err(|e| CliError::io(file.display(), e))?;
    }
    Ok(targets.into_iter().map(|(p, _)| p).collect())
}

/// Result of re-running a stored experiment.
#[derive(Debug, Clone)]
pub struct Replay {
    pub output: ExperimentOutput,
    pub config: ExperimentConfig,
    /// Whether the re-run JSON equals the stored text byte for byte.
    pub identical: bool,
}

/// Re-runs the experiment recorded in a result JSON document.
pub fn replay(stored: &str) -> CliResult<Replay> {
    let doc: Value = serde_json::from_str(stored)
        .map_err(|e| CliError::Config(format!("result file is not JSON: {e}")))?;
    let version = doc.get("schema_version").and_then(Value::as_u64);
    if version != Some(u64::from(SCHEMA_VERSION)) {
        return Err(CliError::Config(format!(
            "result schema version {}, this build reads {SCHEMA_VERSION}",
            version.map_or("missing".to_string(), |v| v.to_string())
        )));
    }
    let command: Command = doc
        .get("command")
        .cloned()
        .ok_or_else(|| CliError::Config("result file has no command".into()))
        .and_then(|v| {
            serde_json::from_value(v).map_err(|e| CliError::Config(format!("command: {e}")))
        })?;
    let config: ExperimentConfig = doc
        .get("config")
        .cloned()
        .ok_or_else(|| CliError::Config("result file has no config".into()))
        .and_then(|v| {
            serde_json::from_value(v).map_err(|e| CliError::Config(format!("config: {e}")))
        })?;
    let output = run_experiment(&config, command)?;
    let identical = output.json == stored;
    Ok(Replay {
        output,
        config,
        identical,
    })
}

/// Reads a file, mapping failures to I/O errors.
pub fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path.display(), e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    #[test]
    fn ideal_truth_table_csv() {
        let out = run_experiment(&ExperimentConfig::default(), Command::TruthTable).unwrap();
        let expected = "# ifm-cnot schema 1 truth-table\n\
            point,control_in,target_in,control_out,target_out,probability\n\
            0,0,+,0,+,1\n0,0,-,0,-,1\n0,1,+,1,-,1\n0,1,-,1,+,1\n";
        assert_eq!(out.csv, expected);
    }

    #[test]
    fn sampling_is_seeded_and_streamed() {
        let p = Detectors {
            arm2: 0.3,
            arm3: 0.7,
            lost: 0.0,
        };
        let a = sample_clicks("x".into(), p, 1000, 5, 0);
        let b = sample_clicks("x".into(), p, 1000, 5, 0);
        let c = sample_clicks("x".into(), p, 1000, 5, 1);
        assert_eq!(a.counts, b.counts);
        assert_ne!(a.counts, c.counts);
        assert_eq!(a.counts.lost, 0);
        assert_eq!(a.counts.arm2 + a.counts.arm3, 1000);
    }

    #[test]
    fn zero_shots() {
        let p = Detectors {
            arm2: 1.0,
            arm3: 0.0,
            lost: 0.0,
        };
        let s = sample_clicks("x".into(), p, 0, 1, 0);
        assert_eq!(
            s.counts,
            Detectors {
                arm2: 0,
                arm3: 0,
                lost: 0
            }
        );
        assert_eq!(s.tv_distance, None);
    }

    #[test]
    fn sweep_requires_axes() {
        let err = run_experiment(&ExperimentConfig::default(), Command::Sweep).unwrap_err();
        assert!(matches!(err, CliError::Config(_)));
    }

    #[test]
    fn run_rows_one_per_point() {
        let cfg = parse_config(
            r#"{"sweep": [{"parameter": "p_dephase", "from": 0, "to": 1, "steps": 4}]}"#,
        )
        .unwrap();
        let out = run_experiment(&cfg, Command::Sweep).unwrap();
        let lines: Vec<&str> = out.csv.lines().collect();
        assert_eq!(lines.len(), 2 + 4);
        assert!(lines[1].starts_with("point,p_dephase,eta,avg_gate_fidelity"));
        assert!(lines[2].starts_with("0,0,0,1,"));
    }

    #[test]
    fn replay_matches_and_rejects_other_versions() {
        let cfg = parse_config(r#"{"shots": 100, "seed": 3, "input": "bell"}"#).unwrap();
        let out = run_experiment(&cfg, Command::Sample).unwrap();
        let r = replay(&out.json).unwrap();
        assert!(r.identical);
        let bumped = out
            .json
            .replacen("\"schema_version\": 1", "\"schema_version\": 2", 1);
        assert!(matches!(replay(&bumped), Err(CliError::Config(_))));
    }
}
