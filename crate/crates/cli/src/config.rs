//! Run configuration: defaults, overlaid by a JSON file, overlaid by flags.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use dqd_sim::protocol::{recommended_couple_time, Mode, ProtocolParams, PARAM_NAMES};
use dqd_sim::PropagatorConfig;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Encode,
    Entangle,
    Couple,
    Bell,
    Teleport,
    Chain,
    Sweep,
}

impl Experiment {
    pub const ALL: [Experiment; 7] = [
        Experiment::Encode,
        Experiment::Entangle,
        Experiment::Couple,
        Experiment::Bell,
        Experiment::Teleport,
        Experiment::Chain,
        Experiment::Sweep,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Encode => "encode",
            Experiment::Entangle => "entangle",
            Experiment::Couple => "couple",
            Experiment::Bell => "bell",
            Experiment::Teleport => "teleport",
            Experiment::Chain => "chain",
            Experiment::Sweep => "sweep",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| format!("unknown experiment `{s}`"))
    }
}

/// Settings from one source (file or flags); `None` leaves the lower layer in place.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Layer {
    pub experiment: Option<String>,
    /// `ProtocolParams` fields by name, e.g. `"U_max"`.
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    pub propagator: Option<PropagatorConfig>,
    pub alpha_abs: Option<f64>,
    pub n_support: Option<usize>,
    /// Sampled readouts for the `bell` experiment.
    pub shots: Option<usize>,
    pub seed: Option<u64>,
    pub mode: Option<String>,
    pub sweep: Option<SweepLayer>,
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepLayer {
    pub experiment: Option<String>,
    pub axis: Option<String>,
    pub values: Option<Vec<f64>>,
}

impl Layer {
    pub fn from_file(path: &Path) -> Result<Layer, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(vec![format!("cannot read {}: {e}", path.display())]))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(vec![format!("{}: {e}", path.display())]))
    }

    /// `self` with every setting present in `top` replaced.
    pub fn overlay(mut self, top: Layer) -> Layer {
        self.experiment = top.experiment.or(self.experiment);
        self.params.extend(top.params);
        self.propagator = top.propagator.or(self.propagator);
        self.alpha_abs = top.alpha_abs.or(self.alpha_abs);
        self.n_support = top.n_support.or(self.n_support);
        self.shots = top.shots.or(self.shots);
        self.seed = top.seed.or(self.seed);
        self.mode = top.mode.or(self.mode);
        self.sweep = match (self.sweep, top.sweep) {
            (Some(low), Some(high)) => Some(SweepLayer {
                experiment: high.experiment.or(low.experiment),
                axis: high.axis.or(low.axis),
                values: high.values.or(low.values),
            }),
            (low, high) => high.or(low),
        };
        self.output = top.output.or(self.output);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sweep {
    pub experiment: String,
    pub axis: String,
    pub values: Vec<f64>,
}

pub const DEFAULT_ALPHA_ABS: f64 = 0.6;
pub const DEFAULT_N_SUPPORT: usize = 4;

/// A fully resolved run. `params` holds only explicitly set values; the rest
/// are derived per run point by [`RunConfig::protocol_params`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub experiment: String,
    pub params: BTreeMap<String, f64>,
    pub propagator: Option<PropagatorConfig>,
    pub alpha_abs: f64,
    pub n_support: usize,
    pub shots: usize,
    pub seed: Option<u64>,
    pub mode: String,
    pub sweep: Option<Sweep>,
    pub output: PathBuf,
}

impl RunConfig {
    pub fn from_layer(layer: Layer) -> RunConfig {
        let experiment = layer.experiment.unwrap_or_else(|| "teleport".into());
        let sweep = layer.sweep.map(|s| Sweep {
            experiment: s.experiment.unwrap_or_else(|| "teleport".into()),
            axis: s.axis.unwrap_or_default(),
            values: s.values.unwrap_or_default(),
        });
        let output = layer.output.unwrap_or_else(|| PathBuf::from(&experiment));
        RunConfig {
            experiment,
            params: layer.params,
            propagator: layer.propagator,
            alpha_abs: layer.alpha_abs.unwrap_or(DEFAULT_ALPHA_ABS),
            n_support: layer.n_support.unwrap_or(DEFAULT_N_SUPPORT),
            shots: layer.shots.unwrap_or(0),
            seed: layer.seed,
            mode: layer.mode.unwrap_or_else(|| "full".into()),
            sweep,
            output,
        }
    }

    /// The experiment each row runs: the sweep's inner experiment for sweeps.
    pub fn row_experiment(&self) -> Result<Experiment, String> {
        let top: Experiment = self.experiment.parse()?;
        match (top, &self.sweep) {
            (Experiment::Sweep, Some(s)) => s.experiment.parse(),
            (Experiment::Sweep, None) => Err("sweep needs an axis and values".into()),
            (e, _) => Ok(e),
        }
    }

    /// Support length of the coupling ramp for the experiment.
    fn support_len(&self, experiment: Experiment) -> usize {
        if experiment == Experiment::Chain {
            self.n_support
        } else {
            2
        }
    }

    /// Protocol parameters for one run point, with `point` (a sweep axis value)
    /// applied on top of the explicit settings.
    ///
    /// `Uprime_max` and `bell_U` follow `U_max` unless set, and `T_couple`
    /// defaults to the gap-scaled coupling ramp length.
    pub fn protocol_params(&self, experiment: Experiment, point: Option<(&str, f64)>) -> Result<ProtocolParams, Vec<String>> {
        let mut errors = Vec::new();
        let mut explicit = self.params.clone();
        if let Some((name, v)) = point {
            explicit.insert(name.to_string(), v);
        }
        let mut p = ProtocolParams::default();
        match self.mode.parse::<Mode>() {
            Ok(m) => p.mode = m,
            Err(e) => errors.push(e.to_string()),
        }
        p.seed = self.seed;
        if let Some(prop) = self.propagator {
            p.propagator = prop;
        }
        for (name, &v) in &explicit {
            if let Err(e) = p.set(name, v) {
                errors.push(format!("{e}; expected one of {}", PARAM_NAMES.join(", ")));
            }
        }
        if !explicit.contains_key("Uprime_max") {
            p.uprime_max = p.u_max;
        }
        if !explicit.contains_key("bell_U") {
            p.bell_u = p.u_max;
        }
        errors.extend(p.problems());
        if errors.is_empty() && !explicit.contains_key("T_couple") {
            match recommended_couple_time(&p, self.support_len(experiment)) {
                Ok(t) if t.is_finite() => p.t_couple = t,
                Ok(t) => errors.push(format!("coupling ramp length is not finite ({t}); set T_couple explicitly")),
                Err(e) => errors.push(e.to_string()),
            }
        }
        if errors.is_empty() {
            Ok(p)
        } else {
            Err(errors)
        }
    }

    /// Axis values in output order, paired with their position in the input list.
    pub fn sweep_points(&self) -> Vec<(usize, f64)> {
        let mut pts: Vec<(usize, f64)> = self.sweep.as_ref().map(|s| s.values.iter().copied().enumerate().collect()).unwrap_or_default();
        pts.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        pts
    }
}

/// Outcome of [`validate_config`]: advisories that do not stop a run.
pub type Warnings = Vec<String>;

/// Every problem with `cfg`, aggregated; warnings on success.
pub fn validate_config(cfg: &RunConfig) -> Result<Warnings, Vec<String>> {
    let mut errors = Vec::new();
    let mut warnings = Vec::new();
    let top = cfg.experiment.parse::<Experiment>();
    if let Err(e) = &top {
        errors.push(e.clone());
    }
    let experiment = match cfg.row_experiment() {
        Ok(Experiment::Sweep) => {
            errors.push("a sweep cannot run another sweep".into());
            None
        }
        Ok(e) => Some(e),
        Err(e) => {
            if top.is_ok() {
                errors.push(e);
            }
            None
        }
    };

    let mut points: Vec<Option<(&str, f64)>> = vec![None];
    if top == Ok(Experiment::Sweep) {
        if let Some(s) = &cfg.sweep {
            if !PARAM_NAMES.contains(&s.axis.as_str()) {
                errors.push(format!("unknown sweep axis `{}`; expected one of {}", s.axis, PARAM_NAMES.join(", ")));
            } else {
                points = s.values.iter().map(|&v| Some((s.axis.as_str(), v))).collect();
            }
            if s.values.is_empty() {
                errors.push("sweep needs at least one value".into());
            }
            if let Some(v) = s.values.iter().find(|v| !v.is_finite()) {
                errors.push(format!("sweep value {v} is not finite"));
            }
        }
    }

    if !(0.0..=1.0).contains(&cfg.alpha_abs) {
        errors.push(format!("alpha_abs must lie in [0, 1], got {}", cfg.alpha_abs));
    }
    if experiment == Some(Experiment::Chain) {
        let budget = dqd_sim::chain::QUBIT_BUDGET;
        if cfg.n_support < 2 || cfg.n_support + 1 > budget {
            errors.push(format!("n_support must lie in [2, {}], got {}", budget - 1, cfg.n_support));
        }
    }
    if cfg.shots > 0 && cfg.seed.is_none() {
        errors.push("sampled runs (shots > 0) need a seed".into());
    }
    if cfg.shots > 0 && experiment != Some(Experiment::Bell) {
        errors.push("shots only apply to the bell experiment".into());
    }

    if let Some(e) = experiment {
        for point in points {
            match cfg.protocol_params(e, point) {
                Ok(p) => {
                    for w in p.warnings() {
                        if !warnings.contains(&w) {
                            warnings.push(w);
                        }
                    }
                }
                Err(list) => {
                    for msg in list {
                        let msg = match point {
                            Some((axis, v)) => format!("{msg} (at {axis} = {v})"),
                            None => msg,
                        };
                        if !errors.contains(&msg) {
                            errors.push(msg);
                        }
                    }
                }
            }
        }
    }
    if errors.is_empty() {
        Ok(warnings)
    } else {
        Err(errors)
    }
}
