//! `RunConfig` JSON schema and its translation into a model.

use std::path::{Path, PathBuf};

use poptransfer::pulse::SampledEnvelope;
use poptransfer::{CouplingModel, Pulse};
use serde::Deserialize;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSpec,
    pub pulse: PulseSpec,
    pub run: RunSpec,
    #[serde(default)]
    pub output: Option<OutputSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub n: usize,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    #[serde(default)]
    pub eps: Option<Eps>,
    pub energies: Option<Vec<f64>>,
    pub reduced_multiplicity: Option<usize>,
}

/// One diagonal for every state, or one per state.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum Eps {
    Uniform(f64),
    PerState(Vec<f64>),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseSpec {
    pub kind: String,
    pub chi: Option<f64>,
    pub omega: Option<f64>,
    #[serde(rename = "A0")]
    pub a0: Option<f64>,
    pub t0: Option<f64>,
    pub width: Option<f64>,
    pub samples_file: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Analytic,
    Numeric,
    Compare,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    pub mode: Mode,
    pub t_end: f64,
    pub dt: Option<f64>,
    /// Output rows, including `t = 0`.
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_samples() -> usize {
    1001
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        let config: RunConfig = serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<(), String> {
        let run = &self.run;
        if !(run.t_end >= 0.0 && run.t_end.is_finite()) {
            return Err(format!("run.t_end must be a finite value >= 0, got {}", run.t_end));
        }
        if let Some(dt) = run.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(format!("run.dt must be positive, got {dt}"));
            }
        }
        if run.samples < 2 {
            return Err(format!("run.samples must be at least 2, got {}", run.samples));
        }
        Ok(())
    }

    pub fn format(&self) -> Format {
        self.output.as_ref().map(|o| o.format).unwrap_or_default()
    }

    pub fn output_path(&self) -> Option<&Path> {
        self.output.as_ref().and_then(|o| o.path.as_deref())
    }

    /// Builds the pulse; `samples_file` is resolved against `base`.
    pub fn pulse(&self, base: &Path) -> Result<Pulse, String> {
        let p = &self.pulse;
        let need = |v: Option<f64>, name: &str| v.ok_or_else(|| format!("pulse kind {:?} needs {name}", p.kind));
        let pulse = match p.kind.as_str() {
            "harmonic" => Pulse::harmonic(need(p.chi, "chi")?, need(p.omega, "omega")?),
            "delta_kick" => Pulse::delta_kick(need(p.a0, "A0")?, need(p.t0, "t0")?),
            "rect_kick" => Pulse::rect_kick(need(p.a0, "A0")?, need(p.t0, "t0")?, need(p.width, "width")?),
            "custom_sampled" => {
                let file = p.samples_file.as_ref().ok_or("pulse kind \"custom_sampled\" needs samples_file")?;
                let path = base.join(file);
                return SampledEnvelope::from_csv_path(&path)
                    .map(Pulse::CustomSampled)
                    .map_err(|e| format!("{}: {e}", path.display()));
            }
            other => return Err(format!("unknown pulse kind {other:?}")),
        };
        pulse.map_err(|e| e.to_string())
    }

    pub fn model(&self, pulse: Pulse) -> Result<CouplingModel, String> {
        let m = &self.model;
        let n = m.n;
        let eps: Vec<f64> = match &m.eps {
            None => vec![0.0; n],
            Some(Eps::Uniform(e)) => vec![*e; n],
            Some(Eps::PerState(v)) if v.len() == n => v.clone(),
            Some(Eps::PerState(v)) => return Err(format!("model.eps has {} entries, expected {n}", v.len())),
        };
        let model = match (n, m.reduced_multiplicity) {
            (3, Some(mult)) => {
                if eps.iter().any(|&e| e != eps[0]) {
                    return Err("a reduced model takes one uniform eps".into());
                }
                if m.beta.is_some_and(|b| b != 1.0) {
                    return Err("a reduced model has beta = 1".into());
                }
                if mult < 1 {
                    return Err("reduced_multiplicity must be at least 1".into());
                }
                CouplingModel::symmetric_nstate(mult + 2, m.alpha.unwrap_or(0.0), eps[0], pulse).map_err(|e| e.to_string())?
            }
            (_, Some(_)) => return Err(format!("reduced_multiplicity requires n = 3, got n = {n}")),
            (2, None) => {
                if m.alpha.is_some() || m.beta.is_some() {
                    return Err("alpha and beta apply to n = 3 only".into());
                }
                CouplingModel::standard_2state(eps[0], eps[1], pulse)
            }
            (3, None) => CouplingModel::standard_3state(m.alpha.unwrap_or(0.0), m.beta.unwrap_or(1.0), [eps[0], eps[1], eps[2]], pulse),
            _ => return Err(format!("model.n must be 2 or 3, got {n}")),
        };
        match &m.energies {
            None => Ok(model),
            Some(e) => model.with_energies(e.clone()).map_err(|e| e.to_string()),
        }
    }
}
