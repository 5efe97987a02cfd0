//! JSON run configuration for a single simulation.
//!
//! ```json
//! {
//!   "model":   { "n": 10, "kappa": 1.0, "identical_nu": 5.0, "oscillators": 10 },
//!   "initial": { "uniform_box": { "alpha": 1.0, "seed": 3 } },
//!   "sim":     { "dt": 0.01, "t_end": 100, "record_stride": 10, "integrator": "euler" },
//!   "outputs": { "trace_path": "trace.csv", "report_path": "summary.json" }
//! }
//! ```
//!
//! Unknown keys anywhere are rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analysis::{Tolerances, DEFAULT_DISCARD};
use crate::dynamics::{EnsembleState, ModelConfig, SimOptions};
use crate::error::{Result, WinfreeError};
use crate::sweep::{cell_initial_phases, InitialSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub n: i64,
    pub kappa: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frequencies: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub identical_nu: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oscillators: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialSection {
    Explicit(Vec<f64>),
    UniformBox {
        alpha: f64,
        #[serde(default)]
        seed: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_trace")]
    pub trace_path: PathBuf,
    #[serde(default = "default_report")]
    pub report_path: PathBuf,
}

fn default_trace() -> PathBuf {
    "trace.csv".into()
}

fn default_report() -> PathBuf {
    "summary.json".into()
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { trace_path: default_trace(), report_path: default_report() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifySection {
    #[serde(default = "default_discard")]
    pub discard_fraction: f64,
    #[serde(default)]
    pub tolerances: Tolerances,
}

fn default_discard() -> f64 {
    DEFAULT_DISCARD
}

impl Default for ClassifySection {
    fn default() -> Self {
        Self { discard_fraction: DEFAULT_DISCARD, tolerances: Tolerances::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSection,
    pub initial: InitialSection,
    #[serde(default)]
    pub sim: SimOptions,
    #[serde(default)]
    pub outputs: OutputSection,
    #[serde(default)]
    pub classify: ClassifySection,
}

/// Parses JSON and turns serde errors into `origin:line:column: message`.
pub fn parse_json<T: serde::de::DeserializeOwned>(text: &str, origin: &str) -> Result<T> {
    serde_json::from_str(text)
        .map_err(|e| WinfreeError::InvalidConfig(format!("{origin}:{}:{}: {e}", e.line(), e.column())))
}

impl RunConfig {
    pub fn from_json(text: &str, origin: &str) -> Result<Self> {
        let cfg: RunConfig = parse_json(text, origin)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| WinfreeError::InvalidConfig(format!("{}: {e}", path.display())))?;
        Self::from_json(&text, &path.display().to_string())
    }

    pub fn frequencies(&self) -> Result<Vec<f64>> {
        let m = &self.model;
        match (&m.frequencies, m.identical_nu, m.oscillators) {
            (Some(f), None, None) => Ok(f.clone()),
            (None, Some(nu), Some(count)) => Ok(vec![nu; count]),
            _ => Err(WinfreeError::InvalidConfig(
                "model: give either `frequencies` or both `identical_nu` and `oscillators`".into(),
            )),
        }
    }

    pub fn model_config(&self) -> Result<ModelConfig> {
        let kernel = crate::kernel::KernelOrder::from_signed(self.model.n)
            .map_err(|e| WinfreeError::InvalidConfig(format!("model.n: {e}")))?;
        ModelConfig::with_kernel(kernel, self.model.kappa, self.frequencies()?)
            .map_err(|e| WinfreeError::InvalidConfig(format!("model: {e}")))
    }

    pub fn initial_state(&self) -> Result<EnsembleState> {
        let count = self.frequencies()?.len();
        let phases = match &self.initial {
            InitialSection::Explicit(p) => {
                if p.len() != count {
                    return Err(WinfreeError::InvalidConfig(format!(
                        "initial.explicit: {} phases for {count} oscillators",
                        p.len()
                    )));
                }
                p.clone()
            }
            InitialSection::UniformBox { alpha, seed } => {
                if !(*alpha > 0.0 && alpha.is_finite()) {
                    return Err(WinfreeError::InvalidConfig(format!(
                        "initial.uniform_box.alpha = {alpha} must be positive"
                    )));
                }
                let n = self.model.n.max(1) as u32;
                cell_initial_phases(&InitialSpec::UniformBox { alpha: *alpha }, count, *seed, n, self.model.kappa)
            }
        };
        EnsembleState::at_zero(phases).map_err(|e| WinfreeError::InvalidConfig(format!("initial: {e}")))
    }

    pub fn validate(&self) -> Result<()> {
        self.model_config()?;
        self.initial_state()?;
        self.sim.validate().map_err(|e| WinfreeError::InvalidConfig(format!("sim: {e}")))?;
        let c = &self.classify;
        if !(0.0..1.0).contains(&c.discard_fraction) {
            return Err(WinfreeError::InvalidConfig(format!(
                "classify.discard_fraction = {} outside [0, 1)",
                c.discard_fraction
            )));
        }
        Ok(())
    }
}
