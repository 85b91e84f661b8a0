//! Experiment configuration: a TOML file with top-level `seed`, `threads`,
//! `out` keys and one `[[experiment]]` table per run.

use std::fmt;

use maxreg_core::kernels::KernelSetting;
use maxreg_core::operators::estimates::record;
use maxreg_core::transference::ChartName;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    KernelEval,
    OracleCompare,
    EstimateSweep,
    RegularitySweep,
    TransferCheck,
    CoveringBuild,
}

impl Kind {
    pub fn label(&self) -> &'static str {
        match self {
            Kind::KernelEval => "kernel-eval",
            Kind::OracleCompare => "oracle-compare",
            Kind::EstimateSweep => "estimate-sweep",
            Kind::RegularitySweep => "regularity-sweep",
            Kind::TransferCheck => "transfer-check",
            Kind::CoveringBuild => "covering-build",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelKind {
    Heat,
    #[default]
    Poisson,
}

/// One experiment. Fields irrelevant to `kind` are ignored; unset ones take
/// the experiment's defaults.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: Option<Kind>,
    pub setting: Option<String>,
    pub alpha: Option<f64>,
    pub t_final: Option<f64>,
    /// `[t_min, t_max]`; `oracle-compare` then samples four geometric times in it.
    pub t_range: Option<[f64; 2]>,
    pub kernel: Option<KernelKind>,
    /// `(t, x, y)` triples for `kernel-eval`.
    pub points: Option<Vec<[f64; 3]>>,
    pub record: Option<String>,
    pub entry: Option<String>,
    pub x_max: Option<f64>,
    pub h0: Option<f64>,
    pub levels: Option<usize>,
    pub tolerance: Option<f64>,
    /// Seeded random test fields added to the standard one.
    pub random_fields: Option<usize>,
    /// Also compare horizons `T` and `2T`.
    pub horizon: Option<bool>,
    pub window: Option<f64>,
    pub dilation: Option<f64>,
    pub spacing: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub out: Option<String>,
    #[serde(default, rename = "experiment")]
    pub experiments: Vec<ExperimentConfig>,
}

/// A rejected configuration, naming the offending field.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationError {
    pub field: String,
    pub message: String,
}

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid {}: {}", self.field, self.message)
    }
}

impl std::error::Error for ValidationError {}

fn invalid(field: String, message: impl Into<String>) -> ValidationError {
    ValidationError {
        field,
        message: message.into(),
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, ValidationError> {
        toml::from_str(text).map_err(|e| invalid("config".into(), e.message().to_string()))
    }

    pub fn validate(&self) -> Result<(), ValidationError> {
        if self.threads == Some(0) {
            return Err(invalid("threads".into(), "must be at least 1"));
        }
        for (i, e) in self.experiments.iter().enumerate() {
            e.validate(&format!("experiment[{i}]"))?;
        }
        Ok(())
    }
}

fn positive(prefix: &str, name: &str, v: Option<f64>) -> Result<(), ValidationError> {
    match v {
        Some(x) if !(x > 0.0 && x.is_finite()) => Err(invalid(
            format!("{prefix}.{name}"),
            format!("must be positive, got {x}"),
        )),
        _ => Ok(()),
    }
}

impl ExperimentConfig {
    pub fn kind(&self) -> Kind {
        self.kind.expect("validated")
    }

    pub fn validate(&self, prefix: &str) -> Result<(), ValidationError> {
        let kind = self
            .kind
            .ok_or_else(|| invalid(format!("{prefix}.kind"), "missing"))?;
        for (name, v) in [
            ("alpha", self.alpha),
            ("t_final", self.t_final),
            ("x_max", self.x_max),
            ("h0", self.h0),
            ("tolerance", self.tolerance),
            ("window", self.window),
            ("spacing", self.spacing),
        ] {
            positive(prefix, name, v)?;
        }
        if let Some(d) = self.dilation {
            if !(d >= 1.0 && d.is_finite()) {
                return Err(invalid(
                    format!("{prefix}.dilation"),
                    format!("must be at least 1, got {d}"),
                ));
            }
        }
        if let Some([lo, hi]) = self.t_range {
            if !(lo > 0.0 && hi >= lo && hi.is_finite()) {
                return Err(invalid(
                    format!("{prefix}.t_range"),
                    format!("need 0 < t_min <= t_max, got [{lo}, {hi}]"),
                ));
            }
        }
        if self.levels == Some(0) {
            return Err(invalid(format!("{prefix}.levels"), "must be at least 1"));
        }
        let needs_setting = matches!(
            kind,
            Kind::KernelEval | Kind::OracleCompare | Kind::RegularitySweep
        );
        if needs_setting {
            self.kernel_setting()
                .map_err(|m| invalid(format!("{prefix}.setting"), m.to_string()))?;
        }
        match kind {
            Kind::EstimateSweep => {
                let id = self
                    .record
                    .as_deref()
                    .ok_or_else(|| invalid(format!("{prefix}.record"), "missing"))?;
                let r = record(id).map_err(|_| {
                    invalid(format!("{prefix}.record"), format!("unknown record {id}"))
                })?;
                if r.needs_alpha && self.alpha.is_none() {
                    return Err(invalid(
                        format!("{prefix}.alpha"),
                        format!("record {id} needs alpha"),
                    ));
                }
            }
            Kind::TransferCheck => {
                let label = self
                    .entry
                    .as_deref()
                    .ok_or_else(|| invalid(format!("{prefix}.entry"), "missing"))?;
                ChartName::from_label(label).map_err(|_| {
                    invalid(format!("{prefix}.entry"), format!("unknown entry {label}"))
                })?;
            }
            _ => {}
        }
        Ok(())
    }

    /// The setting named by `setting` (default `hermite`).
    pub fn kernel_setting(&self) -> maxreg_core::Result<KernelSetting> {
        let name = self.setting.as_deref().unwrap_or("hermite");
        let alpha = match (name, self.alpha) {
            ("bessel" | "laguerre", None) => Some(1.5),
            (_, a) => a,
        };
        KernelSetting::from_name(name, alpha)
    }
}
