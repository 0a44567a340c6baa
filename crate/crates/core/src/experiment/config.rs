use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bbm::{geometric_schedule, Mode, StudyOptions, Verdict};
use crate::error::{Error, Result};
use crate::field::TestFunction;
use crate::geometry::{Domain, Scheme};
use crate::mollifiers::{bump_family, fractional_family, RdatiFamily};
use crate::spaces::SpaceSpec;

fn config_error(field: &str, message: impl ToString) -> Error {
    Error::Config {
        field: field.to_string(),
        message: message.to_string(),
    }
}

/// Which RDATI family drives the functional. The fractional family derives
/// `p` from the experiment and `R` from the domain; a stated
/// `enclosing_radius` must agree with the domain's.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FamilyConfig {
    Bump,
    Fractional {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        enclosing_radius: Option<f64>,
    },
}

/// Either a geometric sequence `nu_start · ratio^k`, `k < count`, or an
/// explicit list. In gagliardo mode the values are `s`, increasing.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu_start: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
}

impl ScheduleConfig {
    pub fn resolve(&self) -> Result<Vec<f64>> {
        match (self.values.as_ref(), self.nu_start, self.ratio, self.count) {
            (Some(v), None, None, None) => Ok(v.clone()),
            (Some(_), ..) => Err(config_error(
                "schedule.values",
                "give either values or nu_start/ratio/count, not both",
            )),
            (None, Some(start), Some(ratio), Some(count)) => {
                if !(start > 0.0) {
                    return Err(config_error("schedule.nu_start", "must be positive"));
                }
                if !(ratio > 0.0 && ratio < 1.0) {
                    return Err(config_error("schedule.ratio", "must lie in (0, 1)"));
                }
                Ok(geometric_schedule(start, ratio, count))
            }
            (None, None, ..) => Err(config_error("schedule.nu_start", "missing")),
            (None, _, None, _) => Err(config_error("schedule.ratio", "missing")),
            (None, ..) => Err(config_error("schedule.count", "missing")),
        }
    }
}

/// Where artifacts go; relative paths resolve against the output directory
/// handed to the runner.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub report: String,
    pub series: String,
    pub plot: String,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            report: "report.json".into(),
            series: "series.csv".into(),
            plot: "plot.svg".into(),
        }
    }
}

fn default_stride() -> usize {
    1
}

fn default_tolerance() -> f64 {
    StudyOptions::default().tolerance
}

/// One experiment, read from TOML (`.cfg`, `.toml`) or JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub p: f64,
    #[serde(default)]
    pub mode: Mode,
    /// Grid spacing.
    pub h: f64,
    #[serde(default)]
    pub scheme: Scheme,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_stride")]
    pub stride: usize,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default)]
    pub check_routes: bool,
    /// Verdict the run is expected to reach.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<Verdict>,
    pub domain: Domain,
    pub function: TestFunction,
    pub space: SpaceSpec,
    pub family: FamilyConfig,
    pub schedule: ScheduleConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| config_error(toml_field(&e), e.message()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| config_error(json_field(&e), e))
    }

    /// Reads and validates a config; JSON is chosen by a `.json` extension or
    /// a leading `{`.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let json = path.extension().is_some_and(|e| e == "json") || text.trim_start().starts_with('{');
        let cfg = if json { Self::from_json(&text)? } else { Self::from_toml(&text)? };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn family(&self) -> Result<RdatiFamily> {
        let n = self.domain.dim();
        match self.family {
            FamilyConfig::Bump => Ok(bump_family(n)),
            FamilyConfig::Fractional { enclosing_radius } => {
                let r = self.domain.enclosing_radius();
                if let Some(given) = enclosing_radius {
                    if (given - r).abs() > 1e-12 * r.max(1.0) {
                        return Err(config_error(
                            "family.enclosing_radius",
                            format!("{given} differs from the domain's enclosing radius {r}"),
                        ));
                    }
                }
                fractional_family(self.p, r, n).map_err(|e| config_error("family", e))
            }
        }
    }

    /// Checks every cross-reference that can be decided without sampling.
    pub fn validate(&self) -> Result<()> {
        if !(self.p >= 1.0 && self.p.is_finite()) {
            return Err(config_error("p", "must be a finite number >= 1"));
        }
        if !(self.h > 0.0) {
            return Err(config_error("h", "must be positive"));
        }
        if self.stride == 0 {
            return Err(config_error("stride", "must be at least 1"));
        }
        if !(self.tolerance > 0.0) {
            return Err(config_error("tolerance", "must be positive"));
        }
        self.domain.validate().map_err(|e| config_error("domain", e))?;
        let n = self.domain.dim();
        if let Some(d) = self.function.dim() {
            if d != n {
                return Err(config_error(
                    "function",
                    format!("function is {d}-dimensional but the domain is {n}-dimensional"),
                ));
            }
        }
        self.space.validate().map_err(|e| config_error("space", e))?;
        let tensor_domain = matches!(self.domain, Domain::Interval { .. } | Domain::Box { .. });
        if self.space.requires_tensor_grid() && !(tensor_domain && self.scheme == Scheme::TensorMidpoint) {
            return Err(config_error(
                "space",
                format!("{} needs a tensor grid: box domain and tensor-midpoint scheme", self.space.label()),
            ));
        }
        if let SpaceSpec::Mixed { r } = &self.space {
            if r.len() != n {
                return Err(config_error("space.r", format!("needs {n} exponents, got {}", r.len())));
            }
        }
        let family = self.family()?;
        let schedule = self.schedule.resolve()?;
        if schedule.len() < 4 {
            return Err(config_error(
                "schedule",
                format!("needs at least 4 points, got {}", schedule.len()),
            ));
        }
        match self.mode {
            Mode::Rdati => {
                for &nu in &schedule {
                    family.check_nu(nu).map_err(|e| config_error("schedule", e))?;
                }
            }
            Mode::Gagliardo => {
                if let Some(s) = schedule.iter().find(|&&s| !(s > 0.0 && s < 1.0)) {
                    return Err(config_error("schedule", format!("s = {s} outside (0, 1)")));
                }
                if self.check_routes {
                    let frac = fractional_family(self.p, self.domain.enclosing_radius(), n)
                        .map_err(|e| config_error("p", e))?;
                    for &s in &schedule {
                        frac.check_nu(1.0 - s).map_err(|e| config_error("schedule", e))?;
                    }
                }
            }
        }
        Ok(())
    }
}

fn toml_field(e: &toml::de::Error) -> &'static str {
    // the message carries the key; the field name here is a coarse locator
    let m = e.message();
    for key in ["domain", "function", "space", "family", "schedule", "output"] {
        if m.contains(&format!("`{key}`")) {
            return key;
        }
    }
    "config"
}

fn json_field(e: &serde_json::Error) -> &'static str {
    let m = e.to_string();
    for key in ["domain", "function", "space", "family", "schedule", "output"] {
        if m.contains(&format!("`{key}`")) {
            return key;
        }
    }
    "config"
}
