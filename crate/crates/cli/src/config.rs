//! Experiment files.
//!
//! An experiment is a TOML document. Every key is listed in the README; a minimal CGL
//! experiment looks like
//!
//! ```toml
//! name = "demo"
//! analyses = ["onset", "buffer"]
//!
//! [model]
//! kind = "cgl"
//! beta_r = 0.0
//!
//! [source]
//! kind = "gaussian"
//! amplitude = 1.0
//! sigma = 0.25
//!
//! [grid]
//! half_length = 20.0
//! n_points = 4001
//!
//! [ramp]
//! initial = -1.0
//!
//! [run]
//! dt = 0.01
//! stop_ramp = 1.6
//! ```

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use slowpass::dhb::BufferOrder;
use slowpass::integrator::{IntegratorKind, RunConfig, StopRule};
use slowpass::models::{CglParams, LactotrophParams, RampSpec, SourceProfile};
use slowpass::spatial::Grid1D;

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ModelSpec {
    Cgl(CglParams),
    Lactotroph(LactotrophParams),
}

impl ModelSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::Cgl(_) => "cgl",
            Self::Lactotroph(_) => "lactotroph",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub half_length: f64,
    pub n_points: usize,
}

/// CGL ramps increase (`mu = initial + rate t`, rate defaults to `eps`); lactotroph ramps
/// decrease (`I = initial - rate t`, rate defaults to 0).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RampSettings {
    pub initial: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rate: Option<f64>,
}

fn default_stride() -> usize {
    1
}

fn default_blowup() -> f64 {
    1e6
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSettings {
    pub dt: f64,
    /// Stop time. Exactly one of `t_end` and `stop_ramp` is required.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stop_ramp: Option<f64>,
    /// Steps between observed snapshots.
    #[serde(default = "default_stride")]
    pub snapshot_stride: usize,
    #[serde(default = "default_integrator")]
    pub integrator: IntegratorKind,
    #[serde(default = "default_blowup")]
    pub blowup_threshold: f64,
}

fn default_integrator() -> IntegratorKind {
    IntegratorKind::Strang
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum InitialSpec {
    /// QSS at the initial ramp value, shifted by `perturbation` (real part for CGL, V for
    /// the lactotroph model).
    Qss {
        #[serde(default)]
        perturbation: f64,
    },
    /// Uniform CGL amplitude.
    Amplitude { re: f64, im: f64 },
    /// Uniform lactotroph state.
    State { v: f64, n: f64, e: f64 },
}

impl Default for InitialSpec {
    fn default() -> Self {
        Self::Qss { perturbation: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Analysis {
    Qss,
    Onset,
    Buffer,
    Hopf,
    Delay,
    Signatures,
    CanardScan,
    Front,
    Spectrum,
}

impl Analysis {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Qss => "qss",
            Self::Onset => "onset",
            Self::Buffer => "buffer",
            Self::Hopf => "hopf",
            Self::Delay => "delay",
            Self::Signatures => "signatures",
            Self::CanardScan => "canard-scan",
            Self::Front => "front",
            Self::Spectrum => "spectrum",
        }
    }

    /// Analyses that read voltage time series.
    pub fn needs_series(&self) -> bool {
        matches!(self, Self::Signatures | Self::CanardScan | Self::Front)
    }
}

fn yes() -> bool {
    true
}

fn default_orders() -> Vec<BufferOrder> {
    vec![BufferOrder::Leading]
}

fn default_hopf_scan() -> usize {
    400
}

fn default_front_window() -> f64 {
    500.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisOptions {
    /// Escape distance from the QSS. Defaults to `sqrt(eps)` for CGL and 1 mV for the
    /// lactotroph model.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    /// Analyses cover `|x| <= x_max`; defaults to the half-length.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_max: Option<f64>,
    /// Spacing of buffer, Hopf, signature and canard samples; defaults to the grid spacing.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_step: Option<f64>,
    /// End the run once every analysed point has escaped. Ignored when a time-series
    /// analysis is requested.
    #[serde(default = "yes")]
    pub stop_after_escape: bool,
    /// Include diffusion in the CGL QSS.
    #[serde(default = "yes")]
    pub qss_diffusion: bool,
    #[serde(default = "default_orders")]
    pub buffer_orders: Vec<BufferOrder>,
    /// Ramp interval scanned for Hopf points; defaults to the run's ramp interval.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hopf_range: Option<[f64; 2]>,
    #[serde(default = "default_hopf_scan")]
    pub hopf_scan: usize,
    /// Time window of the burst analyses; defaults to the second half of the run.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<[f64; 2]>,
    /// LAO/SAO split voltage; defaults to the midpoint between the global minimum and the
    /// depolarized QSS voltage at the centre.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v_split: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub canard_window: Option<[f64; 2]>,
    #[serde(default)]
    pub canard_ref: f64,
    /// Signature label that marks the invading rhythm, e.g. `"1^3"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub front_signature: Option<String>,
    #[serde(default = "default_front_window")]
    pub front_window: f64,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        toml::from_str("").expect("all analysis options have defaults")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputOptions {
    #[serde(default = "yes")]
    pub trajectory_bin: bool,
    #[serde(default)]
    pub trajectory_csv: bool,
    /// Store every n-th observed snapshot.
    #[serde(default = "default_stride")]
    pub keep_every: usize,
}

impl Default for OutputOptions {
    fn default() -> Self {
        Self {
            trajectory_bin: true,
            trajectory_csv: false,
            keep_every: 1,
        }
    }
}

/// One swept parameter, addressed by its dotted key.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub key: String,
    pub values: Vec<toml::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub name: String,
    #[serde(default)]
    pub description: String,
    #[serde(default)]
    pub analyses: Vec<Analysis>,
    pub model: ModelSpec,
    pub source: SourceProfile,
    pub grid: GridSpec,
    pub ramp: RampSettings,
    pub run: RunSettings,
    #[serde(default)]
    pub initial: InitialSpec,
    #[serde(default)]
    pub analysis: AnalysisOptions,
    #[serde(default)]
    pub output: OutputOptions,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Sweep>,
    /// Where each value comes from, keyed like overrides.
    #[serde(default)]
    pub provenance: BTreeMap<String, String>,
}

/// A single simulation after sweep expansion.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub name: String,
    pub spec: ExperimentSpec,
}

impl ExperimentSpec {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let fail = |m: String| CliError::Validation(vec![format!("config: {m}")]);
        let raw: toml::Value = toml::from_str(text).map_err(|e| fail(e.message().to_string()))?;
        let spec: Self = raw.clone().try_into().map_err(|e: toml::de::Error| fail(e.message().to_string()))?;
        let back = toml::Value::try_from(&spec).map_err(|e| fail(e.to_string()))?;
        let mut unknown = Vec::new();
        unknown_keys(&raw, &back, "", &mut unknown);
        if unknown.is_empty() {
            Ok(spec)
        } else {
            Err(CliError::Validation(
                unknown.into_iter().map(|k| format!("config: unknown key {k:?}")).collect(),
            ))
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("experiment specs serialize")
    }

    pub fn ramp_spec(&self) -> RampSpec {
        match &self.model {
            ModelSpec::Cgl(p) => RampSpec::increasing(self.ramp.initial, self.ramp.rate.unwrap_or(p.eps)),
            ModelSpec::Lactotroph(_) => RampSpec::decreasing(self.ramp.initial, self.ramp.rate.unwrap_or(0.0)),
        }
    }

    pub fn grid(&self) -> Result<Grid1D, CliError> {
        Ok(Grid1D::new(self.grid.half_length, self.grid.n_points)?)
    }

    pub fn run_config(&self) -> Result<RunConfig, CliError> {
        let stop = match (self.run.t_end, self.run.stop_ramp) {
            (Some(t), None) => StopRule::Time(t),
            (None, Some(r)) => StopRule::Ramp(r),
            _ => {
                return Err(CliError::Validation(vec![
                    "run: exactly one of t_end and stop_ramp is required".into(),
                ]))
            }
        };
        let mut cfg = RunConfig::new(self.grid()?, self.run.dt, stop)
            .with_stride(self.run.snapshot_stride)
            .with_integrator(self.run.integrator);
        cfg.blowup_threshold = self.run.blowup_threshold;
        Ok(cfg)
    }

    /// Ramp value at the end of the run.
    pub fn final_ramp(&self) -> Option<f64> {
        let r = self.ramp_spec();
        match (self.run.t_end, self.run.stop_ramp) {
            (_, Some(v)) => Some(v),
            (Some(t), None) => Some(r.value(t)),
            _ => None,
        }
    }

    pub fn end_time(&self) -> Option<f64> {
        match (self.run.t_end, self.run.stop_ramp) {
            (Some(t), _) => Some(t),
            (None, Some(v)) => self.ramp_spec().time_to(v),
            _ => None,
        }
    }

    pub fn threshold(&self) -> f64 {
        self.analysis.threshold.unwrap_or(match &self.model {
            ModelSpec::Cgl(p) => p.eps.sqrt(),
            ModelSpec::Lactotroph(_) => 1.0,
        })
    }

    pub fn x_max(&self) -> f64 {
        self.analysis.x_max.unwrap_or(self.grid.half_length)
    }

    /// Grid points inside the analysis window, thinned to roughly `x_step`.
    pub fn analysis_indices(&self, grid: &Grid1D) -> Vec<usize> {
        let every = self
            .analysis
            .x_step
            .map(|s| (s / grid.dx()).round().max(1.0) as usize)
            .unwrap_or(1);
        let centre = (grid.n_points() - 1) / 2;
        let x_max = self.x_max() + 1e-9 * grid.half_length();
        (0..grid.n_points())
            .filter(|&j| j.abs_diff(centre) % every == 0 && grid.x(j).abs() <= x_max)
            .collect()
    }

    pub fn has(&self, a: Analysis) -> bool {
        self.analyses.contains(&a)
    }

    /// Every problem with the experiment, in one pass.
    pub fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut push = |r: Result<(), String>| {
            if let Err(e) = r {
                out.push(e);
            }
        };
        let err = |what: &str, e: slowpass::Error| format!("{what}: {e}");
        match &self.model {
            ModelSpec::Cgl(p) => push(p.validate().map_err(|e| err("model", e))),
            ModelSpec::Lactotroph(p) => push(p.validate().map_err(|e| err("model", e))),
        }
        push(self.source.validate().map_err(|e| err("source", e)));
        let grid = Grid1D::new(self.grid.half_length, self.grid.n_points);
        push(grid.as_ref().map(|_| ()).map_err(|e| format!("grid: {e}")));
        push(self.ramp_spec().validate().map_err(|e| err("ramp", e)));
        let grid_ok = grid.is_ok();
        if !(self.run.dt.is_finite() && self.run.dt > 0.0) {
            push(Err(format!("run: dt must be positive, got {}", self.run.dt)));
        } else if !grid_ok {
            if self.run.t_end.is_some() == self.run.stop_ramp.is_some() {
                push(Err("run: exactly one of t_end and stop_ramp is required".into()));
            }
        } else {
            match self.run_config() {
                Ok(cfg) => push(cfg.n_steps(&self.ramp_spec()).map(|_| ()).map_err(|e| err("run", e))),
                Err(CliError::Validation(v)) => v.into_iter().for_each(|m| push(Err(m))),
                Err(e) => push(Err(e.to_string())),
            }
        }
        if self.output.keep_every == 0 {
            push(Err("output: keep_every must be at least 1".into()));
        }
        let is_cgl = matches!(self.model, ModelSpec::Cgl(_));
        for a in &self.analyses {
            let ok = match a {
                Analysis::Buffer | Analysis::Spectrum => is_cgl,
                Analysis::Signatures | Analysis::CanardScan | Analysis::Front => !is_cgl,
                _ => true,
            };
            if !ok {
                push(Err(format!(
                    "analyses: {} is not available for the {} model",
                    a.as_str(),
                    self.model.kind()
                )));
            }
        }
        if self.has(Analysis::Delay) && !(self.has(Analysis::Onset) && self.has(Analysis::Hopf)) {
            push(Err("analyses: delay needs onset and hopf".into()));
        }
        if self.has(Analysis::Front) && self.analysis.front_signature.is_none() {
            push(Err("analysis: front needs front_signature".into()));
        }
        if self.has(Analysis::Onset) && matches!(self.initial, InitialSpec::Qss { perturbation } if perturbation.abs() >= self.threshold()) {
            push(Err("initial: perturbation must stay below the escape threshold".into()));
        }
        match (&self.model, &self.initial) {
            (ModelSpec::Cgl(_), InitialSpec::State { .. }) => {
                push(Err("initial: state initial condition is for the lactotroph model".into()))
            }
            (ModelSpec::Lactotroph(_), InitialSpec::Amplitude { .. }) => {
                push(Err("initial: amplitude initial condition is for the CGL model".into()))
            }
            _ => {}
        }
        let t = self.threshold();
        if !(t.is_finite() && t > 0.0) {
            push(Err(format!("analysis: threshold must be positive, got {t}")));
        }
        if let Some(s) = self.analysis.x_step {
            if !(s.is_finite() && s > 0.0) {
                push(Err(format!("analysis: x_step must be positive, got {s}")));
            }
        }
        if self.analysis.hopf_scan < 2 {
            push(Err("analysis: hopf_scan must be at least 2".into()));
        }
        if let Some([a, b]) = self.analysis.window {
            if !(b > a) {
                push(Err("analysis: window must be increasing".into()));
            }
        }
        if !(self.analysis.front_window > 0.0) {
            push(Err("analysis: front_window must be positive".into()));
        }
        if let Some(sw) = &self.sweep {
            if sw.values.is_empty() {
                push(Err("sweep: values is empty".into()));
            }
            if let Some(l) = &sw.labels {
                if l.len() != sw.values.len() {
                    push(Err("sweep: labels and values differ in length".into()));
                }
            }
            for v in &sw.values {
                let mut probe = self.clone();
                probe.sweep = None;
                if let Err(e) = probe.set(&sw.key, v.clone()) {
                    push(Err(format!("sweep: {e}")));
                    break;
                }
            }
        }
        out
    }

    /// Sets a dotted key such as `model.d` and re-reads the experiment. Unknown keys are
    /// rejected.
    pub fn set(&mut self, key: &str, value: toml::Value) -> Result<(), String> {
        let mut doc = toml::Value::try_from(&*self).map_err(|e| e.to_string())?;
        let path: Vec<&str> = key.split('.').collect();
        if path.iter().any(|p| p.is_empty()) {
            return Err(format!("malformed key {key:?}"));
        }
        let mut node = &mut doc;
        for (depth, part) in path.iter().enumerate() {
            let table = node
                .as_table_mut()
                .ok_or_else(|| format!("{key}: {} is not a table", path[..depth].join(".")))?;
            if depth + 1 == path.len() {
                table.insert(part.to_string(), value.clone());
                break;
            }
            node = table
                .entry(part.to_string())
                .or_insert_with(|| toml::Value::Table(Default::default()));
        }
        let text = toml::to_string(&doc).map_err(|e| e.to_string())?;
        let next: ExperimentSpec = toml::from_str(&text).map_err(|e| format!("{key}: {}", e.message()))?;
        // keys that serde silently drops come back missing
        let check = toml::Value::try_from(&next).map_err(|e| e.to_string())?;
        let mut at = Some(&check);
        for part in &path {
            at = at.and_then(|n| n.get(part));
        }
        match at {
            Some(v) if same_value(v, &value) => {
                *self = next;
                Ok(())
            }
            Some(_) => Err(format!("{key}: value {value} was not accepted")),
            None => Err(format!("unknown key {key:?}")),
        }
    }

    /// Applies `key=value` strings. The right-hand side is read as a TOML value, falling
    /// back to a bare string.
    pub fn apply_overrides(&mut self, overrides: &[String]) -> Result<(), CliError> {
        let mut errors = Vec::new();
        for o in overrides {
            let Some((k, v)) = o.split_once('=') else {
                errors.push(format!("override {o:?} is not key=value"));
                continue;
            };
            if let Err(e) = self.set(k.trim(), parse_value(v.trim())) {
                errors.push(format!("override: {e}"));
            }
        }
        if errors.is_empty() {
            Ok(())
        } else {
            Err(CliError::Validation(errors))
        }
    }

    /// One run per sweep value, or the experiment itself.
    pub fn expand(&self) -> Result<Vec<RunSpec>, CliError> {
        let Some(sw) = &self.sweep else {
            return Ok(vec![RunSpec {
                name: self.name.clone(),
                spec: self.clone(),
            }]);
        };
        let mut base = self.clone();
        base.sweep = None;
        let mut runs = Vec::new();
        let mut errors = Vec::new();
        for (k, v) in sw.values.iter().enumerate() {
            let mut spec = base.clone();
            if let Err(e) = spec.set(&sw.key, v.clone()) {
                errors.push(format!("sweep: {e}"));
                continue;
            }
            let suffix = match &sw.labels {
                Some(l) => l[k].clone(),
                None => format!("{}-{}", sw.key.rsplit('.').next().unwrap_or(&sw.key), value_text(v)),
            };
            spec.name = format!("{}-{}", self.name, suffix);
            runs.push(RunSpec {
                name: spec.name.clone(),
                spec,
            });
        }
        if errors.is_empty() {
            Ok(runs)
        } else {
            Err(CliError::Validation(errors))
        }
    }

    /// Checks the experiment and every run it expands to.
    pub fn validate(&self) -> Result<Vec<RunSpec>, CliError> {
        let mut errors = self.problems();
        if self.name.is_empty() || self.name.contains(['/', '\\']) {
            errors.push(format!("name: {:?} is not a usable directory name", self.name));
        }
        let runs = match self.expand() {
            Ok(r) => r,
            Err(CliError::Validation(v)) => {
                errors.extend(v);
                Vec::new()
            }
            Err(e) => return Err(e),
        };
        for r in &runs {
            for p in r.spec.problems() {
                let line = format!("{}: {p}", r.name);
                if !errors.iter().any(|e| line.ends_with(e.as_str())) {
                    errors.push(line);
                }
            }
        }
        let mut names: Vec<&str> = runs.iter().map(|r| r.name.as_str()).collect();
        names.sort_unstable();
        if names.windows(2).any(|w| w[0] == w[1]) {
            errors.push("sweep: run names are not unique".into());
        }
        if errors.is_empty() {
            Ok(runs)
        } else {
            Err(CliError::Validation(errors))
        }
    }
}

/// Keys present in `raw` that did not survive deserialization.
fn unknown_keys(raw: &toml::Value, back: &toml::Value, prefix: &str, out: &mut Vec<String>) {
    let (Some(r), Some(b)) = (raw.as_table(), back.as_table()) else {
        return;
    };
    for (k, v) in r {
        let path = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
        match b.get(k) {
            None => out.push(path),
            Some(w) if prefix != "provenance" => unknown_keys(v, w, &path, out),
            Some(_) => {}
        }
    }
}

fn same_value(a: &toml::Value, b: &toml::Value) -> bool {
    match (a, b) {
        (toml::Value::Float(x), toml::Value::Integer(y)) | (toml::Value::Integer(y), toml::Value::Float(x)) => {
            *x == *y as f64
        }
        _ => a == b,
    }
}

fn value_text(v: &toml::Value) -> String {
    match v {
        toml::Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

pub fn parse_value(text: &str) -> toml::Value {
    let probe = format!("v = {text}");
    match toml::from_str::<toml::Table>(&probe) {
        Ok(mut t) => t.remove("v").unwrap_or_else(|| toml::Value::String(text.into())),
        Err(_) => toml::Value::String(text.into()),
    }
}
