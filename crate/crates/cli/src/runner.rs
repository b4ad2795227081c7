use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use slowpass::dhb::{DelaySample, OnsetCurve};
use slowpass::io::num;

use crate::artifacts::{finish, RunState};
use crate::config::{ExperimentSpec, ModelSpec, RunSpec};
use crate::error::CliError;

pub const SOFTWARE: &str = "slowpass";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const DETERMINISM: &str = "No random numbers are drawn anywhere. Re-running config.toml (or the \
config recorded here) with the same binary on the same platform reproduces every CSV byte for byte; \
the thread count only changes which runs execute concurrently.";

pub const SHARED_DIR: &str = "analyses";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunStatus {
    Ok,
    BlowUp,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub name: String,
    pub directory: String,
    pub status: RunStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub artifacts: Vec<String>,
    pub warnings: Vec<String>,
    pub metrics: BTreeMap<String, serde_json::Value>,
    pub config: ExperimentSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub software: String,
    pub version: String,
    pub experiment: String,
    pub description: String,
    pub determinism: String,
    /// Resolved experiment, sweep included.
    pub config: ExperimentSpec,
    /// Source of every numeric setting, keyed like overrides.
    pub provenance: BTreeMap<String, String>,
    pub runs: Vec<RunRecord>,
    /// Cross-run products, relative to the output directory.
    pub shared: Vec<String>,
}

impl Manifest {
    pub fn all_blew_up(&self) -> bool {
        !self.runs.is_empty() && self.runs.iter().all(|r| r.status == RunStatus::BlowUp)
    }

    pub fn run(&self, name: &str) -> Option<&RunRecord> {
        self.runs.iter().find(|r| r.name == name)
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub out: PathBuf,
    /// Worker threads for concurrent runs; `None` uses every core.
    pub threads: Option<usize>,
}

/// Validates everything, runs each simulation and writes the manifest.
pub fn run_experiment(spec: &ExperimentSpec, opts: &RunOptions) -> Result<Manifest, CliError> {
    let runs = spec.validate()?;
    std::fs::create_dir_all(&opts.out)?;
    std::fs::write(opts.out.join("config.toml"), spec.to_toml())?;

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = opts.threads {
        builder = builder.num_threads(n.max(1));
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Io(std::io::Error::other(e.to_string())))?;
    let outcomes: Vec<(RunRecord, Option<Vec<DelaySample>>)> =
        pool.install(|| runs.par_iter().map(|r| execute(r, &opts.out)).collect());

    let mut shared = Vec::new();
    let delays: Vec<(&str, &Vec<DelaySample>)> = outcomes
        .iter()
        .filter_map(|(rec, d)| d.as_ref().map(|d| (rec.name.as_str(), d)))
        .collect();
    if !delays.is_empty() {
        let dir = opts.out.join(SHARED_DIR);
        std::fs::create_dir_all(&dir)?;
        write_shared_delay(&dir.join("delay.csv"), &delays)?;
        shared.push(format!("{SHARED_DIR}/delay.csv"));
    }

    let manifest = Manifest {
        software: SOFTWARE.into(),
        version: VERSION.into(),
        experiment: spec.name.clone(),
        description: spec.description.clone(),
        determinism: DETERMINISM.into(),
        config: spec.clone(),
        provenance: provenance(spec),
        runs: outcomes.into_iter().map(|(r, _)| r).collect(),
        shared,
    };
    let text = serde_json::to_string_pretty(&manifest)?;
    std::fs::write(opts.out.join("manifest.json"), text + "\n")?;
    Ok(manifest)
}

fn execute(run: &RunSpec, out: &Path) -> (RunRecord, Option<Vec<DelaySample>>) {
    let mut st = RunState {
        dir: out.join(&run.name),
        ..Default::default()
    };
    let result = std::fs::create_dir_all(&st.dir)
        .map_err(CliError::from)
        .and_then(|_| match &run.spec.model {
            ModelSpec::Cgl(p) => crate::cgl::run(&run.spec, *p, &mut st),
            ModelSpec::Lactotroph(p) => crate::lactotroph::run(&run.spec, *p, &mut st),
        });
    let (status, error, delay) = match result {
        Ok(d) => (RunStatus::Ok, None, d),
        Err(CliError::Core(e @ slowpass::Error::BlowUp { .. })) => (RunStatus::BlowUp, Some(e.to_string()), None),
        Err(e) => (RunStatus::Failed, Some(e.to_string()), None),
    };
    let record = RunRecord {
        name: run.name.clone(),
        directory: run.name.clone(),
        status,
        error,
        artifacts: st.artifacts,
        warnings: st.warnings,
        metrics: st.metrics,
        config: run.spec.clone(),
    };
    (record, delay)
}

fn write_shared_delay(path: &Path, delays: &[(&str, &Vec<DelaySample>)]) -> Result<(), CliError> {
    use std::io::Write;
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "run,x,delay")?;
    for (name, d) in delays {
        for s in d.iter() {
            writeln!(w, "{name},{},{}", num(s.x), num(s.delay))?;
        }
    }
    finish(w)
}

pub(crate) fn onset_summary(o: &OnsetCurve, analysed: usize, st: &mut RunState) {
    st.metric("onset_points", o.samples.len());
    st.metric("analysed_points", analysed);
    if let (Some(lo), Some(hi)) = (
        o.samples.iter().map(|s| s.ramp).min_by(f64::total_cmp),
        o.samples.iter().map(|s| s.ramp).max_by(f64::total_cmp),
    ) {
        st.metric("onset_range", [lo, hi]);
    }
    if o.samples.len() < analysed {
        st.warn(format!(
            "{} of {analysed} analysed points never left the QSS",
            analysed - o.samples.len()
        ));
    }
}

/// Labels every numeric leaf of the resolved config: explicit entries first, then
/// "default".
pub fn provenance(spec: &ExperimentSpec) -> BTreeMap<String, String> {
    let doc = toml::Value::try_from(spec).expect("experiment specs serialize");
    let mut out = BTreeMap::new();
    walk(&doc, "", &mut |key| {
        let label = spec
            .provenance
            .get(key)
            .cloned()
            .unwrap_or_else(|| "default".to_string());
        out.insert(key.to_string(), label);
    });
    out
}

fn walk(v: &toml::Value, prefix: &str, f: &mut impl FnMut(&str)) {
    match v {
        toml::Value::Table(t) => {
            for (k, child) in t {
                if prefix.is_empty() && k == "provenance" {
                    continue;
                }
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                walk(child, &key, f);
            }
        }
        toml::Value::Integer(_) | toml::Value::Float(_) => f(prefix),
        toml::Value::Array(a) if a.iter().any(|x| x.is_integer() || x.is_float()) => f(prefix),
        _ => {}
    }
}

/// Reads an experiment from a TOML file or from the `config` of a manifest.
pub fn load_config(path: &Path) -> Result<ExperimentSpec, CliError> {
    let text = std::fs::read_to_string(path)?;
    if path.extension().is_some_and(|e| e == "json") {
        let m: serde_json::Value = serde_json::from_str(&text)?;
        let cfg = m.get("config").cloned().unwrap_or(m);
        return serde_json::from_value(cfg).map_err(|e| CliError::Validation(vec![format!("config: {e}")]));
    }
    ExperimentSpec::from_toml(&text)
}
