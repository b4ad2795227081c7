//! Post-hoc analyses of a stored `trajectory.bin`.

use std::path::{Path, PathBuf};

use serde::Serialize;
use slowpass::burst::{default_v_split, SpaceTimeSeries};
use slowpass::io::{read_snapshots, write_spectrum_csv, write_trajectory_csv, StoredRun, SNAPSHOT_MAGIC};
use slowpass::models::LacState;
use slowpass::qss::{lactotroph_qss, LacQssOptions};
use slowpass::spatial::{cosine_spectrum, Field, FieldKind, PointState};
use slowpass::Complex64;

use crate::artifacts::RunState;
use crate::config::{Analysis, AnalysisOptions, ExperimentSpec, ModelSpec};
use crate::error::CliError;
use crate::runner::{SOFTWARE, VERSION};

#[derive(Debug, Clone)]
pub struct AnalyzeRequest {
    pub trajectory: PathBuf,
    pub out: PathBuf,
    /// `csv` converts the trajectory; the rest are analysis names.
    pub tasks: Vec<String>,
    /// Supplies analysis options and, for the lactotroph model, the QSS behind the
    /// default split voltage.
    pub spec: Option<ExperimentSpec>,
}

#[derive(Debug, Serialize)]
pub struct AnalyzeReport {
    pub software: &'static str,
    pub version: &'static str,
    pub trajectory: String,
    pub snapshots: usize,
    pub artifacts: Vec<String>,
    pub warnings: Vec<String>,
    pub metrics: std::collections::BTreeMap<String, serde_json::Value>,
}

fn components(bytes: &[u8]) -> Result<u32, CliError> {
    if bytes.len() < 24 || bytes[..8] != SNAPSHOT_MAGIC[..] {
        return Err(slowpass::Error::Format("not a snapshot file".into()).into());
    }
    Ok(u32::from_le_bytes(bytes[20..24].try_into().expect("four bytes")))
}

pub fn analyze(req: &AnalyzeRequest) -> Result<AnalyzeReport, CliError> {
    let bytes = std::fs::read(&req.trajectory)?;
    let mut st = RunState::new(&req.out)?;
    let opts = req.spec.as_ref().map(|s| s.analysis.clone()).unwrap_or_default();
    let mut errors = Vec::new();
    let mut analyses = Vec::new();
    let mut csv = false;
    for t in &req.tasks {
        if t == "csv" {
            csv = true;
            continue;
        }
        match serde_json::from_value::<Analysis>(serde_json::Value::String(t.clone())) {
            Ok(a @ (Analysis::Spectrum | Analysis::Signatures | Analysis::CanardScan | Analysis::Front)) => analyses.push(a),
            _ => errors.push(format!("analyze: {t:?} is not one of csv, spectrum, signatures, canard-scan, front")),
        }
    }
    if analyses.contains(&Analysis::Front) && opts.front_signature.is_none() {
        errors.push("analyze: front needs analysis.front_signature".into());
    }
    if !errors.is_empty() {
        return Err(CliError::Validation(errors));
    }

    let n = match components(&bytes)? {
        2 => {
            let run: StoredRun<Complex64> = read_snapshots(&bytes[..])?;
            if analyses.iter().any(Analysis::needs_series) {
                return Err(CliError::Validation(vec!["analyze: burst analyses need a lactotroph trajectory".into()]));
            }
            common(&run, csv, &analyses, &mut st)?;
            run.snapshots.len()
        }
        3 => {
            let run: StoredRun<LacState> = read_snapshots(&bytes[..])?;
            common(&run, csv, &analyses, &mut st)?;
            if analyses.iter().any(Analysis::needs_series) {
                series(&run, req.spec.as_ref(), &opts, &analyses, &mut st)?;
            }
            run.snapshots.len()
        }
        c => return Err(slowpass::Error::Format(format!("unsupported component count {c}")).into()),
    };
    let report = AnalyzeReport {
        software: SOFTWARE,
        version: VERSION,
        trajectory: req.trajectory.display().to_string(),
        snapshots: n,
        artifacts: st.artifacts,
        warnings: st.warnings,
        metrics: st.metrics,
    };
    std::fs::write(req.out.join("analysis.json"), serde_json::to_string_pretty(&report)? + "\n")?;
    Ok(report)
}

fn common<P: PointState>(run: &StoredRun<P>, csv: bool, analyses: &[Analysis], st: &mut RunState) -> Result<(), CliError> {
    if csv {
        st.write("trajectory.csv", |w| write_trajectory_csv(w, &run.grid, &run.snapshots))?;
    }
    if analyses.contains(&Analysis::Spectrum) {
        let last = run
            .snapshots
            .last()
            .ok_or_else(|| slowpass::Error::Format("trajectory has no snapshots".into()))?;
        let spectrum = match P::KIND {
            FieldKind::ComplexScalar => {
                let f: Vec<Complex64> = last.field.values().iter().map(|p| complex_of(p)).collect();
                cosine_spectrum(&Field::new(f)?, &run.grid)?
            }
            _ => {
                let mut buf = vec![0.0; P::COMPONENTS];
                let f: Vec<f64> = last
                    .field
                    .values()
                    .iter()
                    .map(|p| {
                        p.write_components(&mut buf);
                        buf[0]
                    })
                    .collect();
                cosine_spectrum(&Field::new(f)?, &run.grid)?
            }
        };
        st.write("spectrum.csv", |w| write_spectrum_csv(w, &spectrum))?;
    }
    Ok(())
}

fn complex_of<P: PointState>(p: &P) -> Complex64 {
    let mut buf = [0.0; 2];
    p.write_components(&mut buf);
    Complex64::new(buf[0], buf[1])
}

fn series(
    run: &StoredRun<LacState>,
    spec: Option<&ExperimentSpec>,
    opts: &AnalysisOptions,
    analyses: &[Analysis],
    st: &mut RunState,
) -> Result<(), CliError> {
    let all = SpaceTimeSeries::from_snapshots(&run.grid, &run.snapshots, |s| s.v);
    let t_last = all.t.last().copied().unwrap_or(0.0);
    let (t0, t1) = opts.window.map_or((0.5 * t_last, t_last), |[a, b]| (a, b));
    let mut data = all.window(t0, t1);
    if let Some(spec) = spec {
        let keep = spec.analysis_indices(&run.grid);
        data.x = keep.iter().map(|&j| data.x[j]).collect();
        data.values = keep.iter().map(|&j| std::mem::take(&mut data.values[j])).collect();
    }
    let v_split = match (opts.v_split, spec) {
        (Some(v), _) => v,
        (None, Some(ExperimentSpec { model: ModelSpec::Lactotroph(p), source, .. })) => {
            let ramp_at_end = run
                .snapshots
                .iter()
                .rev()
                .find(|s| s.t <= t1)
                .map_or(0.0, |s| s.ramp);
            let vq = lactotroph_qss(0.0, ramp_at_end, p, source, &LacQssOptions::default())?.v;
            default_v_split(data.global_min(), vq)
        }
        _ => {
            st.warn("no model given; v_split is the midpoint of the series range");
            let hi = data.values.iter().flatten().fold(f64::NEG_INFINITY, |m, v| m.max(*v));
            default_v_split(data.global_min(), hi)
        }
    };
    crate::series::burst_analyses(&data, analyses, opts, v_split, st)
}

/// Default output directory for `analyze`: next to the trajectory.
pub fn default_out(trajectory: &Path) -> PathBuf {
    trajectory.parent().map_or_else(|| PathBuf::from("analysis"), |p| p.join("analysis"))
}
