use std::fs::File;
use std::io::BufWriter;
use std::ops::ControlFlow;

use slowpass::burst::default_v_split;
use slowpass::dhb::{delay_measurement, DelaySample, OnsetCurve, OnsetDetector};
use slowpass::integrator::{integrate_with, Snapshot};
use slowpass::io::{write_delay_csv, write_hopf_csv, write_onset_csv, write_qss_csv, SnapshotWriter, TrajectoryCsvWriter};
use slowpass::models::{LacState, LactotrophModel, LactotrophParams, SourceProfile};
use slowpass::qss::{hopf_locus, lactotroph_qss, LacQssOptions};
use slowpass::spatial::Field;

use crate::artifacts::{finish, RunState};
use crate::config::{Analysis, ExperimentSpec, InitialSpec};
use crate::error::CliError;
use crate::runner::onset_summary;
use crate::series::{burst_analyses, SeriesCollector};

/// Drive spacing of the QSS table.
const TABLE_STEP: f64 = 1e-3;

/// Depolarized QSS voltage as a function of total drive `I + I_app(x)`, linearly
/// interpolated. The QSS depends on position only through the drive, so one scan per
/// table entry replaces one scan per grid point and snapshot.
#[derive(Debug, Clone)]
pub struct QssTable {
    lo: f64,
    v: Vec<Option<f64>>,
}

impl QssTable {
    pub fn new(p: &LactotrophParams, lo: f64, hi: f64) -> Self {
        let n = ((hi - lo) / TABLE_STEP).ceil().max(1.0) as usize + 1;
        let none = SourceProfile::constant(0.0);
        let o = LacQssOptions::default();
        let v = (0..n)
            .map(|k| lactotroph_qss(0.0, lo + k as f64 * TABLE_STEP, p, &none, &o).ok().map(|s| s.v))
            .collect();
        Self { lo, v }
    }

    pub fn voltage(&self, drive: f64) -> Option<f64> {
        let u = (drive - self.lo) / TABLE_STEP;
        if !(u >= 0.0) {
            return None;
        }
        let k = (u.floor() as usize).min(self.v.len().saturating_sub(2));
        let w = u - k as f64;
        if w > 1.0 + 1e-9 {
            return None;
        }
        Some(self.v[k]? * (1.0 - w) + self.v.get(k + 1).copied().flatten()? * w)
    }
}

pub(crate) fn run(
    spec: &ExperimentSpec,
    p: LactotrophParams,
    st: &mut RunState,
) -> Result<Option<Vec<DelaySample>>, CliError> {
    let grid = spec.grid()?;
    let cfg = spec.run_config()?;
    let ramp = spec.ramp_spec();
    let model = LactotrophModel::new(p, spec.source.clone(), ramp.initial, ramp.rate)?;
    let xs_all = grid.points();
    let drive_src = spec.source.sample(&xs_all)?;
    let end_ramp = spec.final_ramp().unwrap_or(ramp.initial);
    let (r_lo, r_hi) = (ramp.initial.min(end_ramp), ramp.initial.max(end_ramp));
    let s_lo = drive_src.iter().fold(f64::INFINITY, |m, v| m.min(*v));
    let s_hi = drive_src.iter().fold(f64::NEG_INFINITY, |m, v| m.max(*v));
    let table = QssTable::new(&p, r_lo + s_lo - TABLE_STEP, r_hi + s_hi + TABLE_STEP);
    let qss_field = |i: f64| -> Option<Field<LacState>> {
        let values: Option<Vec<LacState>> = drive_src
            .iter()
            .map(|s| table.voltage(i + s).map(|v| p.steady_state_at(v)))
            .collect();
        values.and_then(|v| Field::new(v).ok())
    };

    let q0 = qss_field(ramp.initial);
    if spec.has(Analysis::Qss) {
        match &q0 {
            Some(q) => st.write("qss.csv", |w| write_qss_csv(w, &grid, q.values()))?,
            None => st.warn(format!("qss: no depolarized QSS at I = {} somewhere on the grid", ramp.initial)),
        }
    }
    let init = match spec.initial {
        InitialSpec::Qss { perturbation } => {
            let q = q0.clone().ok_or_else(|| {
                slowpass::Error::NoQss(format!("initial QSS missing at I = {}", ramp.initial))
            })?;
            Field::new(
                q.values()
                    .iter()
                    .map(|s| LacState {
                        v: s.v + perturbation,
                        ..*s
                    })
                    .collect(),
            )?
        }
        InitialSpec::State { v, n, e } => Field::constant(&grid, LacState { v, n, e })?,
        InitialSpec::Amplitude { .. } => unreachable!("rejected by validation"),
    };

    let indices = spec.analysis_indices(&grid);
    let xs: Vec<f64> = indices.iter().map(|&j| grid.x(j)).collect();
    let x_max = spec.x_max() + 1e-9 * grid.half_length();
    let mut detector = if spec.has(Analysis::Onset) {
        Some(OnsetDetector::new(&grid, spec.threshold())?)
    } else {
        None
    };
    let series_wanted = spec.analyses.iter().any(Analysis::needs_series);
    let early = spec.analysis.stop_after_escape && detector.is_some() && !series_wanted;
    let t_end = spec.end_time().unwrap_or(0.0);
    let window = spec.analysis.window.map_or((0.5 * t_end, t_end), |[a, b]| (a, b));
    let mut collector = series_wanted.then(|| SeriesCollector::new(window, indices.clone(), &xs_all));

    let mut bin = if spec.output.trajectory_bin {
        Some(SnapshotWriter::<_, LacState>::new(st.create("trajectory.bin")?, &grid)?)
    } else {
        None
    };
    let mut csv = if spec.output.trajectory_csv {
        Some(TrajectoryCsvWriter::<_, LacState>::new(st.create("trajectory.csv")?, &grid)?)
    } else {
        None
    };

    let mut detecting = detector.is_some();
    let mut last: Option<Snapshot<LacState>> = None;
    let mut last_stored = false;
    let mut observed = 0usize;
    let mut stopped_early = false;
    let mut failure: Option<CliError> = None;
    let keep = spec.output.keep_every;

    let outcome = integrate_with(&model, &cfg, &init, |snap| {
        let kept = observed % keep == 0;
        observed += 1;
        if let Some(c) = collector.as_mut() {
            c.push(snap.t, |j| snap.field.get(j).v);
        }
        let mut observe = || -> Result<bool, CliError> {
            if kept {
                store(&mut bin, &mut csv, &snap)?;
            }
            let (true, Some(det)) = (detecting, detector.as_mut()) else {
                return Ok(false);
            };
            match qss_field(snap.ramp) {
                Some(q) => det.observe(snap.ramp, &snap.field, &q)?,
                None => {
                    st.warn(format!("onset detection stopped at I = {}: the depolarized QSS vanished", snap.ramp));
                    detecting = false;
                }
            }
            Ok(early && det.escaped_where(|x| x.abs() <= x_max))
        };
        let flow = match observe() {
            Ok(false) => ControlFlow::Continue(()),
            Ok(true) => {
                stopped_early = true;
                ControlFlow::Break(())
            }
            Err(e) => {
                failure = Some(e);
                ControlFlow::Break(())
            }
        };
        last_stored = kept;
        last = Some(snap);
        flow
    });
    if let (false, Some(s)) = (last_stored, &last) {
        store(&mut bin, &mut csv, s)?;
    }
    if let Some(w) = bin {
        finish(w.finish()?)?;
    }
    if let Some(w) = csv {
        finish(w.finish()?)?;
    }
    if let Some(e) = failure {
        return Err(e);
    }
    outcome?;
    let last = last.expect("the initial snapshot is always emitted");
    st.metric("final_t", last.t);
    st.metric("final_ramp", last.ramp);
    st.metric("stopped_early", stopped_early);

    let onset = detector.map(|d| {
        let full = d.finish();
        OnsetCurve {
            threshold: full.threshold,
            samples: full
                .samples
                .into_iter()
                .filter(|s| xs.iter().any(|x| (x - s.x).abs() <= 1e-9 * grid.half_length()))
                .collect(),
        }
    });
    if let Some(o) = &onset {
        st.write("onset.csv", |w| write_onset_csv(w, o))?;
        onset_summary(o, xs.len(), st);
    }

    let hopf = if spec.has(Analysis::Hopf) {
        let range = spec.analysis.hopf_range.map_or((ramp.initial, end_ramp), |[a, b]| (a, b));
        let locus = hopf_locus(&model, &xs, range, spec.analysis.hopf_scan)?;
        st.write("hopf.csv", |w| write_hopf_csv(w, &locus))?;
        Some(locus)
    } else {
        None
    };

    let mut delay = None;
    if let (true, Some(o), Some(h)) = (spec.has(Analysis::Delay), &onset, &hopf) {
        let d = delay_measurement(o, h)?;
        st.write("delay.csv", |w| write_delay_csv(w, &d))?;
        // the ramp decreases, so onset should lie below the Hopf value
        let early_points = o
            .samples
            .iter()
            .filter(|s| h.ramp_at(s.x).is_some_and(|r| s.ramp > r))
            .count();
        st.metric("onset_before_hopf", early_points);
        delay = Some(d);
    }

    if let Some(c) = collector {
        let v_split = match spec.analysis.v_split {
            Some(v) => v,
            None => {
                let centre = grid.nearest_index(0.0);
                let i_ref = ramp.value(window.1.min(last.t));
                match table.voltage(i_ref + drive_src[centre]) {
                    Some(vq) => default_v_split(c.data.global_min(), vq),
                    None => {
                        let vmax = c.data.values.iter().flatten().fold(f64::NEG_INFINITY, |m, v| m.max(*v));
                        st.warn("no depolarized QSS at the centre; v_split uses the series maximum");
                        default_v_split(c.data.global_min(), vmax)
                    }
                }
            }
        };
        burst_analyses(&c.data, &spec.analyses, &spec.analysis, v_split, st)?;
    }
    Ok(delay)
}

fn store(
    bin: &mut Option<SnapshotWriter<BufWriter<File>, LacState>>,
    csv: &mut Option<TrajectoryCsvWriter<BufWriter<File>, LacState>>,
    s: &Snapshot<LacState>,
) -> Result<(), CliError> {
    if let Some(w) = bin.as_mut() {
        w.push(s.t, s.ramp, &s.field)?;
    }
    if let Some(w) = csv.as_mut() {
        w.push(s.t, s.ramp, &s.field)?;
    }
    Ok(())
}
