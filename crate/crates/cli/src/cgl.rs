use std::fs::File;
use std::io::BufWriter;
use std::ops::ControlFlow;

use slowpass::dhb::{
    buffer_curve_closed_form, buffer_curve_from_growth, delay_measurement, BufferOrder, DelaySample, ModeSum,
    OnsetCurve, OnsetDetector,
};
use slowpass::integrator::{integrate_with, Snapshot};
use slowpass::io::{
    write_buffer_csv, write_delay_csv, write_hopf_csv, write_onset_csv, write_qss_csv, write_spectrum_csv,
    SnapshotWriter, TrajectoryCsvWriter,
};
use slowpass::models::{CglModel, CglParams, SourceProfile};
use slowpass::qss::{cgl_qss_field, hopf_locus, CglQssOptions, Linearization, QssMethod};
use slowpass::spatial::{cosine_spectrum, Field};
use slowpass::Complex64;

use crate::artifacts::{finish, RunState};
use crate::config::{Analysis, ExperimentSpec, InitialSpec};
use crate::error::CliError;
use crate::runner::onset_summary;

/// Relative source amplitude below which Gaussian modes are ignored by the resolution check.
const MODE_FLOOR: f64 = 1e-12;

pub(crate) fn run(spec: &ExperimentSpec, p: CglParams, st: &mut RunState) -> Result<Option<Vec<DelaySample>>, CliError> {
    let grid = spec.grid()?;
    let cfg = spec.run_config()?;
    let ramp = spec.ramp_spec();
    let model = CglModel::with_ramp(p, spec.source.clone(), ramp)?;
    let src = &spec.source;
    let qopts = CglQssOptions {
        method: QssMethod::Newton,
        diffusion: spec.analysis.qss_diffusion,
    };
    let q0 = cgl_qss_field(&grid, ramp.initial, &p, src, qopts, None)?;
    if spec.has(Analysis::Qss) {
        st.write("qss.csv", |w| write_qss_csv(w, &grid, q0.field.values()))?;
    }
    let init = match spec.initial {
        InitialSpec::Qss { perturbation } => Field::new(
            q0.field
                .values()
                .iter()
                .map(|a| a + Complex64::new(perturbation, 0.0))
                .collect(),
        )?,
        InitialSpec::Amplitude { re, im } => Field::constant(&grid, Complex64::new(re, im))?,
        InitialSpec::State { .. } => unreachable!("rejected by validation"),
    };

    let indices = spec.analysis_indices(&grid);
    let xs: Vec<f64> = indices.iter().map(|&j| grid.x(j)).collect();
    let x_max = spec.x_max() + 1e-9 * grid.half_length();
    let mut detector = if spec.has(Analysis::Onset) {
        Some(OnsetDetector::new(&grid, spec.threshold())?)
    } else {
        None
    };
    let early = spec.analysis.stop_after_escape && detector.is_some();

    let mut bin = if spec.output.trajectory_bin {
        Some(SnapshotWriter::<_, Complex64>::new(st.create("trajectory.bin")?, &grid)?)
    } else {
        None
    };
    let mut csv = if spec.output.trajectory_csv {
        Some(TrajectoryCsvWriter::<_, Complex64>::new(st.create("trajectory.csv")?, &grid)?)
    } else {
        None
    };

    let mut seed = q0.field.clone();
    let mut detecting = detector.is_some();
    let mut last: Option<Snapshot<Complex64>> = None;
    let mut last_stored = false;
    let mut observed = 0usize;
    let mut stopped_early = false;
    let mut failure: Option<CliError> = None;
    let keep = spec.output.keep_every;

    let outcome = integrate_with(&model, &cfg, &init, |snap| {
        let kept = observed % keep == 0;
        observed += 1;
        let mut observe = || -> Result<bool, CliError> {
            if kept {
                store(&mut bin, &mut csv, &snap)?;
            }
            let (true, Some(det)) = (detecting, detector.as_mut()) else {
                return Ok(false);
            };
            match cgl_qss_field(&grid, snap.ramp, &p, src, qopts, Some(&seed)) {
                Ok(q) => {
                    det.observe(snap.ramp, &snap.field, &q.field)?;
                    seed = q.field;
                }
                Err(e) => {
                    st.warn(format!("onset detection stopped at mu = {}: {e}", snap.ramp));
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
                .filter(|s| xs.iter().any(|x| (x - s.x).abs() <= 1e-9 * grid.half_length().max(1.0)))
                .collect(),
        }
    });
    if let Some(o) = &onset {
        st.write("onset.csv", |w| write_onset_csv(w, o))?;
        onset_summary(o, xs.len(), st);
    }

    if spec.has(Analysis::Buffer) {
        let mut curves = Vec::new();
        for &order in &spec.analysis.buffer_orders {
            let closed = order == BufferOrder::Leading && matches!(src, SourceProfile::Gaussian { .. });
            let c = if closed {
                buffer_curve_closed_form(&p, src, &xs)?
            } else {
                let modes = ModeSum::new(src, grid.half_length(), grid.n_points())?;
                buffer_curve_from_growth(&p, &modes, &xs, ramp.initial, order)?
            };
            curves.push(c);
        }
        let refs: Vec<_> = curves.iter().collect();
        st.write("buffer.csv", |w| write_buffer_csv(w, &refs))?;
    }

    let hopf = if spec.has(Analysis::Hopf) {
        let range = spec
            .analysis
            .hopf_range
            .map_or((ramp.initial, last.ramp), |[a, b]| (a, b));
        let locus = hopf_locus(&(&model, Linearization::Qss), &xs, range, spec.analysis.hopf_scan)?;
        st.write("hopf.csv", |w| write_hopf_csv(w, &locus))?;
        Some(locus)
    } else {
        None
    };

    let mut delay = None;
    if let (true, Some(o), Some(h)) = (spec.has(Analysis::Delay), &onset, &hopf) {
        let d = delay_measurement(o, h)?;
        st.write("delay.csv", |w| write_delay_csv(w, &d))?;
        delay = Some(d);
    }

    if spec.has(Analysis::Spectrum) {
        let s = cosine_spectrum(&last.field, &grid)?;
        st.write("spectrum.csv", |w| write_spectrum_csv(w, &s))?;
        st.metric("spectrum_total_energy", s.total_energy());
        if let SourceProfile::Gaussian { sigma, .. } = src {
            let k_max = (-MODE_FLOOR.ln() / sigma).sqrt();
            if let Some(w) = grid.resolution_warning(k_max) {
                st.warn(w);
            }
        }
    }
    Ok(delay)
}

fn store(
    bin: &mut Option<SnapshotWriter<BufWriter<File>, Complex64>>,
    csv: &mut Option<TrajectoryCsvWriter<BufWriter<File>, Complex64>>,
    s: &Snapshot<Complex64>,
) -> Result<(), CliError> {
    if let Some(w) = bin.as_mut() {
        w.push(s.t, s.ramp, &s.field)?;
    }
    if let Some(w) = csv.as_mut() {
        w.push(s.t, s.ramp, &s.field)?;
    }
    Ok(())
}
