//! Burst analyses on voltage time series: events, signatures, canard scan, front.

use std::collections::BTreeMap;

use slowpass::burst::{
    burst_signature, canard_transitions, classify_events, front_speed, maximal_canard_scan, BurstSignature,
    ClassifierParams, EventSequence, SpaceTimeSeries,
};
use slowpass::io::{write_canard_csv, write_events_csv, write_front_csv, write_signatures_csv};
use slowpass::Error;

use crate::artifacts::RunState;
use crate::config::{Analysis, AnalysisOptions};
use crate::error::CliError;

/// Accumulates `V` at selected grid points for snapshots inside a time window.
#[derive(Debug)]
pub struct SeriesCollector {
    window: (f64, f64),
    indices: Vec<usize>,
    pub data: SpaceTimeSeries,
}

impl SeriesCollector {
    pub fn new(window: (f64, f64), indices: Vec<usize>, xs: &[f64]) -> Self {
        let x = indices.iter().map(|&j| xs[j]).collect();
        let values = vec![Vec::new(); indices.len()];
        Self {
            window,
            indices,
            data: SpaceTimeSeries { t: Vec::new(), x, values },
        }
    }

    pub fn push(&mut self, t: f64, v: impl Fn(usize) -> f64) {
        if t < self.window.0 || t > self.window.1 {
            return;
        }
        self.data.t.push(t);
        for (k, &j) in self.indices.iter().enumerate() {
            self.data.values[k].push(v(j));
        }
    }
}

/// Runs the requested burst analyses and writes their tables.
pub fn burst_analyses(
    data: &SpaceTimeSeries,
    analyses: &[Analysis],
    opts: &AnalysisOptions,
    v_split: f64,
    st: &mut RunState,
) -> Result<(), CliError> {
    if data.t.len() < 2 {
        st.warn("burst analyses skipped: fewer than two samples in the window");
        return Ok(());
    }
    let params = ClassifierParams::new(v_split);
    st.metric("v_split", v_split);

    if analyses.contains(&Analysis::Signatures) {
        let mut events: Vec<(f64, EventSequence)> = Vec::new();
        let mut signatures: Vec<(f64, BurstSignature)> = Vec::new();
        let mut counts: BTreeMap<String, usize> = BTreeMap::new();
        for (x, v) in data.x.iter().zip(&data.values) {
            let ev = classify_events(&data.t, v, &params)?;
            match burst_signature(&ev) {
                Ok(s) => {
                    let key = if s.is_alternator() || s.periodicity == slowpass::burst::Periodicity::Steady {
                        s.label()
                    } else {
                        "aperiodic".to_string()
                    };
                    *counts.entry(key).or_default() += 1;
                    signatures.push((*x, s));
                }
                Err(Error::NotBursting(_)) => *counts.entry("not bursting".into()).or_default() += 1,
                Err(e) => return Err(e.into()),
            }
            events.push((*x, ev));
        }
        st.write("events.csv", |w| write_events_csv(w, &events))?;
        st.write("signatures.csv", |w| write_signatures_csv(w, &signatures))?;
        st.metric("signature_counts", counts);
    }

    if analyses.contains(&Analysis::CanardScan) {
        let hi = data.x.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let window = opts.canard_window.map_or((-hi, hi), |[a, b]| (a, b));
        let samples = maximal_canard_scan(data, window, opts.canard_ref, &params)?;
        st.write("canard.csv", |w| write_canard_csv(w, &samples))?;
        st.metric("canard_transitions", canard_transitions(&samples));
    }

    if analyses.contains(&Analysis::Front) {
        let label = opts.front_signature.clone().unwrap_or_default();
        let marker = |_x: f64, t: &[f64], v: &[f64]| {
            classify_events(t, v, &params)
                .ok()
                .and_then(|ev| burst_signature(&ev).ok())
                .is_some_and(|s| s.periodicity == slowpass::burst::Periodicity::Steady && s.label() == label)
        };
        match front_speed(data, opts.front_window, marker) {
            Ok(fit) => {
                st.write("front.csv", |w| write_front_csv(w, &fit))?;
                st.metric("front_speed", fit.speed);
            }
            Err(e @ (Error::NoFront(_) | Error::InvalidArgument(_))) => st.warn(format!("front: {e}")),
            Err(e) => return Err(e.into()),
        }
    }
    Ok(())
}
