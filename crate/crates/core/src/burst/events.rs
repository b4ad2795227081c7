use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum EventKind {
    Lao,
    Sao,
}

impl EventKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Lao => "LAO",
            Self::Sao => "SAO",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub t: f64,
    pub kind: EventKind,
    /// Peak minus preceding trough.
    pub amplitude: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct EventSequence {
    pub events: Vec<Event>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassifierParams {
    pub v_split: f64,
    /// Minimum peak-to-trough excursion of a counted extremum.
    pub amp_floor: f64,
    /// Minimum sample count between consecutive extrema.
    pub min_gap: usize,
}

impl ClassifierParams {
    pub fn new(v_split: f64) -> Self {
        Self {
            v_split,
            amp_floor: 0.5,
            min_gap: 10,
        }
    }
}

#[derive(Clone, Copy)]
enum Extremum {
    Max(usize),
    Min(usize),
}

/// Alternating extrema separated by at least `delta` in value.
fn extrema(v: &[f64], delta: f64) -> Vec<Extremum> {
    let mut out = Vec::new();
    if v.is_empty() {
        return out;
    }
    let (mut hi, mut lo) = (0usize, 0usize);
    // direction: None until the first excursion of size delta
    let mut rising: Option<bool> = None;
    for j in 1..v.len() {
        if v[j] > v[hi] {
            hi = j;
        }
        if v[j] < v[lo] {
            lo = j;
        }
        match rising {
            None => {
                // an extremum at the first sample is a boundary value, not a turning point
                if v[hi] - v[j] > delta {
                    if hi > 0 {
                        out.push(Extremum::Max(hi));
                    }
                    rising = Some(false);
                    lo = j;
                } else if v[j] - v[lo] > delta {
                    if lo > 0 {
                        out.push(Extremum::Min(lo));
                    }
                    rising = Some(true);
                    hi = j;
                }
            }
            Some(true) => {
                if v[hi] - v[j] > delta {
                    out.push(Extremum::Max(hi));
                    rising = Some(false);
                    lo = j;
                }
            }
            Some(false) => {
                if v[j] - v[lo] > delta {
                    out.push(Extremum::Min(lo));
                    rising = Some(true);
                    hi = j;
                }
            }
        }
    }
    out
}

/// Labels every peak that follows a recorded trough.
pub fn classify_events(t: &[f64], v: &[f64], params: &ClassifierParams) -> Result<EventSequence> {
    if t.len() != v.len() {
        return Err(invalid("time and value series differ in length"));
    }
    if !(params.amp_floor > 0.0) || !params.v_split.is_finite() {
        return Err(invalid("classifier needs a finite v_split and a positive amplitude floor"));
    }
    if t.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("sample times must increase strictly"));
    }
    let ext = extrema(v, params.amp_floor);
    let index = |e: &Extremum| match e {
        Extremum::Max(j) | Extremum::Min(j) => *j,
    };
    if let Some(w) = ext.windows(2).find(|w| index(&w[1]) - index(&w[0]) < params.min_gap) {
        return Err(Error::Resolution(format!(
            "extrema at t = {} and t = {} are fewer than {} samples apart",
            t[index(&w[0])],
            t[index(&w[1])],
            params.min_gap
        )));
    }
    let mut events = Vec::new();
    let mut trough: Option<usize> = None;
    for e in ext {
        match e {
            Extremum::Min(j) => trough = Some(j),
            Extremum::Max(j) => {
                if let Some(m) = trough {
                    let kind = if v[m] < params.v_split {
                        EventKind::Lao
                    } else {
                        EventKind::Sao
                    };
                    events.push(Event {
                        t: t[j],
                        kind,
                        amplitude: v[j] - v[m],
                    });
                }
            }
        }
    }
    Ok(EventSequence { events })
}
