use serde::{Deserialize, Serialize};

use super::{burst_signature, classify_events, ClassifierParams, EventKind, Periodicity, SpaceTimeSeries};
use crate::error::Result;

/// Mean SAO amplitude of odd and even cycles at one position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CanardSample {
    pub x: f64,
    pub a_odd: f64,
    pub a_even: f64,
    pub period2: bool,
}

/// Where the parity amplitudes meet and where one of them dies out, on one side of the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CanardTransition {
    pub crossing_x: f64,
    pub transition_x: f64,
}

/// Cycle parities are fixed by the LAO times at `x_ref`, so all positions share one labelling.
pub fn maximal_canard_scan(
    data: &SpaceTimeSeries,
    x_window: (f64, f64),
    x_ref: f64,
    params: &ClassifierParams,
) -> Result<Vec<CanardSample>> {
    let (lo, hi) = (x_window.0.min(x_window.1), x_window.0.max(x_window.1));
    let j_ref = nearest(&data.x, x_ref);
    let ref_ev = classify_events(&data.t, &data.values[j_ref], params)?;
    let ref_lao: Vec<f64> = ref_ev
        .events
        .iter()
        .filter(|e| e.kind == EventKind::Lao)
        .map(|e| e.t)
        .collect();
    if ref_lao.len() < 3 {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for (j, &x) in data.x.iter().enumerate() {
        if x < lo || x > hi {
            continue;
        }
        let ev = match classify_events(&data.t, &data.values[j], params) {
            Ok(ev) => ev,
            Err(_) => continue,
        };
        let period2 = matches!(burst_signature(&ev), Ok(s) if s.periodicity == Periodicity::Period2);
        // per cycle: (parity, largest SAO amplitude); the trailing cycle is dropped
        let mut sums = [0.0f64; 2];
        let mut counts = [0usize; 2];
        let mut current: Option<(usize, f64)> = None;
        for e in &ev.events {
            match e.kind {
                EventKind::Lao => {
                    if let Some((parity, amp)) = current {
                        sums[parity] += amp;
                        counts[parity] += 1;
                    }
                    current = Some((nearest(&ref_lao, e.t) % 2, 0.0));
                }
                EventKind::Sao => {
                    if let Some((_, amp)) = current.as_mut() {
                        *amp = amp.max(e.amplitude);
                    }
                }
            }
        }
        if counts[0] == 0 || counts[1] == 0 {
            continue;
        }
        out.push(CanardSample {
            x,
            a_odd: sums[1] / counts[1] as f64,
            a_even: sums[0] / counts[0] as f64,
            period2,
        });
    }
    Ok(out)
}

fn nearest(sorted: &[f64], v: f64) -> usize {
    let k = sorted.partition_point(|&s| s < v);
    if k == 0 {
        0
    } else if k == sorted.len() || (v - sorted[k - 1]) <= (sorted[k] - v) {
        k - 1
    } else {
        k
    }
}

/// Searches outward from the origin on each side separately.
///
/// The crossing is a position where the two amplitudes coincide to 5% of the window maximum;
/// the transition is the first position beyond it where one amplitude falls below that
/// tolerance while the other stays above. The outermost such crossing inward of the
/// transition is reported, refined by linear interpolation of the amplitude difference.
/// Requires a period-2 rhythm somewhere on that side.
pub fn canard_transitions(samples: &[CanardSample]) -> Vec<CanardTransition> {
    let max_amp = samples.iter().fold(0.0f64, |m, s| m.max(s.a_odd).max(s.a_even));
    if max_amp == 0.0 {
        return Vec::new();
    }
    let tol = 0.05 * max_amp;
    let mut out = Vec::new();
    for side in [1.0, -1.0] {
        let mut s: Vec<&CanardSample> = samples.iter().filter(|c| c.x * side >= 0.0).collect();
        s.sort_by(|a, b| a.x.abs().total_cmp(&b.x.abs()));
        if !s.iter().any(|c| c.period2) {
            continue;
        }
        let dead = |c: &CanardSample| c.a_odd.min(c.a_even) <= tol && c.a_odd.max(c.a_even) > tol;
        let diff = |c: &CanardSample| c.a_odd - c.a_even;
        let mut last_equal = None;
        let mut found = None;
        for (i, c) in s.iter().enumerate() {
            if diff(c).abs() <= tol {
                last_equal = Some(i);
            } else if dead(c) {
                if let Some(e) = last_equal {
                    found = Some((e, i));
                    break;
                }
            }
        }
        let Some((c_idx, t_idx)) = found else {
            continue;
        };
        let mut crossing_x = s[c_idx].x;
        // zero of the difference within the run of coinciding amplitudes
        let mut run_start = c_idx;
        while run_start > 0 && diff(s[run_start - 1]).abs() <= tol {
            run_start -= 1;
        }
        for i in run_start..=c_idx {
            let (a, b) = (diff(s[i]), diff(s[i + 1]));
            if a == 0.0 {
                crossing_x = s[i].x;
                break;
            }
            if a * b < 0.0 {
                crossing_x = s[i].x + (s[i + 1].x - s[i].x) * a / (a - b);
                break;
            }
        }
        out.push(CanardTransition {
            crossing_x,
            transition_x: s[t_idx].x,
        });
    }
    out
}
