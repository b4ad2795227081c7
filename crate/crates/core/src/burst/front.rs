use serde::{Deserialize, Serialize};

use super::SpaceTimeSeries;
use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontFit {
    /// Least-squares slope of the front position.
    pub speed: f64,
    /// `(window centre time, outermost |x| where the marker holds)`.
    pub positions: Vec<(f64, f64)>,
}

/// Tracks the outermost `|x|` where `marker(x, t, v)` holds over consecutive windows of
/// length `window`, and fits a straight line to it.
pub fn front_speed(
    data: &SpaceTimeSeries,
    window: f64,
    marker: impl Fn(f64, &[f64], &[f64]) -> bool,
) -> Result<FrontFit> {
    if !(window > 0.0) || data.t.len() < 2 {
        return Err(invalid("front tracking needs a positive window and at least two samples"));
    }
    let (t0, t1) = (data.t[0], data.t[data.t.len() - 1]);
    let n_windows = ((t1 - t0) / window).floor() as usize;
    let mut positions = Vec::new();
    for k in 0..n_windows {
        let (a, b) = (t0 + k as f64 * window, t0 + (k + 1) as f64 * window);
        let lo = data.t.partition_point(|&t| t < a);
        let hi = data.t.partition_point(|&t| t < b);
        let times = &data.t[lo..hi];
        let front = data
            .x
            .iter()
            .zip(&data.values)
            .filter(|(x, v)| marker(**x, times, &v[lo..hi]))
            .map(|(x, _)| x.abs())
            .fold(None, |m: Option<f64>, x| Some(m.map_or(x, |m| m.max(x))));
        if let Some(f) = front {
            positions.push((0.5 * (a + b), f));
        }
    }
    if positions.len() < 2 {
        return Err(Error::NoFront("marker holds in fewer than two windows".into()));
    }
    let dx = data
        .x
        .windows(2)
        .map(|w| (w[1] - w[0]).abs())
        .fold(f64::INFINITY, f64::min);
    if positions.windows(2).any(|w| w[1].1 < w[0].1 - 1.5 * dx) {
        return Err(Error::NoFront("front position is not monotone".into()));
    }
    let n = positions.len() as f64;
    let (mt, mx) = positions
        .iter()
        .fold((0.0, 0.0), |(a, b), (t, x)| (a + t / n, b + x / n));
    let (num, den) = positions.iter().fold((0.0, 0.0), |(num, den), (t, x)| {
        (num + (t - mt) * (x - mx), den + (t - mt) * (t - mt))
    });
    Ok(FrontFit {
        speed: num / den,
        positions,
    })
}
