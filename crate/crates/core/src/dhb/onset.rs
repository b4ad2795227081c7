use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::integrator::Trajectory;
use crate::qss::QssField;
use crate::spatial::{Field, Grid1D, PointState};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OnsetSample {
    pub x: f64,
    pub ramp: f64,
}

/// Ramp value at which the solution first leaves the QSS, per grid point.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct OnsetCurve {
    pub threshold: f64,
    pub samples: Vec<OnsetSample>,
}

impl OnsetCurve {
    pub fn ramp_at(&self, x: f64, tol: f64) -> Option<f64> {
        self.samples.iter().find(|s| (s.x - x).abs() <= tol).map(|s| s.ramp)
    }
}

/// Streaming escape detector; feed it snapshots in time order.
#[derive(Debug, Clone)]
pub struct OnsetDetector {
    xs: Vec<f64>,
    threshold: f64,
    prev: Option<(f64, Vec<f64>)>,
    onset: Vec<Option<f64>>,
}

impl OnsetDetector {
    pub fn new(grid: &Grid1D, threshold: f64) -> Result<Self> {
        if !(threshold.is_finite() && threshold > 0.0) {
            return Err(invalid(format!("escape threshold must be positive, got {threshold}")));
        }
        Ok(Self {
            xs: grid.points(),
            threshold,
            prev: None,
            onset: vec![None; grid.n_points()],
        })
    }

    pub fn observe<P: PointState>(&mut self, ramp: f64, state: &Field<P>, qss: &Field<P>) -> Result<()> {
        if state.len() != self.xs.len() {
            return Err(invalid("snapshot and detector grids differ"));
        }
        let d = state.distance(qss)?;
        match &self.prev {
            None => {
                if let Some(j) = d.iter().position(|v| *v > self.threshold) {
                    return Err(Error::Precondition(format!(
                        "initial state is {:.3e} from the QSS at x = {} (threshold {:.3e})",
                        d[j], self.xs[j], self.threshold
                    )));
                }
            }
            Some((r0, d0)) => {
                for j in 0..d.len() {
                    if self.onset[j].is_none() && d[j] > self.threshold {
                        let w = (self.threshold - d0[j]) / (d[j] - d0[j]);
                        self.onset[j] = Some(r0 + w.clamp(0.0, 1.0) * (ramp - r0));
                    }
                }
            }
        }
        self.prev = Some((ramp, d));
        Ok(())
    }

    pub fn all_escaped(&self) -> bool {
        self.onset.iter().all(Option::is_some)
    }

    /// Whether every point with `pred(x)` has escaped.
    pub fn escaped_where(&self, pred: impl Fn(f64) -> bool) -> bool {
        self.xs
            .iter()
            .zip(&self.onset)
            .filter(|(x, _)| pred(**x))
            .all(|(_, o)| o.is_some())
    }

    pub fn finish(self) -> OnsetCurve {
        OnsetCurve {
            threshold: self.threshold,
            samples: self
                .xs
                .iter()
                .zip(self.onset)
                .filter_map(|(&x, o)| o.map(|ramp| OnsetSample { x, ramp }))
                .collect(),
        }
    }
}

/// `qss[k]` must be the QSS at the ramp value of snapshot `k`.
pub fn detect_onset<P: PointState>(traj: &Trajectory<P>, qss: &[QssField<P>], threshold: f64) -> Result<OnsetCurve> {
    if qss.len() != traj.len() {
        return Err(invalid(format!(
            "{} QSS fields for {} snapshots",
            qss.len(),
            traj.len()
        )));
    }
    let mut det = OnsetDetector::new(traj.grid(), threshold)?;
    for (s, q) in traj.snapshots.iter().zip(qss) {
        q.field.check_on(traj.grid())?;
        det.observe(s.ramp, &s.field, &q.field)?;
    }
    Ok(det.finish())
}
