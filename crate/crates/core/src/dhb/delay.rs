use serde::{Deserialize, Serialize};

use super::OnsetCurve;
use crate::error::{invalid, Result};
use crate::qss::HopfLocus;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DelaySample {
    pub x: f64,
    pub delay: f64,
}

/// `|ramp_onset(x) - ramp_HB(x)|` at the onset positions covered by the Hopf locus.
pub fn delay_measurement(onset: &OnsetCurve, hopf: &HopfLocus) -> Result<Vec<DelaySample>> {
    let out: Vec<DelaySample> = onset
        .samples
        .iter()
        .filter_map(|s| {
            hopf.ramp_at(s.x).map(|h| DelaySample {
                x: s.x,
                delay: (s.ramp - h).abs(),
            })
        })
        .collect();
    if out.is_empty() && !onset.samples.is_empty() {
        return Err(invalid("onset and Hopf samples share no x range"));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dhb::OnsetSample;
    use crate::qss::HopfSample;

    fn hopf(xs: &[f64], r: f64) -> HopfLocus {
        HopfLocus {
            samples: xs.iter().map(|&x| HopfSample { x, ramp: r, omega: 1.0 }).collect(),
        }
    }

    #[test]
    fn identical_curves_have_no_delay() {
        let o = OnsetCurve {
            threshold: 0.1,
            samples: vec![OnsetSample { x: 0.0, ramp: 2.0 }, OnsetSample { x: 0.5, ramp: 2.0 }],
        };
        let d = delay_measurement(&o, &hopf(&[0.0, 1.0], 2.0)).unwrap();
        assert_eq!(d.len(), 2);
        assert!(d.iter().all(|s| s.delay == 0.0));
    }

    #[test]
    fn disjoint_ranges_rejected() {
        let o = OnsetCurve {
            threshold: 0.1,
            samples: vec![OnsetSample { x: 5.0, ramp: 2.0 }],
        };
        assert!(delay_measurement(&o, &hopf(&[0.0, 1.0], 1.0)).is_err());
    }
}
