use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RampDirection {
    Increasing,
    Decreasing,
}

/// Slow parameter `p(t) = p0 +/- rate * t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RampSpec {
    pub initial: f64,
    pub rate: f64,
    pub direction: RampDirection,
}

impl RampSpec {
    pub fn increasing(initial: f64, rate: f64) -> Self {
        Self {
            initial,
            rate,
            direction: RampDirection::Increasing,
        }
    }

    pub fn decreasing(initial: f64, rate: f64) -> Self {
        Self {
            initial,
            rate,
            direction: RampDirection::Decreasing,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.initial.is_finite() || !self.rate.is_finite() || self.rate < 0.0 {
            return Err(invalid(format!(
                "ramp needs finite initial value and non-negative rate, got {self:?}"
            )));
        }
        Ok(())
    }

    fn signed_rate(&self) -> f64 {
        match self.direction {
            RampDirection::Increasing => self.rate,
            RampDirection::Decreasing => -self.rate,
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        self.initial + self.signed_rate() * t
    }

    /// Time at which the ramp reaches `target`, if it ever does.
    pub fn time_to(&self, target: f64) -> Option<f64> {
        let r = self.signed_rate();
        if r == 0.0 {
            return (target == self.initial).then_some(0.0);
        }
        let t = (target - self.initial) / r;
        (t >= 0.0).then_some(t)
    }

    /// Ramp value `a` is reached no later than `b`.
    pub fn precedes(&self, a: f64, b: f64) -> bool {
        match self.direction {
            RampDirection::Increasing => a <= b,
            RampDirection::Decreasing => a >= b,
        }
    }
}
