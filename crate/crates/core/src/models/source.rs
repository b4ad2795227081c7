use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceDerivatives {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
    pub d4: f64,
}

/// Applied current `I_app(x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SourceProfile {
    /// `a exp(-x^2 / (4 sigma))`
    Gaussian { amplitude: f64, sigma: f64 },
    Constant { amplitude: f64 },
    /// Piecewise linear through `(x, value)` pairs with increasing `x`.
    Tabulated { x: Vec<f64>, values: Vec<f64> },
}

impl SourceProfile {
    pub fn gaussian(amplitude: f64, sigma: f64) -> Result<Self> {
        let s = Self::Gaussian { amplitude, sigma };
        s.validate()?;
        Ok(s)
    }

    pub fn constant(amplitude: f64) -> Self {
        Self::Constant { amplitude }
    }

    pub fn tabulated(x: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let s = Self::Tabulated { x, values };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Gaussian { amplitude, sigma } => {
                if !amplitude.is_finite() || !(sigma.is_finite() && *sigma > 0.0) {
                    return Err(invalid(format!(
                        "gaussian source needs finite amplitude and sigma > 0, got a={amplitude}, sigma={sigma}"
                    )));
                }
            }
            Self::Constant { amplitude } => {
                if !amplitude.is_finite() {
                    return Err(invalid("constant source amplitude is not finite"));
                }
            }
            Self::Tabulated { x, values } => {
                if x.len() < 2 || x.len() != values.len() {
                    return Err(invalid("tabulated source needs at least two (x, value) pairs"));
                }
                if x.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(invalid("tabulated source abscissae must increase strictly"));
                }
                if x.iter().chain(values).any(|v| !v.is_finite()) {
                    return Err(invalid("tabulated source contains non-finite entries"));
                }
            }
        }
        Ok(())
    }

    pub fn amplitude(&self) -> f64 {
        match self {
            Self::Gaussian { amplitude, .. } | Self::Constant { amplitude } => *amplitude,
            Self::Tabulated { values, .. } => values.iter().fold(0.0, |m, v| m.max(v.abs())),
        }
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        match self {
            Self::Gaussian { amplitude, sigma } => Ok(amplitude * (-x * x / (4.0 * sigma)).exp()),
            Self::Constant { amplitude } => Ok(*amplitude),
            Self::Tabulated { x: xs, values } => {
                let (lo, hi) = (xs[0], xs[xs.len() - 1]);
                if !(lo..=hi).contains(&x) {
                    return Err(Error::OutOfRange(format!(
                        "x = {x} outside tabulated range [{lo}, {hi}]"
                    )));
                }
                let k = xs.partition_point(|&t| t <= x).clamp(1, xs.len() - 1);
                let w = (x - xs[k - 1]) / (xs[k] - xs[k - 1]);
                Ok(values[k - 1] * (1.0 - w) + values[k] * w)
            }
        }
    }

    /// `I_app''(x)`; centred differences on the table for tabulated sources.
    pub fn second_derivative(&self, x: f64) -> Result<f64> {
        match self {
            Self::Gaussian { sigma, .. } => {
                let g = self.eval(x)?;
                Ok(g * (x * x / (4.0 * sigma * sigma) - 1.0 / (2.0 * sigma)))
            }
            Self::Constant { .. } => Ok(0.0),
            Self::Tabulated { x: xs, .. } => {
                let h = xs.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
                let (lo, hi) = (xs[0], xs[xs.len() - 1]);
                let c = x.clamp(lo + h, hi - h);
                Ok((self.eval(c - h)? - 2.0 * self.eval(c)? + self.eval(c + h)?) / (h * h))
            }
        }
    }

    /// Value with first, second and fourth derivatives at `x`.
    pub fn derivatives(&self, x: f64) -> Result<SourceDerivatives> {
        match self {
            Self::Gaussian { sigma, .. } => {
                let g = self.eval(x)?;
                let s = *sigma;
                let x2 = x * x;
                Ok(SourceDerivatives {
                    value: g,
                    d1: -x / (2.0 * s) * g,
                    d2: g * (x2 / (4.0 * s * s) - 1.0 / (2.0 * s)),
                    d4: g * (x2 * x2 / (16.0 * s.powi(4)) - 3.0 * x2 / (4.0 * s.powi(3)) + 3.0 / (4.0 * s * s)),
                })
            }
            Self::Constant { amplitude } => Ok(SourceDerivatives {
                value: *amplitude,
                d1: 0.0,
                d2: 0.0,
                d4: 0.0,
            }),
            Self::Tabulated { x: xs, .. } => {
                let h = xs.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
                let (lo, hi) = (xs[0], xs[xs.len() - 1]);
                let c = x.clamp(lo + 2.0 * h, hi - 2.0 * h);
                let f = |k: f64| self.eval(c + k * h);
                let (m2, m1, z, p1, p2) = (f(-2.0)?, f(-1.0)?, f(0.0)?, f(1.0)?, f(2.0)?);
                Ok(SourceDerivatives {
                    value: self.eval(x)?,
                    d1: (p1 - m1) / (2.0 * h),
                    d2: (m1 - 2.0 * z + p1) / (h * h),
                    d4: (m2 - 4.0 * m1 + 6.0 * z - 4.0 * p1 + p2) / h.powi(4),
                })
            }
        }
    }

    /// Samples on a set of points.
    pub fn sample(&self, xs: &[f64]) -> Result<Vec<f64>> {
        xs.iter().map(|&x| self.eval(x)).collect()
    }

    pub fn is_homogeneous(&self) -> bool {
        matches!(self, Self::Constant { .. })
    }
}
