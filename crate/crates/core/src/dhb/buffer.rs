use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::models::{CglParams, SourceProfile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BufferOrder {
    Leading,
    K4Corrected,
}

impl BufferOrder {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Leading => "leading",
            Self::K4Corrected => "k4-corrected",
        }
    }
}

/// `mu` is NaN when no root was found; `valid` is false then.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BufferSample {
    pub x: f64,
    pub mu: f64,
    pub valid: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BufferCurve {
    pub order: BufferOrder,
    pub samples: Vec<BufferSample>,
}

impl BufferCurve {
    pub fn mu_at(&self, x: f64, tol: f64) -> Option<f64> {
        self.samples
            .iter()
            .find(|s| (s.x - x).abs() <= tol && s.mu.is_finite())
            .map(|s| s.mu)
    }
}

/// `Re((sigma + z D) / (z D)) >= 0`; always true without diffusion or without a width.
pub fn buffer_validity(mu: f64, p: &CglParams, s: &SourceProfile) -> bool {
    let sigma = match s {
        SourceProfile::Gaussian { sigma, .. } => *sigma,
        _ => return true,
    };
    let zd = p.z(mu) * p.d();
    if zd == Complex64::new(0.0, 0.0) {
        return true;
    }
    ((sigma + zd) / zd).re >= 0.0
}

/// Implicit buffer relation `mu^2 - w0^2 - eps x^2 (sigma + mu br - w0 bi) / (2 |sigma + z D|^2)`.
fn relation(mu: f64, x: f64, sigma: f64, p: &CglParams) -> f64 {
    let re = sigma + mu * p.beta_r - p.omega0 * p.beta_i;
    let im = mu * p.beta_i + p.omega0 * p.beta_r;
    let den = 2.0 * (re * re + im * im);
    mu * mu - p.omega0 * p.omega0 - p.eps * x * x * re / den
}

/// First root `mu >= w0` of the buffer relation within `[w0, w0 + 10]`.
fn solve_relation(x: f64, sigma: f64, p: &CglParams) -> Option<f64> {
    let (lo, hi) = (p.omega0, p.omega0 + 10.0);
    let f = |mu: f64| relation(mu, x, sigma, p);
    let f0 = f(lo);
    if f0 == 0.0 {
        return Some(lo);
    }
    if f0 > 0.0 {
        return None;
    }
    let n = 4000;
    let mut a = lo;
    for k in 1..=n {
        let b = lo + (hi - lo) * k as f64 / n as f64;
        if f(b) >= 0.0 {
            let (mut a, mut b) = (a, b);
            while b - a > 1e-12 {
                let m = 0.5 * (a + b);
                if f(m) < 0.0 {
                    a = m;
                } else {
                    b = m;
                }
            }
            return Some(0.5 * (a + b));
        }
        a = b;
    }
    None
}

pub fn buffer_curve_closed_form(p: &CglParams, s: &SourceProfile, xs: &[f64]) -> Result<BufferCurve> {
    p.validate()?;
    let sigma = match s {
        SourceProfile::Gaussian { sigma, .. } => *sigma,
        _ => return Err(invalid("closed-form buffer curve needs a gaussian source")),
    };
    let samples = xs
        .iter()
        .map(|&x| match solve_relation(x, sigma, p) {
            Some(mu) => BufferSample {
                x,
                mu,
                valid: buffer_validity(mu, p, s),
            },
            None => BufferSample {
                x,
                mu: f64::NAN,
                valid: false,
            },
        })
        .collect();
    Ok(BufferCurve {
        order: BufferOrder::Leading,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn no_diffusion() -> CglParams {
        CglParams {
            beta_r: 0.0,
            beta_i: 0.0,
            ..Default::default()
        }
    }

    #[test]
    fn centre_value_is_w0() {
        let s = SourceProfile::gaussian(1.0, 0.25).unwrap();
        let c = buffer_curve_closed_form(&CglParams::default(), &s, &[0.0]).unwrap();
        assert_eq!(c.samples[0].mu, 0.5);
    }

    #[test]
    fn no_diffusion_closed_form() {
        let s = SourceProfile::gaussian(1.0, 0.25).unwrap();
        let c = buffer_curve_closed_form(&no_diffusion(), &s, &[5.0, -5.0]).unwrap();
        for smp in c.samples {
            assert!((smp.mu - 0.75f64.sqrt()).abs() < 1e-10);
            assert!(smp.valid);
        }
    }

    #[test]
    fn validity_examples() {
        let s = SourceProfile::gaussian(1.0, 0.25).unwrap();
        assert!(buffer_validity(0.5, &CglParams::default(), &s));
        assert!(buffer_validity(3.0, &no_diffusion(), &s));
        // Re = 1 - sigma w0 bi / (bi^2 (mu^2 + w0^2)) flips at mu^2 + w0^2 = sigma w0 / bi
        let p = CglParams {
            beta_r: 0.0,
            beta_i: 0.1,
            ..Default::default()
        };
        assert!(!buffer_validity(0.99, &p, &s));
        assert!(buffer_validity(1.01, &p, &s));
    }

    #[test]
    fn needs_gaussian() {
        assert!(buffer_curve_closed_form(&CglParams::default(), &SourceProfile::constant(1.0), &[0.0]).is_err());
    }
}
