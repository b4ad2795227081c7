use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{RampSpec, ReactionModel, SourceProfile};
use crate::error::{invalid, Result};

/// Constants of `A_t = (mu + i w0) A + eps D A_xx + sqrt(eps) I_app - alpha |A|^2 A`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CglParams {
    pub eps: f64,
    pub omega0: f64,
    pub alpha_i: f64,
    pub beta_r: f64,
    pub beta_i: f64,
}

impl Default for CglParams {
    fn default() -> Self {
        Self {
            eps: 0.01,
            omega0: 0.5,
            alpha_i: 0.6,
            beta_r: 1.0,
            beta_i: 0.0,
        }
    }
}

impl CglParams {
    pub fn validate(&self) -> Result<()> {
        let all = [self.eps, self.omega0, self.alpha_i, self.beta_r, self.beta_i];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(invalid("CGL parameters must be finite"));
        }
        if self.eps <= 0.0 {
            return Err(invalid(format!("eps must be positive, got {}", self.eps)));
        }
        if self.beta_r < 0.0 {
            return Err(invalid(format!("beta_r must be non-negative, got {}", self.beta_r)));
        }
        Ok(())
    }

    /// `alpha = 1 + i alpha_i`
    pub fn alpha(&self) -> Complex64 {
        Complex64::new(1.0, self.alpha_i)
    }

    /// `D = beta_r + i beta_i`
    pub fn d(&self) -> Complex64 {
        Complex64::new(self.beta_r, self.beta_i)
    }

    /// `mu + i w0`
    pub fn z(&self, mu: f64) -> Complex64 {
        Complex64::new(mu, self.omega0)
    }

    /// Pointwise rate without the diffusion term.
    pub fn rhs(&self, a: Complex64, mu: f64, source: f64) -> Complex64 {
        self.z(mu) * a + self.eps.sqrt() * source - self.alpha() * a.norm_sqr() * a
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CglModel {
    pub params: CglParams,
    pub source: SourceProfile,
    pub ramp: RampSpec,
}

impl CglModel {
    /// Model with `mu(t) = mu0 + eps t`.
    pub fn new(params: CglParams, source: SourceProfile, mu0: f64) -> Result<Self> {
        Self::with_ramp(params, source, RampSpec::increasing(mu0, params.eps))
    }

    pub fn with_ramp(params: CglParams, source: SourceProfile, ramp: RampSpec) -> Result<Self> {
        params.validate()?;
        source.validate()?;
        ramp.validate()?;
        Ok(Self {
            params,
            source,
            ramp,
        })
    }
}

impl ReactionModel for CglModel {
    type State = Complex64;

    fn ramp(&self) -> &RampSpec {
        &self.ramp
    }

    fn source(&self) -> &SourceProfile {
        &self.source
    }

    fn diffusivity(&self) -> Complex64 {
        self.params.d() * self.params.eps
    }

    fn rate(&self, u: Complex64, ramp: f64, source: f64) -> Complex64 {
        self.params.rhs(u, ramp, source)
    }
}
