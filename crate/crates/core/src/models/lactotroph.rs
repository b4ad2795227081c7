use serde::{Deserialize, Serialize};

use super::{RampSpec, ReactionModel, SourceProfile};
use crate::error::{invalid, Result};
use crate::spatial::{Diffusing, FieldKind, PointState};

/// Boltzmann activation `1 / (1 + exp((v - V) / s))`.
pub fn boltzmann(v_half: f64, slope: f64, v: f64) -> f64 {
    1.0 / (1.0 + ((v_half - v) / slope).exp())
}

fn boltzmann_slope(b: f64, slope: f64) -> f64 {
    b * (1.0 - b) / slope
}

/// Membrane and channel constants. Units: pF, nS, mV, ms; `d` in length^2 pF / ms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LactotrophParams {
    pub c_m: f64,
    pub g_ca: f64,
    pub g_k: f64,
    pub g_a: f64,
    pub g_l: f64,
    pub v_ca: f64,
    pub v_k: f64,
    pub v_l: f64,
    pub tau_n: f64,
    pub tau_e: f64,
    pub v_m: f64,
    pub s_m: f64,
    pub v_n: f64,
    pub s_n: f64,
    pub v_a: f64,
    pub s_a: f64,
    pub v_e: f64,
    pub s_e: f64,
    pub d: f64,
}

impl Default for LactotrophParams {
    fn default() -> Self {
        Self {
            c_m: 2.0,
            g_ca: 1.4,
            g_k: 6.15,
            g_a: 5.0,
            g_l: 0.3,
            v_ca: 50.0,
            v_k: -75.0,
            v_l: -50.0,
            tau_n: 30.0,
            tau_e: 20.0,
            v_m: -20.0,
            s_m: 12.0,
            v_n: -5.0,
            s_n: 10.0,
            v_a: -20.0,
            s_a: 10.0,
            v_e: -60.0,
            s_e: 10.0,
            d: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GatingSteady {
    pub m: f64,
    pub n: f64,
    pub a: f64,
    pub e: f64,
}

impl LactotrophParams {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            self.c_m, self.g_ca, self.g_k, self.g_a, self.g_l, self.v_ca, self.v_k, self.v_l,
            self.tau_n, self.tau_e, self.v_m, self.s_m, self.v_n, self.s_n, self.v_a, self.s_a,
            self.v_e, self.s_e, self.d,
        ];
        if fields.iter().any(|v| !v.is_finite()) {
            return Err(invalid("lactotroph parameters must be finite"));
        }
        if self.c_m <= 0.0 || self.tau_n <= 0.0 || self.tau_e <= 0.0 {
            return Err(invalid("c_m, tau_n and tau_e must be positive"));
        }
        if [self.g_ca, self.g_k, self.g_a, self.g_l].iter().any(|g| *g < 0.0) {
            return Err(invalid("conductances must be non-negative"));
        }
        if self.d < 0.0 {
            return Err(invalid("diffusivity must be non-negative"));
        }
        if [self.s_m, self.s_n, self.s_a, self.s_e].iter().any(|s| *s == 0.0) {
            return Err(invalid("Boltzmann slopes must be non-zero"));
        }
        Ok(())
    }

    pub fn gating_steady(&self, v: f64) -> GatingSteady {
        GatingSteady {
            m: boltzmann(self.v_m, self.s_m, v),
            n: boltzmann(self.v_n, self.s_n, v),
            a: boltzmann(self.v_a, self.s_a, v),
            e: 1.0 - boltzmann(self.v_e, self.s_e, v),
        }
    }

    /// Sum of ionic currents `I_Ca + I_K + I_A + I_L`.
    pub fn ionic_current(&self, s: LacState) -> f64 {
        let m = boltzmann(self.v_m, self.s_m, s.v);
        let a = boltzmann(self.v_a, self.s_a, s.v);
        self.g_ca * m * (s.v - self.v_ca)
            + self.g_k * s.n * (s.v - self.v_k)
            + self.g_a * a * s.e * (s.v - self.v_k)
            + self.g_l * (s.v - self.v_l)
    }

    /// Pointwise rates; `drive` is `I + I_app(x)`.
    pub fn rhs(&self, s: LacState, drive: f64) -> LacState {
        let g = self.gating_steady(s.v);
        LacState {
            v: (drive - self.ionic_current(s)) / self.c_m,
            n: (g.n - s.n) / self.tau_n,
            e: (g.e - s.e) / self.tau_e,
        }
    }

    /// Steady-state current `I_ss(V)` with gates at equilibrium, and its derivative.
    pub fn steady_current(&self, v: f64) -> (f64, f64) {
        let g = self.gating_steady(v);
        let dm = boltzmann_slope(g.m, self.s_m);
        let dn = boltzmann_slope(g.n, self.s_n);
        let da = boltzmann_slope(g.a, self.s_a);
        let de = -boltzmann_slope(1.0 - g.e, self.s_e);
        let (dca, dk) = (v - self.v_ca, v - self.v_k);
        let i = self.g_ca * g.m * dca
            + self.g_k * g.n * dk
            + self.g_a * g.a * g.e * dk
            + self.g_l * (v - self.v_l);
        let di = self.g_ca * (dm * dca + g.m)
            + self.g_k * (dn * dk + g.n)
            + self.g_a * ((da * g.e + g.a * de) * dk + g.a * g.e)
            + self.g_l;
        (i, di)
    }

    /// Jacobian of [`Self::rhs`] with respect to `(V, n, e)`.
    pub fn jacobian(&self, s: LacState) -> [[f64; 3]; 3] {
        let m = boltzmann(self.v_m, self.s_m, s.v);
        let a = boltzmann(self.v_a, self.s_a, s.v);
        let ninf = boltzmann(self.v_n, self.s_n, s.v);
        let einf_c = boltzmann(self.v_e, self.s_e, s.v);
        let dk = s.v - self.v_k;
        let di_dv = self.g_ca * (boltzmann_slope(m, self.s_m) * (s.v - self.v_ca) + m)
            + self.g_k * s.n
            + self.g_a * s.e * (boltzmann_slope(a, self.s_a) * dk + a)
            + self.g_l;
        [
            [
                -di_dv / self.c_m,
                -self.g_k * dk / self.c_m,
                -self.g_a * a * dk / self.c_m,
            ],
            [boltzmann_slope(ninf, self.s_n) / self.tau_n, -1.0 / self.tau_n, 0.0],
            [-boltzmann_slope(einf_c, self.s_e) / self.tau_e, 0.0, -1.0 / self.tau_e],
        ]
    }

    pub fn steady_state_at(&self, v: f64) -> LacState {
        let g = self.gating_steady(v);
        LacState { v, n: g.n, e: g.e }
    }
}

/// Voltage and gating variables at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LacState {
    pub v: f64,
    pub n: f64,
    pub e: f64,
}

impl PointState for LacState {
    const KIND: FieldKind = FieldKind::RealTriple;
    const COMPONENTS: usize = 3;

    fn component_names() -> &'static [&'static str] {
        &["V", "n", "e"]
    }
    fn zero() -> Self {
        Self { v: 0.0, n: 0.0, e: 0.0 }
    }
    fn axpy(self, a: f64, o: Self) -> Self {
        Self {
            v: self.v + a * o.v,
            n: self.n + a * o.n,
            e: self.e + a * o.e,
        }
    }
    fn norm(self) -> f64 {
        (self.v * self.v + self.n * self.n + self.e * self.e).sqrt()
    }
    fn write_components(&self, out: &mut [f64]) {
        out[0] = self.v;
        out[1] = self.n;
        out[2] = self.e;
    }
    fn from_components(c: &[f64]) -> Self {
        Self { v: c[0], n: c[1], e: c[2] }
    }
    fn is_finite(self) -> bool {
        self.v.is_finite() && self.n.is_finite() && self.e.is_finite()
    }
}

impl Diffusing for LacState {
    type Scalar = f64;
    fn diffusing(&self) -> f64 {
        self.v
    }
    fn set_diffusing(&mut self, v: f64) {
        self.v = v;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LactotrophModel {
    pub params: LactotrophParams,
    pub source: SourceProfile,
    pub ramp: RampSpec,
}

impl LactotrophModel {
    /// Model with baseline current `I(t) = i0 - rate t`.
    pub fn new(params: LactotrophParams, source: SourceProfile, i0: f64, rate: f64) -> Result<Self> {
        params.validate()?;
        source.validate()?;
        let ramp = RampSpec::decreasing(i0, rate);
        ramp.validate()?;
        Ok(Self {
            params,
            source,
            ramp,
        })
    }
}

impl ReactionModel for LactotrophModel {
    type State = LacState;

    fn ramp(&self) -> &RampSpec {
        &self.ramp
    }

    fn source(&self) -> &SourceProfile {
        &self.source
    }

    fn diffusivity(&self) -> f64 {
        self.params.d / self.params.c_m
    }

    fn rate(&self, u: LacState, ramp: f64, source: f64) -> LacState {
        self.params.rhs(u, ramp + source)
    }
}
