use nalgebra::{Matrix2, Matrix3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{cgl_qss_newton, lactotroph_qss, LacQssOptions};
use crate::error::{invalid, Result};
use crate::models::{CglModel, CglParams, LactotrophModel};

/// Real 2x2 Jacobian of the pointwise CGL kinetics at `a`.
pub fn cgl_linearization(a: Complex64, mu: f64, p: &CglParams) -> Matrix2<f64> {
    let alpha = p.alpha();
    let c = p.z(mu) - 2.0 * alpha * a.norm_sqr();
    let e = -alpha * a * a;
    Matrix2::new(c.re + e.re, -c.im + e.im, c.im + e.im, c.re - e.re)
}

fn eig2(m: &Matrix2<f64>) -> (f64, f64) {
    let half_tr = 0.5 * m.trace();
    let disc = half_tr * half_tr - m.determinant();
    if disc >= 0.0 {
        (half_tr + disc.sqrt(), 0.0)
    } else {
        (half_tr, (-disc).sqrt())
    }
}

/// Pointwise stability problem along a ramp.
pub trait HopfProblem: Sync {
    /// Largest real part of the spectrum and the matching `|Im|`.
    fn leading_eigenvalue(&self, x: f64, ramp: f64) -> Result<(f64, f64)>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Linearization {
    Origin,
    Qss,
}

impl HopfProblem for (&CglModel, Linearization) {
    fn leading_eigenvalue(&self, x: f64, mu: f64) -> Result<(f64, f64)> {
        let (m, lin) = *self;
        let a = match lin {
            Linearization::Origin => Complex64::new(0.0, 0.0),
            Linearization::Qss => cgl_qss_newton(x, mu, &m.params, &m.source, None)?,
        };
        Ok(eig2(&cgl_linearization(a, mu, &m.params)))
    }
}

impl HopfProblem for LactotrophModel {
    fn leading_eigenvalue(&self, x: f64, i: f64) -> Result<(f64, f64)> {
        let q = lactotroph_qss(x, i, &self.params, &self.source, &LacQssOptions::default())?;
        let j = Matrix3::from_fn(|r, c| self.params.jacobian(q)[r][c]);
        let ev = j.complex_eigenvalues();
        let lead = ev
            .iter()
            .max_by(|a, b| a.re.total_cmp(&b.re))
            .expect("3x3 matrix has eigenvalues");
        Ok((lead.re, lead.im.abs()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HopfSample {
    pub x: f64,
    pub ramp: f64,
    pub omega: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct HopfLocus {
    pub samples: Vec<HopfSample>,
}

impl HopfLocus {
    /// Linear interpolation of the critical ramp value at `x`.
    pub fn ramp_at(&self, x: f64) -> Option<f64> {
        let s = &self.samples;
        if s.is_empty() {
            return None;
        }
        if s.len() == 1 {
            return (s[0].x == x).then_some(s[0].ramp);
        }
        let k = s.partition_point(|p| p.x < x);
        if k == 0 {
            return (s[0].x == x).then_some(s[0].ramp);
        }
        if k == s.len() {
            return None;
        }
        let (a, b) = (s[k - 1], s[k]);
        let w = (x - a.x) / (b.x - a.x);
        Some(a.ramp * (1.0 - w) + b.ramp * w)
    }
}

/// First loss of stability along `range` (traversed from `range.0` to `range.1`) at each `x`.
///
/// Crossings with a real leading eigenvalue are not Hopf points and are skipped.
pub fn hopf_locus<P: HopfProblem + ?Sized>(
    problem: &P,
    xs: &[f64],
    range: (f64, f64),
    n_scan: usize,
) -> Result<HopfLocus> {
    if n_scan < 2 || range.0 == range.1 {
        return Err(invalid("Hopf scan needs a non-empty range and at least two samples"));
    }
    let mut samples = Vec::new();
    for &x in xs {
        if let Some(s) = crossing(problem, x, range, n_scan)? {
            samples.push(s);
        }
    }
    samples.sort_by(|a, b| a.x.total_cmp(&b.x));
    Ok(HopfLocus { samples })
}

fn crossing<P: HopfProblem + ?Sized>(p: &P, x: f64, range: (f64, f64), n: usize) -> Result<Option<HopfSample>> {
    let at = |k: usize| range.0 + (range.1 - range.0) * k as f64 / n as f64;
    let mut prev = at(0);
    let mut prev_re = p.leading_eigenvalue(x, prev)?.0;
    for k in 1..=n {
        let r = at(k);
        let re = p.leading_eigenvalue(x, r)?.0;
        if prev_re < 0.0 && re >= 0.0 {
            let (mut a, mut b) = (prev, r);
            while (b - a).abs() > 1e-8 {
                let m = 0.5 * (a + b);
                if p.leading_eigenvalue(x, m)?.0 < 0.0 {
                    a = m;
                } else {
                    b = m;
                }
            }
            let ramp = 0.5 * (a + b);
            let omega = p.leading_eigenvalue(x, ramp)?.1;
            if omega > 1e-9 {
                return Ok(Some(HopfSample { x, ramp, omega }));
            }
        }
        prev = r;
        prev_re = re;
    }
    Ok(None)
}
