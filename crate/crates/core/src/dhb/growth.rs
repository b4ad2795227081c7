use num_complex::Complex64;

use super::{buffer_validity, BufferCurve, BufferOrder, BufferSample};
use crate::error::{invalid, Error, Result};
use crate::models::{CglParams, SourceProfile};
use crate::spatial::{cosine_coefficients, Grid1D};

/// Source expanded in the zero-flux cosine modes `cos(k_m (x + L))`, `k_m = m pi / 2L`.
#[derive(Debug, Clone)]
pub struct ModeSum {
    source: SourceProfile,
    grid: Grid1D,
    coefficients: Vec<f64>,
    peak_x: f64,
}

impl ModeSum {
    pub fn new(source: &SourceProfile, half_length: f64, n_points: usize) -> Result<Self> {
        source.validate()?;
        let grid = Grid1D::new(half_length, n_points)?;
        let xs = grid.points();
        let samples = source.sample(&xs)?;
        let coefficients = cosine_coefficients(&samples)?.into_iter().map(|c| c.re).collect();
        let peak_x = match source {
            SourceProfile::Gaussian { .. } | SourceProfile::Constant { .. } => 0.0,
            SourceProfile::Tabulated { .. } => {
                let j = (0..samples.len())
                    .max_by(|&a, &b| samples[a].abs().total_cmp(&samples[b].abs()))
                    .unwrap_or(0);
                xs[j]
            }
        };
        Ok(Self {
            source: source.clone(),
            grid,
            coefficients,
            peak_x,
        })
    }

    pub fn source(&self) -> &SourceProfile {
        &self.source
    }

    pub fn half_length(&self) -> f64 {
        self.grid.half_length()
    }

    /// Spatial profile of the inhomogeneous linear solution at `mu`, without the common
    /// `exp(z^2 / 2 eps)` factor.
    fn profile(&self, mu: f64, x: f64, mu0: f64, p: &CglParams, order: BufferOrder) -> Result<Complex64> {
        let l = self.grid.half_length();
        let z = p.z(mu);
        let d = p.d();
        let root = (2.0 * p.eps).sqrt();
        let mut sum = Complex64::new(0.0, 0.0);
        let mut magnitude = 0.0;
        let mut peak_term: f64 = 0.0;
        let n = self.coefficients.len();
        let tail_start = n - n / 20 - 1;
        let mut tail: f64 = 0.0;
        for (m, &c) in self.coefficients.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let k = self.grid.mode_wavenumber(m);
            let k2 = k * k;
            let mut exponent = -z * d * k2;
            let mut factor = 1.0;
            if order == BufferOrder::K4Corrected {
                exponent += 0.5 * p.eps * d * d * k2 * k2;
                let w = (mu - p.eps * p.beta_r * k2) / root;
                let w0 = (mu0 - p.eps * p.beta_r * k2) / root;
                factor = 0.5 * (libm::erf(w) - libm::erf(w0));
            }
            let term = c * factor * exponent.exp();
            let size = term.norm();
            if !size.is_finite() {
                return Err(Error::Resolution(format!(
                    "mode sum overflows at k = {k:.3} (mu = {mu}, x = {x})"
                )));
            }
            peak_term = peak_term.max(size);
            if m >= tail_start {
                tail = tail.max(size);
            }
            magnitude += size;
            sum += term * (k * (x + l)).cos();
        }
        if tail > 1e-8 * peak_term {
            return Err(Error::Resolution(format!(
                "mode sum not converged: tail weight {:.2e} of peak (mu = {mu}, x = {x})",
                tail / peak_term
            )));
        }
        if sum.norm() < 1e3 * f64::EPSILON * magnitude {
            return Err(Error::Resolution(format!(
                "mode sum lost to cancellation at mu = {mu}, x = {x}"
            )));
        }
        Ok(sum)
    }
}

/// Growth exponent of the inhomogeneous part of the linearised solution.
///
/// `E = (mu^2 - w0^2) / 2 + eps ln(|S(mu, x)| / |S_0(mu, x_peak)|)` where `S` is the mode sum of the
/// source weighted by the per-mode propagation factor and `S_0` the leading-order sum at the
/// source peak. Negative values decay, positive values grow.
pub fn inhom_growth_exponent(
    mu: f64,
    x: f64,
    mu0: f64,
    p: &CglParams,
    modes: &ModeSum,
    order: BufferOrder,
) -> Result<f64> {
    p.validate()?;
    let l = modes.half_length();
    if x.abs() > l {
        return Err(invalid(format!("x = {x} outside the mode domain [-{l}, {l}]")));
    }
    let s = modes.profile(mu, x, mu0, p, order)?;
    let reference = modes.profile(mu, modes.peak_x, mu0, p, BufferOrder::Leading)?;
    Ok(0.5 * (mu * mu - p.omega0 * p.omega0) + p.eps * (s.norm() / reference.norm()).ln())
}

/// Buffer curve as the first zero of the growth exponent for `mu` in `[0, w0 + 10]`.
pub fn buffer_curve_from_growth(
    p: &CglParams,
    modes: &ModeSum,
    xs: &[f64],
    mu0: f64,
    order: BufferOrder,
) -> Result<BufferCurve> {
    let step = 0.01;
    let n = ((p.omega0 + 10.0) / step).ceil() as usize;
    let samples = xs
        .iter()
        .map(|&x| {
            let f = |mu: f64| inhom_growth_exponent(mu, x, mu0, p, modes, order);
            let mut root = None;
            let mut a = 0.0;
            let mut fa = f(a).ok();
            for k in 1..=n {
                let b = k as f64 * step;
                let fb = f(b).ok();
                if let (Some(va), Some(vb)) = (fa, fb) {
                    if va < 0.0 && vb >= 0.0 {
                        let (mut lo, mut hi) = (a, b);
                        while hi - lo > 1e-10 {
                            let m = 0.5 * (lo + hi);
                            match f(m) {
                                Ok(v) if v < 0.0 => lo = m,
                                _ => hi = m,
                            }
                        }
                        root = Some(0.5 * (lo + hi));
                        break;
                    }
                }
                a = b;
                fa = fb;
            }
            match root {
                Some(mu) => BufferSample {
                    x,
                    mu,
                    valid: buffer_validity(mu, p, modes.source()),
                },
                None => BufferSample {
                    x,
                    mu: f64::NAN,
                    valid: false,
                },
            }
        })
        .collect();
    Ok(BufferCurve { order, samples })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn homogeneous_source_is_uniform() {
        let p = CglParams::default();
        let m = ModeSum::new(&SourceProfile::constant(1.0), 20.0, 401).unwrap();
        let at = |x: f64, mu: f64| inhom_growth_exponent(mu, x, -1.0, &p, &m, BufferOrder::Leading).unwrap();
        for x in [-19.0, 0.0, 3.0, 17.5] {
            assert!((at(x, 0.3) - at(0.0, 0.3)).abs() < 1e-10);
            assert!(at(x, 0.5).abs() < 1e-12);
        }
        assert!(at(2.0, 0.49) < 0.0 && at(2.0, 0.51) > 0.0);
    }

    #[test]
    fn no_diffusion_reduces_to_source_ratio() {
        let p = CglParams {
            beta_r: 0.0,
            ..Default::default()
        };
        let s = SourceProfile::gaussian(1.0, 0.25).unwrap();
        let m = ModeSum::new(&s, 20.0, 2001).unwrap();
        let e = inhom_growth_exponent(0.7, 2.0, -1.0, &p, &m, BufferOrder::Leading).unwrap();
        let expected = 0.5 * (0.49 - 0.25) - p.eps * 4.0 / (4.0 * 0.25);
        assert!((e - expected).abs() < 1e-9);
    }

    #[test]
    fn unresolved_sum_is_reported() {
        let p = CglParams {
            beta_r: 0.0,
            beta_i: 3.0,
            ..Default::default()
        };
        let m = ModeSum::new(&SourceProfile::gaussian(1.0, 0.25).unwrap(), 20.0, 801).unwrap();
        // exp((w0 bi - sigma) k^2) grows with k
        let r = inhom_growth_exponent(0.5, 0.0, -1.0, &p, &m, BufferOrder::Leading);
        assert!(matches!(r, Err(Error::Resolution(_))));
    }
}
