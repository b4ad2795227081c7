use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;

use super::{QssField, QssMethod};
use crate::error::{invalid, Error, Result};
use crate::models::{CglParams, SourceProfile};
use crate::spatial::{laplacian_into, Field, Grid1D};

const NEWTON_MAX_ITER: usize = 50;

fn z_checked(mu: f64, p: &CglParams) -> Result<Complex64> {
    if mu == 0.0 && p.omega0 == 0.0 {
        return Err(invalid("QSS undefined at mu = omega0 = 0"));
    }
    Ok(p.z(mu))
}

/// `-sqrt(eps) I / (mu + i w0)`
pub fn cgl_qss_leading(x: f64, mu: f64, p: &CglParams, s: &SourceProfile) -> Result<Complex64> {
    let z = z_checked(mu, p)?;
    Ok(-p.eps.sqrt() * s.eval(x)? / z)
}

struct Expansion {
    a: Complex64,
    a_mu: Complex64,
    a_xx: Complex64,
}

fn expansion(x: f64, mu: f64, p: &CglParams, s: &SourceProfile) -> Result<Expansion> {
    let z = z_checked(mu, p)?;
    let d = s.derivatives(x)?;
    let (i, i1, i2, i4) = (d.value, d.d1, d.d2, d.d4);
    let dd = p.d();
    let alpha = p.alpha();
    let m2 = mu * mu + p.omega0 * p.omega0;
    let z2 = z * z;
    let z3 = z2 * z;
    let q = 1.0 / (z2 * m2);
    let dq = -2.0 / (z3 * m2) - 2.0 * mu / (z2 * m2 * m2);

    let a1 = -i / z;
    let a1_mu = i / z2;
    let a1_xx = -i2 / z;

    let i3 = i * i * i;
    let a3 = i / z3 + dd * i2 / z2 - alpha * i3 * q;
    let a3_mu = -3.0 * i / (z3 * z) - 2.0 * dd * i2 / z3 - alpha * i3 * dq;
    let a3_xx = i2 / z3 + dd * i4 / z2 - alpha * q * (6.0 * i * i1 * i1 + 3.0 * i * i * i2);

    let se = p.eps.sqrt();
    let se3 = p.eps * se;
    Ok(Expansion {
        a: a1 * se + a3 * se3,
        a_mu: a1_mu * se + a3_mu * se3,
        a_xx: a1_xx * se + a3_xx * se3,
    })
}

/// Two-term expansion of the QSS in powers of `sqrt(eps)` (terms of order `eps^{1/2}` and `eps^{3/2}`).
pub fn cgl_qss_asymptotic(x: f64, mu: f64, p: &CglParams, s: &SourceProfile) -> Result<Complex64> {
    Ok(expansion(x, mu, p, s)?.a)
}

/// Residual of the two-term expansion in the full equation
/// `z A + eps D A_xx + sqrt(eps) I - alpha |A|^2 A - eps A_mu`.
pub fn cgl_asymptotic_residual(x: f64, mu: f64, p: &CglParams, s: &SourceProfile) -> Result<Complex64> {
    let e = expansion(x, mu, p, s)?;
    let forcing = p.eps.sqrt() * s.eval(x)?;
    Ok(p.z(mu) * e.a + p.eps * p.d() * e.a_xx + forcing - p.alpha() * e.a.norm_sqr() * e.a - p.eps * e.a_mu)
}

/// Real 2x2 form of `d -> c d + e conj(d)`.
fn real_block(c: Complex64, e: Complex64) -> Matrix2<f64> {
    Matrix2::new(c.re + e.re, -c.im + e.im, c.im + e.im, c.re - e.re)
}

fn pointwise_residual(a: Complex64, z: Complex64, alpha: Complex64, forcing: f64) -> Complex64 {
    z * a + forcing - alpha * a.norm_sqr() * a
}

fn newton_from(a0: Complex64, z: Complex64, alpha: Complex64, forcing: f64) -> Option<Complex64> {
    let mut a = a0;
    let mut r = pointwise_residual(a, z, alpha, forcing);
    let scale = forcing.abs().max(1e-300);
    for _ in 0..NEWTON_MAX_ITER {
        if r.norm() <= 1e-14 * scale.max(1.0) || r.norm() == 0.0 {
            return Some(a);
        }
        let j = real_block(z - 2.0 * alpha * a.norm_sqr(), -alpha * a * a);
        let step = j.lu().solve(&Vector2::new(-r.re, -r.im))?;
        let step = Complex64::new(step[0], step[1]);
        let mut lambda = 1.0;
        loop {
            let trial = a + step * lambda;
            let rt = pointwise_residual(trial, z, alpha, forcing);
            if rt.norm() < r.norm() || lambda < 1e-3 {
                a = trial;
                r = rt;
                break;
            }
            lambda *= 0.5;
        }
    }
    (r.norm() <= 1e-12 * scale.max(1.0)).then_some(a)
}

/// Root of `z A + sqrt(eps) I - alpha |A|^2 A` near `seed`, or near the asymptotic / cube-root
/// estimates when no seed is given.
pub fn cgl_qss_newton(x: f64, mu: f64, p: &CglParams, s: &SourceProfile, seed: Option<Complex64>) -> Result<Complex64> {
    let z = z_checked(mu, p)?;
    let alpha = p.alpha();
    let forcing = p.eps.sqrt() * s.eval(x)?;
    if forcing == 0.0 && seed.is_none() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let mut seeds = Vec::with_capacity(3);
    seeds.extend(seed);
    seeds.push(cgl_qss_asymptotic(x, mu, p, s)?);
    seeds.push((Complex64::new(forcing, 0.0) / alpha).cbrt());
    seeds
        .into_iter()
        .find_map(|a0| newton_from(a0, z, alpha, forcing))
        .ok_or_else(|| Error::NoQss(format!("Newton did not converge at x = {x}, mu = {mu}")))
}

pub fn cgl_qss(x: f64, mu: f64, p: &CglParams, s: &SourceProfile, method: QssMethod) -> Result<Complex64> {
    match method {
        QssMethod::Asymptotic => cgl_qss_asymptotic(x, mu, p, s),
        QssMethod::Newton => cgl_qss_newton(x, mu, p, s, None),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CglQssOptions {
    pub method: QssMethod,
    /// Include `eps D A_xx` in the Newton system.
    pub diffusion: bool,
}

impl Default for CglQssOptions {
    fn default() -> Self {
        Self {
            method: QssMethod::Newton,
            diffusion: true,
        }
    }
}

/// QSS on every grid point. A `seed` (typically the QSS at a nearby ramp value) is used
/// as the Newton starting guess.
pub fn cgl_qss_field(
    grid: &Grid1D,
    mu: f64,
    p: &CglParams,
    s: &SourceProfile,
    opts: CglQssOptions,
    seed: Option<&Field<Complex64>>,
) -> Result<QssField<Complex64>> {
    let xs = grid.points();
    if let Some(f) = seed {
        f.check_on(grid)?;
    }
    let values: Vec<Complex64> = match (opts.method, opts.diffusion) {
        (QssMethod::Asymptotic, _) => xs.iter().map(|&x| cgl_qss_asymptotic(x, mu, p, s)).collect::<Result<_>>()?,
        (QssMethod::Newton, false) => xs
            .iter()
            .enumerate()
            .map(|(j, &x)| cgl_qss_newton(x, mu, p, s, seed.map(|f| f.get(j))))
            .collect::<Result<_>>()?,
        (QssMethod::Newton, true) => {
            let start = match seed {
                Some(f) => f.values().to_vec(),
                None => xs
                    .iter()
                    .map(|&x| cgl_qss_newton(x, mu, p, s, None))
                    .collect::<Result<_>>()?,
            };
            field_newton(grid, mu, p, s, start)?
        }
    };
    Ok(QssField {
        ramp: mu,
        method: opts.method,
        field: Field::new(values)?,
    })
}

fn field_residual(u: &[Complex64], forcing: &[f64], grid: &Grid1D, z: Complex64, p: &CglParams, lap: &mut [Complex64]) -> Vec<Complex64> {
    laplacian_into(u, grid.dx(), lap);
    let ed = p.d() * p.eps;
    let alpha = p.alpha();
    u.iter()
        .zip(forcing)
        .zip(lap.iter())
        .map(|((a, f), l)| pointwise_residual(*a, z, alpha, *f) + ed * l)
        .collect()
}

fn max_norm(r: &[Complex64]) -> f64 {
    r.iter().fold(0.0, |m, v| m.max(v.norm()))
}

/// Newton on the discretised steady problem, solved with block-tridiagonal elimination.
fn field_newton(grid: &Grid1D, mu: f64, p: &CglParams, s: &SourceProfile, mut u: Vec<Complex64>) -> Result<Vec<Complex64>> {
    let n = grid.n_points();
    let z = z_checked(mu, p)?;
    let alpha = p.alpha();
    let forcing: Vec<f64> = grid
        .points()
        .iter()
        .map(|&x| s.eval(x).map(|v| v * p.eps.sqrt()))
        .collect::<Result<_>>()?;
    let scale = forcing.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let c = p.d() * (p.eps / (grid.dx() * grid.dx()));
    let off = real_block(c, Complex64::new(0.0, 0.0));
    let mut lap = vec![Complex64::new(0.0, 0.0); n];
    let mut r = field_residual(&u, &forcing, grid, z, p, &mut lap);

    let mut cprime = vec![Matrix2::zeros(); n];
    let mut g = vec![Vector2::zeros(); n];
    for _ in 0..NEWTON_MAX_ITER {
        let rn = max_norm(&r);
        if rn <= 1e-13 * scale {
            return Ok(u);
        }
        // forward elimination
        for j in 0..n {
            let diag = real_block(z - 2.0 * alpha * u[j].norm_sqr() - 2.0 * c, -alpha * u[j] * u[j]);
            let lower = if j == n - 1 { off * 2.0 } else { off };
            let upper = if j == 0 { off * 2.0 } else { off };
            let rhs = Vector2::new(-r[j].re, -r[j].im);
            let (sm, rhs) = if j == 0 {
                (diag, rhs)
            } else {
                (diag - lower * cprime[j - 1], rhs - lower * g[j - 1])
            };
            let inv = sm
                .try_inverse()
                .ok_or_else(|| Error::NoQss(format!("singular QSS Jacobian at mu = {mu}")))?;
            cprime[j] = inv * upper;
            g[j] = inv * rhs;
        }
        for j in (0..n - 1).rev() {
            g[j] = g[j] - cprime[j] * g[j + 1];
        }
        let mut lambda = 1.0;
        loop {
            let trial: Vec<Complex64> = u
                .iter()
                .zip(&g)
                .map(|(a, d)| a + Complex64::new(d[0], d[1]) * lambda)
                .collect();
            let rt = field_residual(&trial, &forcing, grid, z, p, &mut lap);
            if max_norm(&rt) < rn || lambda < 1e-3 {
                u = trial;
                r = rt;
                break;
            }
            lambda *= 0.5;
        }
    }
    if max_norm(&r) <= 1e-10 * scale {
        return Ok(u);
    }
    Err(Error::NoQss(format!("field Newton did not converge at mu = {mu}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gauss(a: f64) -> SourceProfile {
        SourceProfile::gaussian(a, 0.25).unwrap()
    }

    #[test]
    fn unforced_origin() {
        let p = CglParams::default();
        let s = SourceProfile::constant(0.0);
        for m in [QssMethod::Asymptotic, QssMethod::Newton] {
            assert_eq!(cgl_qss(0.3, -0.5, &p, &s, m).unwrap(), Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn leading_term_example() {
        let a = cgl_qss_leading(0.0, -1.0, &CglParams::default(), &gauss(1.0)).unwrap();
        assert!((a - Complex64::new(0.08, 0.04)).norm() < 1e-15);
    }

    #[test]
    fn degenerate_frequency_rejected() {
        let p = CglParams { omega0: 0.0, ..Default::default() };
        assert!(cgl_qss_leading(0.0, 0.0, &p, &gauss(1.0)).is_err());
    }

    #[test]
    fn large_source_newton() {
        let p = CglParams::default();
        let s = gauss(100.0);
        let a = cgl_qss_newton(0.0, 0.3, &p, &s, None).unwrap();
        let r = pointwise_residual(a, p.z(0.3), p.alpha(), p.eps.sqrt() * 100.0);
        assert!(r.norm() < 1e-10);
        let lead = cgl_qss_leading(0.0, 0.3, &p, &s).unwrap();
        assert!((a - lead).norm() > 0.5);
    }

    #[test]
    fn newton_agrees_with_expansion_for_unit_source() {
        let p = CglParams::default();
        let s = gauss(1.0);
        for x in [0.0, 0.4, 1.0] {
            let n = cgl_qss_newton(x, -1.0, &p, &s, None).unwrap();
            let a = cgl_qss_asymptotic(x, -1.0, &p, &s).unwrap();
            assert!((n - a).norm() < 5.0 * p.eps.powf(1.5));
        }
    }

    #[test]
    fn field_newton_solves_discrete_problem() {
        let g = Grid1D::new(5.0, 201).unwrap();
        let p = CglParams { beta_r: 3.0, beta_i: 1.0, ..Default::default() };
        let s = gauss(1.0);
        let q = cgl_qss_field(&g, -0.4, &p, &s, CglQssOptions::default(), None).unwrap();
        let forcing: Vec<f64> = g.points().iter().map(|&x| p.eps.sqrt() * s.eval(x).unwrap()).collect();
        let mut lap = vec![Complex64::new(0.0, 0.0); g.n_points()];
        let r = field_residual(q.field.values(), &forcing, &g, p.z(-0.4), &p, &mut lap);
        assert!(max_norm(&r) < 1e-12);
    }
}
