use super::{QssField, QssMethod};
use crate::error::{invalid, Error, Result};
use crate::models::{LacState, LactotrophParams, SourceProfile};
use crate::spatial::{Field, Grid1D};

/// Voltage scan used to bracket QSS roots.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LacQssOptions {
    pub v_lo: f64,
    pub v_hi: f64,
    pub samples: usize,
}

impl Default for LacQssOptions {
    fn default() -> Self {
        Self {
            v_lo: -75.0,
            v_hi: 0.0,
            samples: 751,
        }
    }
}

/// Largest-voltage root of `drive = I_ss(V)` inside the scan window.
fn depolarized_root(p: &LactotrophParams, drive: f64, o: &LacQssOptions) -> Result<f64> {
    if p.g_ca == 0.0 && p.g_k == 0.0 && p.g_a == 0.0 && p.g_l == 0.0 {
        return Err(invalid("all conductances vanish; the current balance is degenerate"));
    }
    if !(o.v_hi > o.v_lo) || o.samples < 2 {
        return Err(invalid("QSS scan needs v_hi > v_lo and at least two samples"));
    }
    let f = |v: f64| drive - p.steady_current(v).0;
    let h = (o.v_hi - o.v_lo) / (o.samples - 1) as f64;
    let mut hi = o.v_hi;
    let mut f_hi = f(hi);
    if f_hi == 0.0 {
        return Ok(hi);
    }
    for k in (0..o.samples - 1).rev() {
        let lo = o.v_lo + k as f64 * h;
        let f_lo = f(lo);
        if f_lo == 0.0 {
            return Ok(lo);
        }
        if (f_lo > 0.0) != (f_hi > 0.0) {
            return Ok(refine(p, drive, lo, hi));
        }
        hi = lo;
        f_hi = f_lo;
    }
    Err(Error::NoQss(format!(
        "no current-balance root in [{}, {}] mV for drive {drive}",
        o.v_lo, o.v_hi
    )))
}

/// Safeguarded Newton inside a sign-change bracket; returns the iterate with the smallest residual.
fn refine(p: &LactotrophParams, drive: f64, mut lo: f64, mut hi: f64) -> f64 {
    let f = |v: f64| {
        let (i, di) = p.steady_current(v);
        (drive - i, -di)
    };
    let positive_lo = f(lo).0 > 0.0;
    let tol = 1e-14 * (1.0 + drive.abs());
    let mut v = 0.5 * (lo + hi);
    let mut best = (f64::INFINITY, v);
    for _ in 0..200 {
        let (fv, dfv) = f(v);
        if fv.abs() < best.0 {
            best = (fv.abs(), v);
        }
        if fv.abs() <= tol {
            break;
        }
        if (fv > 0.0) == positive_lo {
            lo = v;
        } else {
            hi = v;
        }
        if hi - lo <= 1e-13 * (1.0 + v.abs()) {
            break;
        }
        let newton = v - fv / dfv;
        v = if newton.is_finite() && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
    }
    best.1
}

/// Depolarized QSS `(V, n_inf(V), e_inf(V))` at baseline current `i` and position `x`.
pub fn lactotroph_qss(x: f64, i: f64, p: &LactotrophParams, s: &SourceProfile, o: &LacQssOptions) -> Result<LacState> {
    let drive = i + s.eval(x)?;
    Ok(p.steady_state_at(depolarized_root(p, drive, o)?))
}

pub fn lactotroph_qss_field(
    grid: &Grid1D,
    i: f64,
    p: &LactotrophParams,
    s: &SourceProfile,
    o: &LacQssOptions,
) -> Result<QssField<LacState>> {
    let values = grid
        .points()
        .iter()
        .map(|&x| lactotroph_qss(x, i, p, s, o))
        .collect::<Result<Vec<_>>>()?;
    Ok(QssField {
        ramp: i,
        method: QssMethod::Newton,
        field: Field::new(values)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_conductances_rejected() {
        let p = LactotrophParams {
            g_ca: 0.0,
            g_k: 0.0,
            g_a: 0.0,
            g_l: 0.0,
            ..Default::default()
        };
        let r = lactotroph_qss(0.0, 0.0, &p, &SourceProfile::constant(0.0), &LacQssOptions::default());
        assert!(matches!(r, Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn leak_only_is_linear() {
        let p = LactotrophParams {
            g_ca: 0.0,
            g_k: 0.0,
            g_a: 0.0,
            ..Default::default()
        };
        let s = SourceProfile::constant(1.0);
        let q = lactotroph_qss(0.0, 2.0, &p, &s, &LacQssOptions::default()).unwrap();
        assert!((q.v - (p.v_l + 3.0 / p.g_l)).abs() < 1e-10);
    }

    #[test]
    fn default_params_balance_currents() {
        let p = LactotrophParams::default();
        let s = SourceProfile::gaussian(1.0, 50.0).unwrap();
        let q = lactotroph_qss(3.0, 0.0, &p, &s, &LacQssOptions::default()).unwrap();
        let drive = s.eval(3.0).unwrap();
        let r = p.rhs(q, drive);
        assert!(r.v.abs() < 1e-10 && r.n == 0.0 && r.e == 0.0);
    }

    #[test]
    fn out_of_window_is_reported() {
        let p = LactotrophParams::default();
        let r = lactotroph_qss(0.0, 1e4, &p, &SourceProfile::constant(0.0), &LacQssOptions::default());
        assert!(matches!(r, Err(Error::NoQss(_))));
    }
}
