//! CSV exports. Column names are fixed; plotting scripts key on them.
//!
//! | table      | columns                                   |
//! |------------|-------------------------------------------|
//! | trajectory | `t, mu, x, re, im` or `t, I, x, V, n, e`   |
//! | qss        | `x` followed by the state components      |
//! | onset      | `x, ramp`                                 |
//! | buffer     | `x, mu, valid, order`                     |
//! | delay      | `x, delay`                                |
//! | hopf       | `x, ramp, omega`                          |
//! | events     | `x, t, kind, amplitude`                   |
//! | signatures | `x, signature, periodicity`               |
//! | canard     | `x, a_odd, a_even`                        |
//! | front      | `t, x_front`                              |
//! | spectrum   | `index, k, energy`                        |
//!
//! Floats are written in shortest round-trip form, so identical inputs give identical bytes.

use std::io::Write;

use super::csv_error;
use crate::burst::{BurstSignature, CanardSample, EventSequence, FrontFit};
use crate::dhb::{BufferCurve, DelaySample, OnsetCurve};
use crate::error::Result;
use crate::integrator::Snapshot;
use crate::qss::HopfLocus;
use crate::spatial::{Field, FieldKind, Grid1D, PointState, Spectrum};

/// Shortest round-trip text; exponent form outside `[1e-5, 1e16)` so tiny values stay short.
pub fn num(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || !a.is_finite() || (1e-5..1e16).contains(&a) {
        v.to_string()
    } else {
        format!("{v:e}")
    }
}

fn writer<W: Write>(out: W, header: &[&str]) -> Result<csv::Writer<W>> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header).map_err(csv_error)?;
    Ok(w)
}

fn done<W: Write>(w: csv::Writer<W>) -> Result<W> {
    w.into_inner().map_err(|e| crate::error::Error::Io(e.into_error()))
}

/// Name of the ramp column for a state type.
pub fn ramp_column<P: PointState>() -> &'static str {
    match P::KIND {
        FieldKind::RealTriple => "I",
        _ => "mu",
    }
}

pub fn trajectory_header<P: PointState>() -> Vec<&'static str> {
    let mut h = vec!["t", ramp_column::<P>(), "x"];
    h.extend_from_slice(P::component_names());
    h
}

/// Streaming long-format writer: one row per (snapshot, grid point).
pub struct TrajectoryCsvWriter<W: Write, P> {
    w: csv::Writer<W>,
    xs: Vec<f64>,
    comps: Vec<f64>,
    _state: std::marker::PhantomData<P>,
}

impl<W: Write, P: PointState> TrajectoryCsvWriter<W, P> {
    pub fn new(out: W, grid: &Grid1D) -> Result<Self> {
        Ok(Self {
            w: writer(out, &trajectory_header::<P>())?,
            xs: grid.points(),
            comps: vec![0.0; P::COMPONENTS],
            _state: std::marker::PhantomData,
        })
    }

    pub fn push(&mut self, t: f64, ramp: f64, field: &Field<P>) -> Result<()> {
        if field.len() != self.xs.len() {
            return Err(crate::error::invalid("snapshot and writer grids differ"));
        }
        let mut row: Vec<String> = Vec::with_capacity(3 + P::COMPONENTS);
        for (x, p) in self.xs.iter().zip(field.values()) {
            p.write_components(&mut self.comps);
            row.clear();
            row.push(num(t));
            row.push(num(ramp));
            row.push(num(*x));
            row.extend(self.comps.iter().map(|&c| num(c)));
            self.w.write_record(&row).map_err(csv_error)?;
        }
        Ok(())
    }

    pub fn finish(self) -> Result<W> {
        done(self.w)
    }
}

pub fn write_trajectory_csv<W: Write, P: PointState>(out: W, grid: &Grid1D, snapshots: &[Snapshot<P>]) -> Result<W> {
    let mut w = TrajectoryCsvWriter::new(out, grid)?;
    for s in snapshots {
        w.push(s.t, s.ramp, &s.field)?;
    }
    w.finish()
}

pub fn write_qss_csv<W: Write, P: PointState>(out: W, grid: &Grid1D, values: &[P]) -> Result<W> {
    let mut header = vec!["x"];
    header.extend_from_slice(P::component_names());
    let mut w = writer(out, &header)?;
    let mut comps = vec![0.0; P::COMPONENTS];
    for (x, p) in grid.points().iter().zip(values) {
        p.write_components(&mut comps);
        let mut row = vec![num(*x)];
        row.extend(comps.iter().map(|&c| num(c)));
        w.write_record(&row).map_err(csv_error)?;
    }
    done(w)
}

pub fn write_onset_csv<W: Write>(out: W, onset: &OnsetCurve) -> Result<W> {
    let mut w = writer(out, &["x", "ramp"])?;
    for s in &onset.samples {
        w.write_record([num(s.x), num(s.ramp)]).map_err(csv_error)?;
    }
    done(w)
}

/// Invalid samples keep their row with `valid = false` and an empty `mu` when no value exists.
pub fn write_buffer_csv<W: Write>(out: W, curves: &[&BufferCurve]) -> Result<W> {
    let mut w = writer(out, &["x", "mu", "valid", "order"])?;
    for c in curves {
        for s in &c.samples {
            let mu = if s.mu.is_finite() { num(s.mu) } else { String::new() };
            w.write_record([num(s.x), mu, s.valid.to_string(), c.order.as_str().to_string()])
                .map_err(csv_error)?;
        }
    }
    done(w)
}

pub fn write_delay_csv<W: Write>(out: W, delay: &[DelaySample]) -> Result<W> {
    let mut w = writer(out, &["x", "delay"])?;
    for s in delay {
        w.write_record([num(s.x), num(s.delay)]).map_err(csv_error)?;
    }
    done(w)
}

pub fn write_hopf_csv<W: Write>(out: W, locus: &HopfLocus) -> Result<W> {
    let mut w = writer(out, &["x", "ramp", "omega"])?;
    for s in &locus.samples {
        w.write_record([num(s.x), num(s.ramp), num(s.omega)])
            .map_err(csv_error)?;
    }
    done(w)
}

pub fn write_events_csv<W: Write>(out: W, per_x: &[(f64, EventSequence)]) -> Result<W> {
    let mut w = writer(out, &["x", "t", "kind", "amplitude"])?;
    for (x, seq) in per_x {
        for e in &seq.events {
            w.write_record([num(*x), num(e.t), e.kind.as_str().to_string(), num(e.amplitude)])
                .map_err(csv_error)?;
        }
    }
    done(w)
}

pub fn write_signatures_csv<W: Write>(out: W, per_x: &[(f64, BurstSignature)]) -> Result<W> {
    let mut w = writer(out, &["x", "signature", "periodicity"])?;
    for (x, sig) in per_x {
        w.write_record([num(*x), sig.label(), sig.periodicity.as_str().to_string()])
            .map_err(csv_error)?;
    }
    done(w)
}

pub fn write_canard_csv<W: Write>(out: W, samples: &[CanardSample]) -> Result<W> {
    let mut w = writer(out, &["x", "a_odd", "a_even"])?;
    for s in samples {
        w.write_record([num(s.x), num(s.a_odd), num(s.a_even)])
            .map_err(csv_error)?;
    }
    done(w)
}

/// The fitted speed goes to the run manifest, not here.
pub fn write_front_csv<W: Write>(out: W, fit: &FrontFit) -> Result<W> {
    let mut w = writer(out, &["t", "x_front"])?;
    for (t, x) in &fit.positions {
        w.write_record([num(*t), num(*x)]).map_err(csv_error)?;
    }
    done(w)
}

pub fn write_spectrum_csv<W: Write>(out: W, spectrum: &Spectrum) -> Result<W> {
    let mut w = writer(out, &["index", "k", "energy"])?;
    for m in &spectrum.modes {
        w.write_record([m.index.to_string(), num(m.wavenumber), num(m.energy)])
            .map_err(csv_error)?;
    }
    done(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dhb::{BufferOrder, BufferSample, OnsetSample};
    use crate::models::LacState;
    use crate::spatial::Field;
    use num_complex::Complex64;

    fn text(b: Vec<u8>) -> String {
        String::from_utf8(b).unwrap()
    }

    #[test]
    fn trajectory_headers_by_model() {
        assert_eq!(trajectory_header::<Complex64>(), ["t", "mu", "x", "re", "im"]);
        assert_eq!(trajectory_header::<LacState>(), ["t", "I", "x", "V", "n", "e"]);
    }

    #[test]
    fn trajectory_rows_round_trip() {
        let g = Grid1D::new(1.0, 3).unwrap();
        let snaps = vec![Snapshot {
            step: 0,
            t: 0.5,
            ramp: -0.995,
            field: Field::from_fn(&g, |x| Complex64::new(x / 3.0, 0.1)).unwrap(),
        }];
        let s = text(write_trajectory_csv(Vec::new(), &g, &snaps).unwrap());
        let mut rd = csv::Reader::from_reader(s.as_bytes());
        let rows: Vec<Vec<f64>> = rd
            .records()
            .map(|r| r.unwrap().iter().map(|v| v.parse().unwrap()).collect())
            .collect();
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[0], vec![0.5, -0.995, -1.0, -1.0 / 3.0, 0.1]);
        assert_eq!(rows[2][2], 1.0);
    }

    #[test]
    fn buffer_invalid_rows_kept() {
        let c = BufferCurve {
            order: BufferOrder::Leading,
            samples: vec![
                BufferSample { x: 0.0, mu: 0.7, valid: true },
                BufferSample { x: 9.0, mu: f64::NAN, valid: false },
            ],
        };
        let s = text(write_buffer_csv(Vec::new(), &[&c]).unwrap());
        assert_eq!(s, "x,mu,valid,order\n0,0.7,true,leading\n9,,false,leading\n");
    }

    #[test]
    fn onset_exact_bytes() {
        let o = OnsetCurve {
            threshold: 0.1,
            samples: vec![OnsetSample { x: -1.5, ramp: 0.25 }],
        };
        assert_eq!(text(write_onset_csv(Vec::new(), &o).unwrap()), "x,ramp\n-1.5,0.25\n");
    }

    #[test]
    fn numbers_round_trip_and_stay_short() {
        for v in [0.0, -1.5, 0.25, 1e-5, 3.0e-178, -7.5e20, 123456.789] {
            assert_eq!(num(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(num(3.0e-178), "3e-178");
        assert_eq!(num(0.0), "0");
        assert_eq!(num(1e-5), "0.00001");
    }
}
