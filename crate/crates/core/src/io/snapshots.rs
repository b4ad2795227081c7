//! Binary snapshot files.
//!
//! Layout, all little-endian:
//!
//! ```text
//! magic        8 bytes   b"SLOWPASS"
//! version      u32       1
//! n_points     u64
//! components   u32
//! half_length  f64
//! records      repeated until EOF:
//!     t        f64
//!     ramp     f64
//!     values   n_points * components f64, point-major
//! ```

use std::io::{ErrorKind, Read, Write};

use crate::error::{Error, Result};
use crate::integrator::Snapshot;
use crate::spatial::{Field, Grid1D, PointState};

pub const SNAPSHOT_MAGIC: &[u8; 8] = b"SLOWPASS";
pub const SNAPSHOT_VERSION: u32 = 1;

/// Streaming writer; records are appended as they are produced.
pub struct SnapshotWriter<W: Write, P> {
    out: W,
    n: usize,
    _p: std::marker::PhantomData<P>,
}

impl<W: Write, P: PointState> SnapshotWriter<W, P> {
    pub fn new(mut out: W, grid: &Grid1D) -> Result<Self> {
        out.write_all(SNAPSHOT_MAGIC)?;
        out.write_all(&SNAPSHOT_VERSION.to_le_bytes())?;
        out.write_all(&(grid.n_points() as u64).to_le_bytes())?;
        out.write_all(&(P::COMPONENTS as u32).to_le_bytes())?;
        out.write_all(&grid.half_length().to_le_bytes())?;
        Ok(Self {
            out,
            n: grid.n_points(),
            _p: std::marker::PhantomData,
        })
    }

    pub fn push(&mut self, t: f64, ramp: f64, field: &Field<P>) -> Result<()> {
        if field.len() != self.n {
            return Err(Error::InvalidArgument(format!(
                "field has {} points, file header says {}",
                field.len(),
                self.n
            )));
        }
        let mut buf = Vec::with_capacity(8 * (2 + self.n * P::COMPONENTS));
        buf.extend_from_slice(&t.to_le_bytes());
        buf.extend_from_slice(&ramp.to_le_bytes());
        for v in field.to_components() {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        self.out.write_all(&buf)?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<W> {
        self.out.flush()?;
        Ok(self.out)
    }
}

pub fn write_snapshots<W: Write, P: PointState>(out: W, grid: &Grid1D, snapshots: &[Snapshot<P>]) -> Result<W> {
    let mut w = SnapshotWriter::new(out, grid)?;
    for s in snapshots {
        w.push(s.t, s.ramp, &s.field)?;
    }
    w.finish()
}

/// Contents of a snapshot file. `step` in each snapshot is the record index.
#[derive(Debug, Clone)]
pub struct StoredRun<P> {
    pub grid: Grid1D,
    pub snapshots: Vec<Snapshot<P>>,
}

fn read_exact_or_eof(r: &mut impl Read, buf: &mut [u8]) -> Result<bool> {
    let mut filled = 0;
    while filled < buf.len() {
        match r.read(&mut buf[filled..]) {
            Ok(0) if filled == 0 => return Ok(false),
            Ok(0) => return Err(Error::Format("truncated snapshot record".into())),
            Ok(k) => filled += k,
            Err(e) if e.kind() == ErrorKind::Interrupted => {}
            Err(e) => return Err(e.into()),
        }
    }
    Ok(true)
}

fn header_field<const K: usize>(r: &mut impl Read) -> Result<[u8; K]> {
    let mut b = [0u8; K];
    r.read_exact(&mut b).map_err(|e| match e.kind() {
        ErrorKind::UnexpectedEof => Error::Format("truncated snapshot header".into()),
        _ => e.into(),
    })?;
    Ok(b)
}

pub fn read_snapshots<R: Read, P: PointState>(mut r: R) -> Result<StoredRun<P>> {
    let magic: [u8; 8] = header_field(&mut r)?;
    if &magic != SNAPSHOT_MAGIC {
        return Err(Error::Format("not a snapshot file (bad magic)".into()));
    }
    let version = u32::from_le_bytes(header_field(&mut r)?);
    if version != SNAPSHOT_VERSION {
        return Err(Error::Format(format!("unsupported snapshot version {version}")));
    }
    let n = u64::from_le_bytes(header_field(&mut r)?) as usize;
    let comps = u32::from_le_bytes(header_field(&mut r)?) as usize;
    if comps != P::COMPONENTS {
        return Err(Error::Format(format!(
            "file stores {comps} components per point, expected {} ({:?})",
            P::COMPONENTS,
            P::KIND
        )));
    }
    let half_length = f64::from_le_bytes(header_field(&mut r)?);
    let grid = Grid1D::new(half_length, n).map_err(|e| Error::Format(format!("bad grid in header: {e}")))?;

    let mut buf = vec![0u8; 8 * (2 + n * comps)];
    let mut snapshots = Vec::new();
    while read_exact_or_eof(&mut r, &mut buf)? {
        let vals: Vec<f64> = buf
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
            .collect();
        let field = Field::from_components(&vals[2..])?;
        snapshots.push(Snapshot {
            step: snapshots.len(),
            t: vals[0],
            ramp: vals[1],
            field,
        });
    }
    Ok(StoredRun { grid, snapshots })
}
