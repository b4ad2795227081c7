//! Persistence: CSV tables with fixed column names and a compact binary snapshot format.

mod snapshots;
mod tables;

pub use snapshots::{read_snapshots, write_snapshots, SnapshotWriter, StoredRun, SNAPSHOT_MAGIC, SNAPSHOT_VERSION};
pub use tables::*;

use crate::error::Error;

pub(crate) fn csv_error(e: csv::Error) -> Error {
    if e.is_io_error() {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::Io(io),
            other => Error::Format(format!("{other:?}")),
        }
    } else {
        Error::Format(e.to_string())
    }
}
