use std::fmt;

use serde::{Deserialize, Serialize};

use super::{EventKind, EventSequence};
use crate::error::{Error, Result};

/// One burst: `lao` large oscillations followed by `sao` small ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BurstCycle {
    pub lao: usize,
    pub sao: usize,
}

impl fmt::Display for BurstCycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}", self.lao, self.sao)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Periodicity {
    Steady,
    Period2,
    Aperiodic,
}

impl Periodicity {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Steady => "steady",
            Self::Period2 => "period-2",
            Self::Aperiodic => "aperiodic",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BurstSignature {
    pub cycles: Vec<BurstCycle>,
    pub periodicity: Periodicity,
}

impl BurstSignature {
    /// `"1^1"`, `"1^1 1^0"` (larger SAO count first), or the first cycles for aperiodic rhythms.
    pub fn label(&self) -> String {
        match self.periodicity {
            Periodicity::Steady => self.cycles[0].to_string(),
            Periodicity::Period2 => {
                let (a, b) = (self.cycles[0], self.cycles[1]);
                let (first, second) = if a.sao >= b.sao { (a, b) } else { (b, a) };
                format!("{first} {second}")
            }
            Periodicity::Aperiodic => self
                .cycles
                .iter()
                .take(8)
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join(" "),
        }
    }

    pub fn is_alternator(&self) -> bool {
        self.periodicity == Periodicity::Period2
    }
}

/// Splits events into cycles opened by each LAO. Events before the first LAO and the
/// trailing, possibly incomplete, cycle are discarded.
pub fn burst_signature(ev: &EventSequence) -> Result<BurstSignature> {
    let laos: Vec<usize> = ev
        .events
        .iter()
        .enumerate()
        .filter(|(_, e)| e.kind == EventKind::Lao)
        .map(|(k, _)| k)
        .collect();
    if laos.is_empty() {
        return Err(Error::NotBursting("no large-amplitude oscillations".into()));
    }
    let cycles: Vec<BurstCycle> = laos
        .windows(2)
        .map(|w| BurstCycle {
            lao: 1,
            sao: w[1] - w[0] - 1,
        })
        .collect();
    if cycles.len() < 2 {
        return Err(Error::NotBursting(format!(
            "{} complete cycle(s); at least two are needed",
            cycles.len()
        )));
    }
    let s: Vec<usize> = cycles.iter().map(|c| c.sao).collect();
    let periodicity = if s.iter().all(|&v| v == s[0]) {
        Periodicity::Steady
    } else if s.windows(3).all(|w| w[0] == w[2]) {
        Periodicity::Period2
    } else {
        Periodicity::Aperiodic
    };
    Ok(BurstSignature { cycles, periodicity })
}
