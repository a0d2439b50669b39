//! Photon-counting experiments on simulated quantum-jump trajectories.
//!
//! A trial is one probe pulse: the atom starts in the ground state, evolves
//! under the no-jump Hamiltonian, and is reset to the ground state at each
//! spontaneous emission. Emissions are thinned by the detection efficiency,
//! split over two detectors and histogrammed pairwise within each trial.

mod detect;
mod histogram;
mod timetag;
mod trajectory;

pub use detect::{apply_detectors, hbt_split, DetectorConfig};
pub use histogram::{correlate, CorrelationHistogram};
pub use timetag::{read_timetag, write_timetag, TimetagHeader};
pub use trajectory::{simulate_stream, NoJumpEvolution};

use serde::{Deserialize, Serialize};

use crate::dynamics::AtomParams;
use crate::error::{Error, Result};
use crate::units;

/// One detected photon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhotonRecord {
    pub trial_id: u64,
    /// Detection time within the pulse, s.
    pub t: f64,
    pub channel: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub params: AtomParams,
    /// Probe pulse length, s.
    pub pulse_length: f64,
    pub n_trials: u64,
    pub detection_efficiency: f64,
    pub rng_seed: u64,
}

impl SimConfig {
    /// Reference pulse length and detection efficiency.
    pub fn new(params: AtomParams, n_trials: u64, rng_seed: u64) -> Self {
        SimConfig {
            params,
            pulse_length: units::PROBE_PULSE_S,
            n_trials,
            detection_efficiency: units::DETECTION_EFFICIENCY,
            rng_seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if !(self.pulse_length > 0.0 && self.pulse_length.is_finite()) {
            return Err(Error::invalid("pulse length must be positive and finite"));
        }
        if self.n_trials == 0 {
            return Err(Error::invalid("n_trials must be >= 1"));
        }
        if !(self.detection_efficiency > 0.0 && self.detection_efficiency <= 1.0) {
            return Err(Error::invalid("detection efficiency must lie in (0, 1]"));
        }
        Ok(())
    }
}

/// Check that records are ordered by `(trial_id, t)`.
pub(crate) fn check_sorted(records: &[PhotonRecord]) -> Result<()> {
    for (i, w) in records.windows(2).enumerate() {
        let ordered = w[0].trial_id < w[1].trial_id
            || (w[0].trial_id == w[1].trial_id && w[0].t <= w[1].t);
        if !ordered {
            return Err(Error::Unsorted(i + 1));
        }
    }
    Ok(())
}

/// Index ranges of consecutive records sharing a trial id.
pub(crate) fn trial_groups(records: &[PhotonRecord]) -> Vec<(usize, usize)> {
    let mut groups = Vec::new();
    let mut start = 0;
    for i in 1..=records.len() {
        if i == records.len() || records[i].trial_id != records[start].trial_id {
            if i > start {
                groups.push((start, i));
            }
            start = i;
        }
    }
    groups
}
