use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{check_sorted, trial_groups, PhotonRecord};
use crate::error::{Error, Result};

/// Fair fiber beam splitter: each record independently goes to channel 0 or
/// 1 with probability 1/2. Deterministic in `rng_seed`.
pub fn hbt_split(records: &[PhotonRecord], rng_seed: u64) -> Vec<PhotonRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    records
        .iter()
        .map(|r| PhotonRecord { channel: u8::from(rng.random::<bool>()), ..*r })
        .collect()
}

/// Non-ideal detector knobs, off by default.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct DetectorConfig {
    /// Non-paralyzable dead time per channel, s.
    pub dead_time: f64,
    /// Dark count rate per channel, 1/s.
    pub dark_rate: f64,
}

impl DetectorConfig {
    pub fn is_ideal(&self) -> bool {
        self.dead_time == 0.0 && self.dark_rate == 0.0
    }
}

/// Add dark counts and apply dead time, per trial and channel. Input and
/// output are sorted by `(trial_id, t)`.
pub fn apply_detectors(
    records: &[PhotonRecord],
    det: &DetectorConfig,
    n_trials: u64,
    pulse_length: f64,
    rng_seed: u64,
) -> Result<Vec<PhotonRecord>> {
    check_sorted(records)?;
    if !(det.dead_time >= 0.0 && det.dark_rate >= 0.0) {
        return Err(Error::invalid("dead time and dark rate must be non-negative"));
    }
    if det.is_ideal() {
        return Ok(records.to_vec());
    }
    let groups = trial_groups(records);
    let mut gi = 0;
    let mut out = Vec::with_capacity(records.len());
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    for trial in 0..n_trials {
        let mut events: Vec<PhotonRecord> = Vec::new();
        if gi < groups.len() && records[groups[gi].0].trial_id == trial {
            events.extend_from_slice(&records[groups[gi].0..groups[gi].1]);
            gi += 1;
        }
        if det.dark_rate > 0.0 {
            for channel in 0..2u8 {
                let mut t = 0.0;
                loop {
                    t += -(1.0 - rng.random::<f64>()).ln() / det.dark_rate;
                    if t > pulse_length {
                        break;
                    }
                    events.push(PhotonRecord { trial_id: trial, t, channel });
                }
            }
            events.sort_by(|a, b| a.t.total_cmp(&b.t));
        }
        let mut last = [f64::NEG_INFINITY; 2];
        for e in events {
            let ch = usize::from(e.channel.min(1));
            if e.t - last[ch] >= det.dead_time {
                last[ch] = e.t;
                out.push(e);
            }
        }
    }
    Ok(out)
}
