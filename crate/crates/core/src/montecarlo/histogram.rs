use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_sorted, trial_groups, PhotonRecord};
use crate::error::{Error, Result};

/// Start-stop coincidence histogram between channel 0 (start) and channel 1
/// (stop), with bins centered on multiples of `bin_width`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationHistogram {
    pub bin_width: f64,
    /// Lower edge of the first bin, s.
    pub tau_min: f64,
    /// Upper edge of the last bin, s.
    pub tau_max: f64,
    pub counts: Vec<u64>,
    /// Expected counts per bin for uncorrelated photons without the
    /// finite-pulse overlap: `n_trials · r₀ · r₁ · T · bin_width`.
    pub norm: f64,
    pub n_trials: u64,
    pub pulse_length: f64,
    pub channel_counts: [u64; 2],
}

impl CorrelationHistogram {
    pub fn bin_centers(&self) -> Vec<f64> {
        (0..self.counts.len())
            .map(|i| self.tau_min + (i as f64 + 0.5) * self.bin_width)
            .collect()
    }

    /// Index of the bin centered on τ = 0.
    pub fn zero_bin(&self) -> usize {
        self.counts.len() / 2
    }

    /// Counts divided by `norm`; estimates `g²(τ)·(1 − |τ|/T)`.
    pub fn normalized(&self) -> Result<Vec<f64>> {
        if !(self.norm > 0.0) {
            return Err(Error::UndefinedModel("a channel recorded no photons".into()));
        }
        Ok(self.counts.iter().map(|&c| c as f64 / self.norm).collect())
    }

    /// Poisson standard errors of [`normalized`](Self::normalized); empty bins
    /// get the one-count error.
    pub fn normalized_errors(&self) -> Result<Vec<f64>> {
        if !(self.norm > 0.0) {
            return Err(Error::UndefinedModel("a channel recorded no photons".into()));
        }
        Ok(self.counts.iter().map(|&c| (c.max(1) as f64).sqrt() / self.norm).collect())
    }

    pub fn total_pairs(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// Histogram all cross-channel delays `t₁ − t₀` within each trial.
///
/// `records` must be sorted by `(trial_id, t)`. Trials are reduced in
/// parallel; integer counts make the result independent of scheduling.
pub fn correlate(
    records: &[PhotonRecord],
    bin_width: f64,
    tau_max: f64,
    n_trials: u64,
    pulse_length: f64,
) -> Result<CorrelationHistogram> {
    if !(bin_width > 0.0 && bin_width.is_finite()) {
        return Err(Error::invalid("bin width must be positive"));
    }
    if !(tau_max >= 0.0 && tau_max.is_finite()) {
        return Err(Error::invalid("tau_max must be non-negative"));
    }
    if !(pulse_length > 0.0) || n_trials == 0 {
        return Err(Error::invalid("pulse length and trial count must be positive"));
    }
    check_sorted(records)?;
    if let Some(r) = records.last() {
        if r.trial_id >= n_trials {
            return Err(Error::invalid(format!("trial id {} exceeds n_trials = {n_trials}", r.trial_id)));
        }
    }

    let half = (tau_max / bin_width).round() as usize;
    let n_bins = 2 * half + 1;
    let lo = -(half as f64 + 0.5) * bin_width;
    let hi = (half as f64 + 0.5) * bin_width;

    let groups = trial_groups(records);
    let counts = groups
        .par_iter()
        .fold(
            || vec![0u64; n_bins],
            |mut hist, &(a, b)| {
                let trial = &records[a..b];
                let stops: Vec<f64> = trial.iter().filter(|r| r.channel == 1).map(|r| r.t).collect();
                let mut first = 0;
                for start in trial.iter().filter(|r| r.channel == 0) {
                    while first < stops.len() && stops[first] - start.t < lo {
                        first += 1;
                    }
                    for &stop in &stops[first..] {
                        let tau = stop - start.t;
                        if tau >= hi {
                            break;
                        }
                        let idx = ((tau - lo) / bin_width).floor() as usize;
                        if idx < n_bins {
                            hist[idx] += 1;
                        }
                    }
                }
                hist
            },
        )
        .reduce(
            || vec![0u64; n_bins],
            |mut x, y| {
                for (a, b) in x.iter_mut().zip(y) {
                    *a += b;
                }
                x
            },
        );

    let n0 = records.iter().filter(|r| r.channel == 0).count() as u64;
    let n1 = records.iter().filter(|r| r.channel == 1).count() as u64;
    // r_c = n_c / (n_trials·T)  ⇒  n_trials·r₀·r₁·T·bw = n₀·n₁·bw / (n_trials·T)
    let norm = n0 as f64 * n1 as f64 * bin_width / (n_trials as f64 * pulse_length);
    Ok(CorrelationHistogram {
        bin_width,
        tau_min: lo,
        tau_max: hi,
        counts,
        norm,
        n_trials,
        pulse_length,
        channel_counts: [n0, n1],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(trial: u64, t: f64, channel: u8) -> PhotonRecord {
        PhotonRecord { trial_id: trial, t, channel }
    }

    #[test]
    fn single_photon_trials_have_no_coincidences() {
        let recs: Vec<_> = (0..100).map(|i| rec(i, 1e-7, (i % 2) as u8)).collect();
        let h = correlate(&recs, 1e-9, 1e-7, 100, 2e-6).unwrap();
        assert_eq!(h.total_pairs(), 0);
        assert!(h.norm > 0.0);
    }

    #[test]
    fn no_cross_trial_pairs_and_both_signs() {
        let recs = vec![
            rec(0, 10e-9, 0),
            rec(0, 13e-9, 1),
            rec(1, 20e-9, 1),
            rec(1, 25e-9, 0),
            rec(2, 0.0, 0),
        ];
        let h = correlate(&recs, 1e-9, 10e-9, 3, 2e-6).unwrap();
        assert_eq!(h.counts.len(), 21);
        assert_eq!(h.total_pairs(), 2);
        let centers = h.bin_centers();
        let hit: Vec<f64> = h
            .counts
            .iter()
            .zip(&centers)
            .filter(|(c, _)| **c > 0)
            .map(|(_, t)| (t * 1e9).round())
            .collect();
        assert_eq!(hit, vec![-5.0, 3.0]);
        assert!((centers[h.zero_bin()]).abs() < 1e-20);
    }

    #[test]
    fn unsorted_input_is_rejected() {
        let recs = vec![rec(1, 0.0, 0), rec(0, 0.0, 1)];
        assert!(matches!(correlate(&recs, 1e-9, 1e-8, 2, 2e-6), Err(Error::Unsorted(1))));
        let recs = vec![rec(0, 2e-9, 0), rec(0, 1e-9, 1)];
        assert!(matches!(correlate(&recs, 1e-9, 1e-8, 2, 2e-6), Err(Error::Unsorted(1))));
    }

    #[test]
    fn empty_channel_has_no_normalization() {
        let recs = vec![rec(0, 0.0, 0)];
        let h = correlate(&recs, 1e-9, 1e-8, 1, 2e-6).unwrap();
        assert!(h.normalized().is_err());
    }
}
