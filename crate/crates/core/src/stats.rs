//! Classical statistics for photon-chain sessions: the chain-length law,
//! absorption-count distributions, Monte Carlo operation windows, and
//! efficiency-stacked detection rates.
//!
//! A session is one operation window of `cycle_time` seconds holding
//! `cycle_time / tau` photon slots. The first cycle always entangles (the
//! register is prepared exactly bright); every later cycle passes its
//! filter with probability 1/2, and the first dark outcome ends the chain.

use std::collections::BTreeMap;
use std::f64::consts::{LN_2, PI};

use rand::{Rng, RngExt};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Session timing, repetition count, and per-photon detection efficiencies.
#[derive(Debug, Clone, PartialEq)]
pub struct RateConfig {
    /// Photon spacing in seconds.
    pub tau: f64,
    /// Operation window in seconds; the slot count is `cycle_time / tau`
    /// rounded to the nearest integer.
    pub cycle_time: f64,
    /// Monte Carlo windows to simulate.
    pub repetitions: u64,
    /// Fraction of emission in the zero-phonon line.
    pub zpl_fraction: f64,
    /// Probability that an emitted photon enters the collection optics.
    pub collection_eff: f64,
    /// Probability that a collected photon registers a click.
    pub detector_eff: f64,
    /// Whether the trailing disentangling photon also has to be detected.
    /// Off by default: the nuclear readout, not that photon's click,
    /// finalizes the chain.
    pub include_final_photon: bool,
}

impl Default for RateConfig {
    fn default() -> Self {
        RateConfig {
            tau: 1e-6,
            cycle_time: 1e-4,
            repetitions: 1000,
            zpl_fraction: 1.0,
            collection_eff: 1.0,
            detector_eff: 1.0,
            include_final_photon: false,
        }
    }
}

impl RateConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, p) in [
            ("zpl_fraction", self.zpl_fraction),
            ("collection_eff", self.collection_eff),
            ("detector_eff", self.detector_eff),
        ] {
            if !(0.0..=1.0).contains(&p) || !p.is_finite() {
                return Err(Error::InvalidConfig(format!(
                    "{name} must lie in [0, 1], got {p}"
                )));
            }
        }
        if !(self.tau.is_finite() && self.tau > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "tau must be positive, got {}",
                self.tau
            )));
        }
        if !(self.cycle_time.is_finite() && self.cycle_time >= self.tau) {
            return Err(Error::InvalidConfig(format!(
                "cycle_time must be at least tau, got {}",
                self.cycle_time
            )));
        }
        if self.repetitions < 1 {
            return Err(Error::InvalidConfig(
                "repetitions must be at least 1".into(),
            ));
        }
        Ok(())
    }

    /// Photon slots per window.
    pub fn window_slots(&self) -> u32 {
        (self.cycle_time / self.tau).round() as u32
    }
}

/// Occurrence counts of chain lengths over a batch of windows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainHistogram {
    /// chain length -> number of windows that ended at that length
    pub counts: BTreeMap<u32, u64>,
    pub repetitions: u64,
}

impl ChainHistogram {
    /// Windows whose chain reached at least `m` photons.
    pub fn count_at_least(&self, m: u32) -> u64 {
        self.counts
            .range(m..)
            .map(|(_, c)| *c)
            .sum()
    }

    /// Empirical estimate of the chain law P(length >= m).
    pub fn empirical_p_at_least(&self, m: u32) -> f64 {
        self.count_at_least(m) as f64 / self.repetitions as f64
    }

    /// CSV with header `length,count`, lengths ascending.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("length,count\n");
        for (len, c) in &self.counts {
            out.push_str(&format!("{len},{c}\n"));
        }
        out
    }
}

/// Probability that a chain reaches at least `m` photons: 2^(1-m).
///
/// The exponent is m-1, not m, because the first photon costs nothing: the
/// prepared register is exactly bright, so only the m-1 later filters flip
/// coins. This is what puts ~62 events of length >= 5 in 1000 windows.
pub fn p_chain(m: u32) -> Result<f64> {
    if m < 1 {
        return Err(Error::InvalidConfig(
            "chain length must be at least 1".into(),
        ));
    }
    Ok(0.5f64.powi(m as i32 - 1))
}

/// Exact probability of `absorbed` resonant absorptions in `cycles`
/// half-half attempts: C(cycles, absorbed) * 2^(-cycles).
pub fn absorption_count_exact(cycles: u32, absorbed: u32) -> Result<f64> {
    if absorbed > cycles {
        return Err(Error::IndexOutOfRange {
            index: absorbed as usize,
            dim: cycles as usize + 1,
        });
    }
    let n = cycles as f64;
    let k = absorbed as f64;
    let log_p = ln_gamma(n + 1.0) - ln_gamma(k + 1.0) - ln_gamma(n - k + 1.0) - n * LN_2;
    Ok(log_p.exp())
}

/// Gaussian form (2/sqrt(pi N)) exp(-2 (N-n)^2 / N), evaluated verbatim.
///
/// Kept as printed for side-by-side comparison: its amplitude is twice the
/// de Moivre-Laplace value and it is centered at n = N rather than N/2, so
/// it is not a normalized pmf. See `absorption_count_gaussian_recentered`
/// for the corrected curve.
pub fn absorption_count_gaussian(cycles: u32, absorbed: u32) -> f64 {
    let n_tot = cycles as f64;
    let n = absorbed as f64;
    (2.0 / (PI * n_tot).sqrt()) * (-2.0 * (n_tot - n).powi(2) / n_tot).exp()
}

/// Recentered Gaussian sqrt(2/(pi N)) exp(-2 (n - N/2)^2 / N), the
/// de Moivre-Laplace approximation of `absorption_count_exact`.
pub fn absorption_count_gaussian_recentered(cycles: u32, absorbed: u32) -> f64 {
    let n_tot = cycles as f64;
    let n = absorbed as f64;
    (2.0 / (PI * n_tot)).sqrt() * (-2.0 * (n - n_tot / 2.0).powi(2) / n_tot).exp()
}

/// Simulates `repetitions` operation windows of the Bernoulli chain model
/// and histograms the resulting chain lengths.
///
/// Cycle 1 always succeeds; each later cycle succeeds with probability 1/2;
/// the first failure, or running out of window slots, ends the chain.
pub fn simulate_sessions<R: Rng>(config: &RateConfig, rng: &mut R) -> Result<ChainHistogram> {
    config.validate()?;
    let slots = config.window_slots();
    let mut counts: BTreeMap<u32, u64> = BTreeMap::new();
    for _ in 0..config.repetitions {
        let mut length = 1u32;
        while length < slots && rng.random::<bool>() {
            length += 1;
        }
        *counts.entry(length).or_insert(0) += 1;
    }
    Ok(ChainHistogram {
        counts,
        repetitions: config.repetitions,
    })
}

/// Rate of operation windows per second that yield a chain of at least `m`
/// photons with every required photon detected:
/// (1/cycle_time) * 2^(1-m) * (zpl * collection * detector)^m.
///
/// The exponent grows to m+1 when `include_final_photon` is set.
pub fn detected_event_rate(config: &RateConfig, m: u32) -> Result<f64> {
    config.validate()?;
    let p = p_chain(m)?;
    let per_photon = config.zpl_fraction * config.collection_eff * config.detector_eff;
    let exponent = if config.include_final_photon { m + 1 } else { m };
    Ok((1.0 / config.cycle_time) * p * per_photon.powi(exponent as i32))
}
