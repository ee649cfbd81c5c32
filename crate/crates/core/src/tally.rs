//! Track-length k estimates, batch statistics and the Doppler coefficient.

use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum TallyError {
    #[error("need at least 2 active batches, got {0}")]
    TooFewBatches(usize),
    #[error("temperatures must increase: T1 = {t1} K, T2 = {t2} K")]
    TemperatureOrder { t1: f64, t2: f64 },
    #[error("k values must be positive: k1 = {k1}, k2 = {k2}")]
    NonPositiveK { k1: f64, k2: f64 },
    #[error("cannot parse `{0}` as `value (uncertainty)`")]
    Parse(String),
}

/// Everything recorded for one batch.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct BatchResult {
    pub index: usize,
    pub active: bool,
    pub k: f64,
    pub launched_weight: f64,
    pub nu_fission_track: f64,
    pub absorbed_weight: f64,
    pub cutoff_weight: f64,
    pub fission_sites: usize,
    pub energy_cutoffs: u64,
    pub flight_cutoffs: u64,
    pub stream_overflows: u64,
}

impl BatchResult {
    /// Relative mismatch between launched and terminated weight. Nothing
    /// leaks from a reflected cell, so leakage is zero.
    pub fn weight_balance_error(&self) -> f64 {
        let scored = self.absorbed_weight + self.cutoff_weight;
        (scored - self.launched_weight).abs() / self.launched_weight
    }
}

/// Wall-clock throughput of a run, particles per second.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Throughput {
    pub particles: u64,
    pub transport_seconds: f64,
    pub sort_seconds: f64,
    pub lookups_per_second: f64,
    pub advances_per_second: f64,
    pub collisions_per_second: f64,
}

impl Throughput {
    pub fn including_sort(&self) -> f64 {
        rate(self.particles as f64, self.transport_seconds + self.sort_seconds)
    }

    pub fn excluding_sort(&self) -> f64 {
        rate(self.particles as f64, self.transport_seconds)
    }
}

pub(crate) fn rate(count: f64, seconds: f64) -> f64 {
    if seconds > 0.0 {
        count / seconds
    } else {
        0.0
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RunResult {
    pub batches: Vec<BatchResult>,
    pub mean: f64,
    pub sigma: f64,
    pub throughput: Throughput,
    pub energy_cutoffs: u64,
    pub flight_cutoffs: u64,
    pub stream_overflows: u64,
}

impl RunResult {
    pub fn k_values(&self) -> Vec<f64> {
        self.batches.iter().map(|b| b.k).collect()
    }
}

/// Track-length k for one batch.
pub fn batch_keff(nu_fission_track: f64, launched_weight: f64) -> f64 {
    assert!(launched_weight > 0.0, "launched weight must be positive");
    nu_fission_track / launched_weight
}

/// Sample mean and standard deviation of the mean.
pub fn mean_std(values: &[f64]) -> Result<(f64, f64), TallyError> {
    let n = values.len();
    if n < 2 {
        return Err(TallyError::TooFewBatches(n));
    }
    // shifted by the first value so a constant series gives exactly zero
    let shift = values[0];
    let d_mean = values.iter().map(|v| v - shift).sum::<f64>() / n as f64;
    let ss: f64 = values.iter().map(|v| (v - shift - d_mean).powi(2)).sum();
    Ok((shift + d_mean, (ss / (n as f64 * (n as f64 - 1.0))).sqrt()))
}

/// Doppler coefficient in pcm/K between two temperatures, with its
/// uncertainty propagated from independent k uncertainties.
pub fn doppler_coefficient(
    k1: f64,
    sigma1: f64,
    t1: f64,
    k2: f64,
    sigma2: f64,
    t2: f64,
) -> Result<(f64, f64), TallyError> {
    if !(t1 < t2) {
        return Err(TallyError::TemperatureOrder { t1, t2 });
    }
    if !(k1 > 0.0 && k2 > 0.0) {
        return Err(TallyError::NonPositiveK { k1, k2 });
    }
    let scale = 1.0e5 / (t2 - t1);
    let alpha = (1.0 / k1 - 1.0 / k2) * scale;
    let sigma = scale * (sigma1 * sigma1 / k1.powi(4) + sigma2 * sigma2 / k2.powi(4)).sqrt();
    Ok((alpha, sigma))
}

/// Renders `value (u)` with the uncertainty given to two significant digits
/// in units of the last printed decimal.
pub fn format_uncertain(value: f64, sigma: f64) -> String {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return format!("{value:.5} (0)");
    }
    let mut decimals = (1 - sigma.log10().floor() as i32).max(0);
    let mut digits = (sigma * 10f64.powi(decimals)).round();
    if digits >= 100.0 && decimals > 0 {
        decimals -= 1;
        digits = (sigma * 10f64.powi(decimals)).round();
    }
    format!("{value:.prec$} ({digits:.0})", prec = decimals as usize)
}

/// Inverse of [`format_uncertain`].
pub fn parse_uncertain(text: &str) -> Result<(f64, f64), TallyError> {
    let err = || TallyError::Parse(text.to_string());
    let (value, rest) = text.trim().split_once('(').ok_or_else(err)?;
    let digits = rest.strip_suffix(')').ok_or_else(err)?.trim();
    let value = value.trim();
    let decimals = value.split_once('.').map_or(0, |(_, f)| f.len()) as i32;
    let v: f64 = value.parse().map_err(|_| err())?;
    let d: u64 = digits.parse().map_err(|_| err())?;
    Ok((v, d as f64 / 10f64.powi(decimals)))
}
