//! Results files: a per-batch CSV plus a JSON summary.
//!
//! Everything outside the summary's `metadata` block is a deterministic
//! function of the configuration. Timing and timestamps live in `metadata`.

use super::config::{ProblemRef, RunConfig};
use crate::tally::{doppler_coefficient, format_uncertain, RunResult};
use crate::transport::{Problem, RunSettings};
use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

pub const RESULTS_FORMAT: &str = "pinmc-results";
pub const RESULTS_VERSION: u32 = 1;
pub const BATCH_HEADER: &str =
    "batch,active,k,launched_weight,nu_fission_track,absorbed_weight,cutoff_weight,fission_sites";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub format: String,
    pub version: u32,
    pub problem: String,
    pub fuel_temperature: f64,
    pub mean: f64,
    pub sigma: f64,
    /// `mean (sigma)` with sigma in units of the last digit.
    pub k: String,
    pub active_batches: usize,
    pub energy_cutoffs: u64,
    pub flight_cutoffs: u64,
    pub stream_overflows: u64,
    pub config: ConfigEcho,
    pub metadata: Metadata,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub problem: String,
    pub library: Option<PathBuf>,
    pub settings: RunSettings,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub timestamp_unix: u64,
    pub particles_per_second: f64,
    pub sort_excluded_particles_per_second: f64,
    pub transport_seconds: f64,
    pub sort_seconds: f64,
    pub lookups_per_second: f64,
    pub advances_per_second: f64,
    pub collisions_per_second: f64,
    pub power: String,
}

pub fn summarize(config: &RunConfig, problem: &Problem, result: &RunResult) -> Summary {
    let t = &result.throughput;
    Summary {
        format: RESULTS_FORMAT.into(),
        version: RESULTS_VERSION,
        problem: problem.name.clone(),
        fuel_temperature: problem.source_temperature(),
        mean: result.mean,
        sigma: result.sigma,
        k: format_uncertain(result.mean, result.sigma),
        active_batches: result.batches.iter().filter(|b| b.active).count(),
        energy_cutoffs: result.energy_cutoffs,
        flight_cutoffs: result.flight_cutoffs,
        stream_overflows: result.stream_overflows,
        config: ConfigEcho {
            problem: match &config.problem {
                ProblemRef::Builtin(n) => n.clone(),
                ProblemRef::File(p) => p.display().to_string(),
            },
            library: config.library.clone(),
            settings: config.settings,
        },
        metadata: Metadata {
            timestamp_unix: std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map_or(0, |d| d.as_secs()),
            particles_per_second: t.including_sort(),
            sort_excluded_particles_per_second: t.excluding_sort(),
            transport_seconds: t.transport_seconds,
            sort_seconds: t.sort_seconds,
            lookups_per_second: t.lookups_per_second,
            advances_per_second: t.advances_per_second,
            collisions_per_second: t.collisions_per_second,
            power: "not measured (out of scope)".into(),
        },
    }
}

/// One line per batch. Floats use the shortest representation that
/// round-trips, so identical runs give identical files.
pub fn batches_csv(result: &RunResult) -> String {
    let mut out = String::from(BATCH_HEADER);
    out.push('\n');
    for b in &result.batches {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            b.index,
            b.active as u8,
            b.k,
            b.launched_weight,
            b.nu_fission_track,
            b.absorbed_weight,
            b.cutoff_weight,
            b.fission_sites
        )
        .unwrap();
    }
    out
}

pub fn summary_line(result: &RunResult) -> String {
    format!(
        "k = {}  throughput = {:.0} p/s (sort-excluded {:.0} p/s)",
        format_uncertain(result.mean, result.sigma),
        result.throughput.including_sort(),
        result.throughput.excluding_sort()
    )
}

pub fn csv_path(prefix: &Path) -> PathBuf {
    with_suffix(prefix, ".batches.csv")
}

pub fn summary_path(prefix: &Path) -> PathBuf {
    with_suffix(prefix, ".summary.json")
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

pub fn write_results(prefix: &Path, summary: &Summary, result: &RunResult) -> Result<()> {
    if let Some(dir) = prefix.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let csv = csv_path(prefix);
    std::fs::write(&csv, batches_csv(result)).with_context(|| format!("writing {}", csv.display()))?;
    let json = summary_path(prefix);
    let text = serde_json::to_string_pretty(summary)?;
    std::fs::write(&json, text + "\n").with_context(|| format!("writing {}", json.display()))?;
    Ok(())
}

/// Accepts a summary file or the prefix it was written under.
pub fn read_summary(path: &Path) -> Result<Summary> {
    let path = if path.is_file() { path.to_path_buf() } else { summary_path(path) };
    let text = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
    let s: Summary = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    if s.format != RESULTS_FORMAT || s.version != RESULTS_VERSION {
        bail!("{}: unsupported results format {} v{}", path.display(), s.format, s.version);
    }
    Ok(s)
}

/// The k column of a batches CSV.
pub fn read_k_column(path: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut lines = text.lines();
    if lines.next() != Some(BATCH_HEADER) {
        bail!("{}: missing or unexpected header", path.display());
    }
    lines
        .map(|l| {
            let field = l.split(',').nth(2).context("short row")?;
            Ok(field.parse::<f64>()?)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub t1: f64,
    pub k1: f64,
    pub sigma1: f64,
    pub t2: f64,
    pub k2: f64,
    pub sigma2: f64,
    /// pcm/K
    pub alpha: f64,
    pub sigma_alpha: f64,
}

impl Comparison {
    pub fn line(&self) -> String {
        format!(
            "alpha({} K -> {} K) = {} pcm/K",
            self.t1,
            self.t2,
            format_uncertain(self.alpha, self.sigma_alpha)
        )
    }
}

/// Doppler coefficient between two runs, ordered by fuel temperature.
pub fn compare(a: &Summary, b: &Summary) -> Result<Comparison> {
    let (lo, hi) = if a.fuel_temperature <= b.fuel_temperature { (a, b) } else { (b, a) };
    let (alpha, sigma_alpha) =
        doppler_coefficient(lo.mean, lo.sigma, lo.fuel_temperature, hi.mean, hi.sigma, hi.fuel_temperature)?;
    Ok(Comparison {
        t1: lo.fuel_temperature,
        k1: lo.mean,
        sigma1: lo.sigma,
        t2: hi.fuel_temperature,
        k2: hi.mean,
        sigma2: hi.sigma,
        alpha,
        sigma_alpha,
    })
}
