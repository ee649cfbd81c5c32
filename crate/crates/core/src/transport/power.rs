//! k-eigenvalue power iteration over batches of histories.

use super::physics::{isotropic, sample_watt, WATT_A, WATT_B};
use super::{
    run_event_based, run_history_based, Cutoffs, EventStats, FissionSite, Particle, ParticleBank, Problem,
    TransportError,
};
use crate::geometry::{Pincell, Vec3};
use crate::rng::{source_stream, Stream};
use crate::sorting::SortStrategy;
use crate::tally::{batch_keff, mean_std, rate, BatchResult, RunResult, Throughput};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    #[default]
    History,
    Event,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::History => "history",
            Mode::Event => "event",
        })
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "history" => Ok(Mode::History),
            "event" => Ok(Mode::Event),
            other => Err(format!("unknown mode `{other}` (expected history or event)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunSettings {
    pub particles: usize,
    pub batches: usize,
    pub inactive: usize,
    pub seed: u64,
    pub mode: Mode,
    pub sort: SortStrategy,
    pub workers: usize,
    pub cutoffs: Cutoffs,
}

impl RunSettings {
    pub fn new(particles: usize, batches: usize, inactive: usize) -> Self {
        RunSettings {
            particles,
            batches,
            inactive,
            seed: 1,
            mode: Mode::History,
            sort: SortStrategy::None,
            workers: 1,
            cutoffs: Cutoffs::default(),
        }
    }

    pub fn validate(&self) -> Result<(), TransportError> {
        let bad = |field, reason: String| Err(TransportError::InvalidSettings { field, reason });
        if self.particles < 100 {
            return bad("particles", format!("must be at least 100, got {}", self.particles));
        }
        if self.inactive < 1 {
            return bad("inactive", "must be at least 1".into());
        }
        if self.batches <= self.inactive {
            return bad(
                "batches",
                format!("must exceed inactive ({}), got {}", self.inactive, self.batches),
            );
        }
        if self.batches - self.inactive < 2 {
            return bad("batches", "need at least 2 active batches".into());
        }
        if self.workers < 1 {
            return bad("workers", "must be at least 1".into());
        }
        if !(self.cutoffs.energy >= 0.0) {
            return bad("energy_cutoff", format!("must be non-negative, got {}", self.cutoffs.energy));
        }
        if self.cutoffs.flights < 1 {
            return bad("flight_cutoff", "must be at least 1".into());
        }
        Ok(())
    }
}

/// Uniform point in `region`, by rejection from its bounding square.
pub fn sample_in_region(geometry: &Pincell, region: usize, stream: &mut Stream) -> Result<Vec3, TransportError> {
    let half = geometry.radii().get(region).copied().unwrap_or(geometry.half_pitch());
    loop {
        let x = half * (2.0 * stream.next_f64() - 1.0);
        let y = half * (2.0 * stream.next_f64() - 1.0);
        let p = Vec3::new(x, y, 0.0);
        if geometry.locate(p)? == region {
            return Ok(p);
        }
    }
}

/// Picks exactly `n` sites: a uniform subset (kept in bank order) when
/// there are enough, otherwise all of them plus draws with replacement.
pub fn resample(sites: &[FissionSite], n: usize, stream: &mut Stream) -> Vec<Vec3> {
    let m = sites.len();
    assert!(m > 0, "cannot resample an empty bank");
    let pick = |stream: &mut Stream, k: usize| ((stream.next_f64() * k as f64) as usize).min(k - 1);
    if m >= n {
        let mut index: Vec<usize> = (0..m).collect();
        for i in 0..n {
            let j = i + pick(stream, m - i);
            index.swap(i, j);
        }
        let mut chosen = index[..n].to_vec();
        chosen.sort_unstable();
        chosen.into_iter().map(|i| sites[i].position).collect()
    } else {
        let mut out: Vec<Vec3> = sites.iter().map(|s| s.position).collect();
        out.extend((m..n).map(|_| sites[pick(stream, m)].position));
        out
    }
}

/// Runs the full batch sequence on a dedicated pool of `settings.workers`
/// threads.
pub fn power_iteration(problem: &Problem, settings: &RunSettings) -> Result<RunResult, TransportError> {
    settings.validate()?;
    problem.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(settings.workers)
        .build()
        .map_err(|e| TransportError::Pool(e.to_string()))?;
    pool.install(|| iterate(problem, settings))
}

fn iterate(problem: &Problem, settings: &RunSettings) -> Result<RunResult, TransportError> {
    let engine = problem.engine(settings.cutoffs);
    let geometry = &problem.geometry;
    let n = settings.particles;
    let e_max = problem
        .library
        .nuclides()
        .iter()
        .map(|x| x.energy_span().1)
        .fold(f64::INFINITY, f64::min);

    let mut source: Option<Vec<Vec3>> = None;
    let mut batches = Vec::with_capacity(settings.batches);
    let mut stats = EventStats::default();
    let mut history_seconds = 0.0;

    for batch in 0..settings.batches {
        let first = (batch * n) as u64;
        let mut particles: Vec<Particle> = (0..n)
            .into_par_iter()
            .map(|slot| {
                let history = first + slot as u64;
                let mut stream = Stream::for_history(settings.seed, history);
                let position = match &source {
                    None => sample_in_region(geometry, problem.source_region, &mut stream)?,
                    Some(s) => s[slot],
                };
                let energy = sample_watt(WATT_A, WATT_B, e_max, &mut stream);
                let direction = isotropic(&mut stream);
                Particle::source(geometry, position, direction, energy, stream, history)
            })
            .collect::<Result<_, _>>()?;

        let sites = match settings.mode {
            Mode::History => {
                let t = Instant::now();
                let sites = run_history_based(&engine, &mut particles)?;
                history_seconds += t.elapsed().as_secs_f64();
                sites
            }
            Mode::Event => {
                let mut bank = ParticleBank::from_particles(&particles);
                let (sites, s) = run_event_based(&engine, &mut bank, settings.sort)?;
                stats.accumulate(&s);
                particles = bank.to_particles();
                particles.sort_unstable_by_key(|p| p.history);
                sites
            }
        };

        let mut result = BatchResult {
            index: batch,
            active: batch >= settings.inactive,
            launched_weight: 0.0,
            fission_sites: sites.len(),
            ..Default::default()
        };
        for p in &particles {
            result.launched_weight += 1.0;
            result.nu_fission_track += p.tally.nu_fission_track;
            result.absorbed_weight += p.tally.absorbed;
            result.cutoff_weight += p.tally.cutoff;
            result.energy_cutoffs += p.tally.energy_cutoffs as u64;
            result.flight_cutoffs += p.tally.flight_cutoffs as u64;
            result.stream_overflows += p.stream.overflowed() as u64;
        }
        result.k = batch_keff(result.nu_fission_track, result.launched_weight);
        batches.push(result);

        if sites.is_empty() {
            return Err(TransportError::SubcriticalCollapse { batch });
        }
        source = Some(resample(&sites, n, &mut source_stream(settings.seed, batch as u64)));
    }

    let active: Vec<f64> = batches.iter().filter(|b| b.active).map(|b| b.k).collect();
    let (mean, sigma) = mean_std(&active).expect("validated active batch count");
    let particles = (n * settings.batches) as u64;
    let throughput = match settings.mode {
        Mode::History => Throughput {
            particles,
            transport_seconds: history_seconds,
            ..Default::default()
        },
        Mode::Event => Throughput {
            particles,
            transport_seconds: stats.transport_seconds(),
            sort_seconds: stats.sort_seconds,
            lookups_per_second: rate(stats.lookups as f64, stats.lookup_seconds),
            advances_per_second: rate(stats.advances as f64, stats.advance_seconds),
            collisions_per_second: rate(stats.collisions as f64, stats.collision_seconds),
        },
    };
    Ok(RunResult {
        energy_cutoffs: batches.iter().map(|b| b.energy_cutoffs).sum(),
        flight_cutoffs: batches.iter().map(|b| b.flight_cutoffs).sum(),
        stream_overflows: batches.iter().map(|b| b.stream_overflows).sum(),
        batches,
        mean,
        sigma,
        throughput,
    })
}
