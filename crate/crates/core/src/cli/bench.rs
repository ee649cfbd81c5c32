//! Sorting benchmark: the event pipeline under each strategy, same seed.

use crate::sorting::SortStrategy;
use crate::tally::RunResult;
use crate::transport::{power_iteration, Mode, Problem, RunSettings, TransportError};
use anyhow::{bail, Result};
use std::fmt::Write as _;

pub const BENCH_HEADER: &str = "strategy,particles/sec,relative (excl. sort),relative (incl. sort)";

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub strategy: SortStrategy,
    /// Sort time excluded.
    pub particles_per_second: f64,
    pub particles_per_second_with_sort: f64,
    pub relative_excluding_sort: f64,
    pub relative_including_sort: f64,
}

fn check_same(reference: &RunResult, other: &RunResult, strategy: SortStrategy) -> Result<()> {
    for (a, b) in reference.batches.iter().zip(&other.batches) {
        if a.k.to_bits() != b.k.to_bits() || a.fission_sites != b.fission_sites {
            bail!(
                "cross-strategy result mismatch: batch {} k = {} ({} sites) with none, k = {} ({} sites) with {}",
                a.index,
                a.k,
                a.fission_sites,
                b.k,
                b.fission_sites,
                strategy
            );
        }
    }
    if reference.batches.len() != other.batches.len() {
        bail!("cross-strategy result mismatch: batch count differs for {strategy}");
    }
    Ok(())
}

/// Runs every strategy `repeats` times through `runner`, keeping the best
/// throughput of each, and fails if any strategy changes the results.
pub fn bench_with<F>(problem: &Problem, base: &RunSettings, repeats: usize, mut runner: F) -> Result<Vec<BenchRow>>
where
    F: FnMut(&Problem, &RunSettings) -> Result<RunResult, TransportError>,
{
    let mut best = [(0.0f64, 0.0f64); 4];
    let mut reference: Option<RunResult> = None;
    for _ in 0..repeats.max(1) {
        for (i, strategy) in SortStrategy::ALL.into_iter().enumerate() {
            let settings = RunSettings { mode: Mode::Event, sort: strategy, ..*base };
            let result = runner(problem, &settings)?;
            match &reference {
                None => reference = Some(result.clone()),
                Some(r) => check_same(r, &result, strategy)?,
            }
            let t = &result.throughput;
            best[i].0 = best[i].0.max(t.excluding_sort());
            best[i].1 = best[i].1.max(t.including_sort());
        }
    }
    let (base_excl, base_incl) = best[0];
    Ok(SortStrategy::ALL
        .into_iter()
        .zip(best)
        .map(|(strategy, (excl, incl))| BenchRow {
            strategy,
            particles_per_second: excl,
            particles_per_second_with_sort: incl,
            relative_excluding_sort: excl / base_excl,
            relative_including_sort: incl / base_incl,
        })
        .collect())
}

pub fn bench(problem: &Problem, base: &RunSettings, repeats: usize) -> Result<Vec<BenchRow>> {
    bench_with(problem, base, repeats, power_iteration)
}

pub fn bench_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from(BENCH_HEADER);
    out.push('\n');
    for r in rows {
        writeln!(
            out,
            "{},{:.1},{:.4},{:.4}",
            r.strategy, r.particles_per_second, r.relative_excluding_sort, r.relative_including_sort
        )
        .unwrap();
    }
    out
}
