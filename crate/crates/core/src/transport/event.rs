//! Event-based pipeline: the bank is optionally sorted, then every live
//! particle with a pending lookup, advance or collision is processed stage
//! by stage until the bank is empty.

use super::{Engine, Event, FissionSite, Particle, ParticleBank, TransportError};
use crate::sorting::{sort_prefix, SortStrategy};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::time::Instant;

/// Per-stage counts and wall time for one or more pipeline runs.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EventStats {
    pub iterations: u64,
    pub lookups: u64,
    pub advances: u64,
    pub collisions: u64,
    pub lookup_seconds: f64,
    pub advance_seconds: f64,
    pub collision_seconds: f64,
    pub sort_seconds: f64,
}

impl EventStats {
    pub fn transport_seconds(&self) -> f64 {
        self.lookup_seconds + self.advance_seconds + self.collision_seconds
    }

    pub fn accumulate(&mut self, o: &EventStats) {
        self.iterations += o.iterations;
        self.lookups += o.lookups;
        self.advances += o.advances;
        self.collisions += o.collisions;
        self.lookup_seconds += o.lookup_seconds;
        self.advance_seconds += o.advance_seconds;
        self.collision_seconds += o.collision_seconds;
        self.sort_seconds += o.sort_seconds;
    }
}

type Row = Result<(Particle, Vec<FissionSite>), TransportError>;

/// Reused between passes so each stage allocates nothing in steady state.
#[derive(Default)]
struct Scratch {
    pending: Vec<usize>,
    rows: Vec<Row>,
}

fn stage<F>(
    bank: &mut ParticleBank,
    alive: usize,
    which: Event,
    scratch: &mut Scratch,
    sites: &mut Vec<FissionSite>,
    f: F,
) -> Result<u64, TransportError>
where
    F: Fn(&mut Particle, &mut Vec<FissionSite>) -> Result<(), TransportError> + Sync,
{
    scratch.pending.clear();
    scratch.pending.extend((0..alive).filter(|&i| bank.event[i] == which));
    let view = &*bank;
    scratch
        .pending
        .par_iter()
        .map(|&i| {
            let mut p = view.get(i);
            let mut emitted = Vec::new();
            f(&mut p, &mut emitted)?;
            Ok((p, emitted))
        })
        .collect_into_vec(&mut scratch.rows);
    for (&i, row) in scratch.pending.iter().zip(scratch.rows.drain(..)) {
        let (p, emitted) = row?;
        bank.set(i, &p);
        sites.extend(emitted);
    }
    Ok(scratch.pending.len() as u64)
}

/// Runs every particle in `bank` to completion. Returns the fission sites
/// in canonical order (by history of origin, then emission order).
pub fn run_event_based(
    engine: &Engine<'_>,
    bank: &mut ParticleBank,
    strategy: SortStrategy,
) -> Result<(Vec<FissionSite>, EventStats), TransportError> {
    let mut stats = EventStats::default();
    let mut sites = Vec::new();
    let mut scratch = Scratch::default();
    // rows from `alive` on are dead once a pass has compacted them
    let mut alive = bank.len();
    loop {
        let t = Instant::now();
        alive = sort_prefix(bank, strategy, alive).alive;
        stats.sort_seconds += t.elapsed().as_secs_f64();
        if alive == 0 {
            break;
        }
        stats.iterations += 1;

        let t = Instant::now();
        let n = stage(bank, alive, Event::Lookup, &mut scratch, &mut sites, |p, _| engine.lookup(p))?;
        stats.lookups += n;
        stats.lookup_seconds += t.elapsed().as_secs_f64();

        let t = Instant::now();
        let n = stage(bank, alive, Event::Advance, &mut scratch, &mut sites, |p, _| engine.advance(p))?;
        stats.advances += n;
        stats.advance_seconds += t.elapsed().as_secs_f64();

        let t = Instant::now();
        let n = stage(bank, alive, Event::Collide, &mut scratch, &mut sites, |p, s| engine.collide(p, s))?;
        stats.collisions += n;
        stats.collision_seconds += t.elapsed().as_secs_f64();
    }
    sites.sort_by_key(|s| s.history);
    Ok((sites, stats))
}
