//! Particle transport: the shared step functions, a history-based driver,
//! an event-based pipeline over a structure-of-arrays bank, and power
//! iteration on top of both.
//!
//! Both pipelines call the same `lookup`, `advance` and `collide` steps on
//! a particle, which carries its own random stream. That is what makes the
//! two modes agree bit for bit.

pub mod bank;
pub mod event;
pub mod physics;
pub mod power;

pub use bank::ParticleBank;
pub use event::{run_event_based, EventStats};
pub use physics::{
    elastic_scatter, sample_collision_nuclide, sample_flight, sample_reaction, sample_watt, Reaction,
    WATT_A, WATT_B,
};
pub use power::{power_iteration, Mode, RunSettings};

use crate::geometry::{reflect, GeometryError, Pincell, Surface, Vec3, NUDGE};
use crate::nucleardata::{Library, Material, XsError};
use crate::rng::Stream;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

#[derive(Debug, thiserror::Error)]
pub enum TransportError {
    #[error(transparent)]
    Xs(#[from] XsError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("non-positive total cross section {0} /cm")]
    NonPositiveTotal(f32),
    #[error("lost particle: {reason}; state {state}")]
    Lost { reason: String, state: String },
    #[error("subcritical collapse: fission bank empty after batch {batch}")]
    SubcriticalCollapse { batch: usize },
    #[error("invalid run settings: {field}: {reason}")]
    InvalidSettings { field: &'static str, reason: String },
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("worker pool: {0}")]
    Pool(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Status {
    Alive,
    Absorbed,
    Cutoff,
}

/// The next thing that will happen to a particle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Event {
    Lookup,
    Advance,
    Collide,
    Done,
}

/// Everything a history scores. Summed per batch in history order.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HistoryTally {
    pub nu_fission_track: f64,
    pub absorbed: f64,
    pub cutoff: f64,
    pub energy_cutoffs: u32,
    pub flight_cutoffs: u32,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Particle {
    pub position: Vec3,
    pub direction: Vec3,
    pub energy: f64,
    pub weight: f64,
    pub region: u32,
    pub material: u32,
    pub stream: Stream,
    pub history: u64,
    pub status: Status,
    pub event: Event,
    /// Macroscopic total and nu-fission at the current energy, set by lookup.
    pub sigma_total: f32,
    pub sigma_nu_fission: f32,
    pub flights: u32,
    pub collisions: u32,
    pub tally: HistoryTally,
}

impl Particle {
    /// A fresh, located source particle of unit weight.
    pub fn source(
        geometry: &Pincell,
        position: Vec3,
        direction: Vec3,
        energy: f64,
        stream: Stream,
        history: u64,
    ) -> Result<Particle, TransportError> {
        let region = geometry.locate(position)?;
        Ok(Particle {
            position,
            direction,
            energy,
            weight: 1.0,
            region: region as u32,
            material: geometry.material(region) as u32,
            stream,
            history,
            status: Status::Alive,
            event: Event::Lookup,
            sigma_total: 0.0,
            sigma_nu_fission: 0.0,
            flights: 0,
            collisions: 0,
            tally: HistoryTally::default(),
        })
    }

    pub fn is_alive(&self) -> bool {
        self.event != Event::Done
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FissionSite {
    pub position: Vec3,
    pub history: u64,
}

/// History termination thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cutoffs {
    /// Particles below this energy (eV) are killed.
    pub energy: f64,
    /// Maximum number of flights per history.
    pub flights: u32,
}

impl Default for Cutoffs {
    fn default() -> Self {
        Cutoffs { energy: 1.0e-4, flights: 100_000 }
    }
}

/// A complete transport problem: geometry, materials and nuclear data.
#[derive(Debug, Clone)]
pub struct Problem {
    pub name: String,
    pub geometry: Pincell,
    pub materials: Vec<Material>,
    pub library: Arc<Library>,
    /// Region sampled uniformly for the initial source.
    pub source_region: usize,
}

impl Problem {
    pub fn validate(&self) -> Result<(), TransportError> {
        let bad = |m: String| Err(TransportError::InvalidProblem(m));
        for (r, &m) in self.geometry.region_materials().iter().enumerate() {
            if m >= self.materials.len() {
                return bad(format!("region {r} refers to missing material {m}"));
            }
        }
        for m in &self.materials {
            for c in &m.constituents {
                if c.nuclide >= self.library.len() {
                    return bad(format!("material {} refers to missing nuclide {}", m.name, c.nuclide));
                }
            }
        }
        if self.source_region >= self.geometry.num_regions() {
            return bad(format!("source region {} does not exist", self.source_region));
        }
        Ok(())
    }

    pub fn engine(&self, cutoffs: Cutoffs) -> Engine<'_> {
        Engine { problem: self, cutoffs }
    }

    /// Fuel temperature, taken as the temperature of the source region.
    pub fn source_temperature(&self) -> f64 {
        self.materials[self.geometry.material(self.source_region)].temperature
    }
}

/// The step functions shared by both pipelines.
#[derive(Debug, Clone, Copy)]
pub struct Engine<'a> {
    pub problem: &'a Problem,
    pub cutoffs: Cutoffs,
}

impl<'a> Engine<'a> {
    fn kill(p: &mut Particle, status: Status) {
        match status {
            Status::Absorbed => p.tally.absorbed += p.weight,
            Status::Cutoff => p.tally.cutoff += p.weight,
            Status::Alive => unreachable!("kill with alive status"),
        }
        p.status = status;
        p.event = Event::Done;
    }

    /// Macroscopic lookup at the particle's energy, or energy cutoff.
    pub fn lookup(&self, p: &mut Particle) -> Result<(), TransportError> {
        debug_assert_eq!(p.event, Event::Lookup);
        if p.energy < self.cutoffs.energy {
            p.tally.energy_cutoffs += 1;
            Self::kill(p, Status::Cutoff);
            return Ok(());
        }
        let material = &self.problem.materials[p.material as usize];
        let xs = material.macro_xs(&self.problem.library, p.energy)?;
        if !(xs.total > 0.0) {
            return Err(TransportError::NonPositiveTotal(xs.total));
        }
        p.sigma_total = xs.total;
        p.sigma_nu_fission = xs.nu_fission;
        p.event = Event::Advance;
        Ok(())
    }

    /// Samples a flight, moves to the collision site or the nearest
    /// surface, and scores the track length.
    pub fn advance(&self, p: &mut Particle) -> Result<(), TransportError> {
        debug_assert_eq!(p.event, Event::Advance);
        if p.flights >= self.cutoffs.flights {
            p.tally.flight_cutoffs += 1;
            Self::kill(p, Status::Cutoff);
            return Ok(());
        }
        p.flights += 1;
        let geometry = &self.problem.geometry;
        let flight = sample_flight(p.sigma_total, p.stream.next_f64())?;
        let boundary = geometry.distance_in_region(p.position, p.direction, p.region as usize);
        let distance = flight.min(boundary.distance);
        p.position = p.position + p.direction * distance;
        p.tally.nu_fission_track += p.weight * distance * p.sigma_nu_fission as f64;
        if flight < boundary.distance {
            p.event = Event::Collide;
            return Ok(());
        }
        match boundary.surface {
            Some(Surface::Cylinder(_)) => {}
            Some(Surface::Face(face)) => {
                p.position = geometry.snap_to_face(p.position, face);
                p.direction = reflect(p.direction, face);
            }
            None => return Err(lost(p, "no surface ahead and no collision")),
        }
        p.position = p.position + p.direction * NUDGE;
        (p.position, p.direction) = geometry.fold_into_cell(p.position, p.direction);
        let region = match geometry.locate(p.position) {
            Ok(r) => r,
            Err(e) => return Err(lost(p, &e.to_string())),
        };
        p.region = region as u32;
        p.material = geometry.material(region) as u32;
        p.event = Event::Lookup;
        Ok(())
    }

    /// Samples the collision partner and reaction, then applies it.
    pub fn collide(&self, p: &mut Particle, sites: &mut Vec<FissionSite>) -> Result<(), TransportError> {
        debug_assert_eq!(p.event, Event::Collide);
        p.collisions += 1;
        let problem = self.problem;
        let material = &problem.materials[p.material as usize];
        let (index, micro) =
            sample_collision_nuclide(material, &problem.library, p.energy, p.sigma_total, p.stream.next_f64())?;
        match sample_reaction(&micro, p.stream.next_f64()) {
            Reaction::Elastic => {
                let awr = problem.library.nuclide(material.constituents[index].nuclide).awr();
                let (xi1, xi2) = (p.stream.next_f64(), p.stream.next_f64());
                let (e, d) = elastic_scatter(p.energy, p.direction, awr, xi1, xi2);
                p.energy = e;
                p.direction = d;
                p.event = Event::Lookup;
            }
            Reaction::Capture => Self::kill(p, Status::Absorbed),
            Reaction::Fission => {
                let n = (p.weight * micro.nu as f64 + p.stream.next_f64()).floor() as usize;
                sites.extend((0..n).map(|_| FissionSite { position: p.position, history: p.history }));
                Self::kill(p, Status::Absorbed);
            }
        }
        Ok(())
    }

    /// Performs the particle's pending event.
    pub fn step(&self, p: &mut Particle, sites: &mut Vec<FissionSite>) -> Result<(), TransportError> {
        match p.event {
            Event::Lookup => self.lookup(p),
            Event::Advance => self.advance(p),
            Event::Collide => self.collide(p, sites),
            Event::Done => Ok(()),
        }
    }

    /// Runs one history to completion, appending its fission sites.
    pub fn transport_history(&self, p: &mut Particle, sites: &mut Vec<FissionSite>) -> Result<(), TransportError> {
        while p.is_alive() {
            self.step(p, sites)?;
        }
        Ok(())
    }
}

fn lost(p: &Particle, reason: &str) -> TransportError {
    TransportError::Lost { reason: reason.to_string(), state: format!("{p:?}") }
}

/// History-based driver: each particle runs to completion. Output order
/// matches input order.
pub fn run_history_based(
    engine: &Engine<'_>,
    particles: &mut [Particle],
) -> Result<Vec<FissionSite>, TransportError> {
    use rayon::prelude::*;
    let per_history: Vec<Vec<FissionSite>> = particles
        .par_iter_mut()
        .map(|p| {
            let mut sites = Vec::new();
            engine.transport_history(p, &mut sites).map(|_| sites)
        })
        .collect::<Result<_, _>>()?;
    Ok(per_history.into_iter().flatten().collect())
}
