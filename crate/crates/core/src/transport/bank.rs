//! Structure-of-arrays particle storage for the event pipeline.

use super::{Event, HistoryTally, Particle, Status};
use crate::geometry::Vec3;
use crate::rng::Stream;

/// Particle columns. All columns always have the same length, and
/// [`permute`](ParticleBank::permute) reorders every one of them.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParticleBank {
    pub position: Vec<Vec3>,
    pub direction: Vec<Vec3>,
    pub energy: Vec<f64>,
    pub weight: Vec<f64>,
    pub region: Vec<u32>,
    pub material: Vec<u32>,
    pub stream: Vec<Stream>,
    pub history: Vec<u64>,
    pub status: Vec<Status>,
    pub event: Vec<Event>,
    pub sigma_total: Vec<f32>,
    pub sigma_nu_fission: Vec<f32>,
    pub flights: Vec<u32>,
    pub collisions: Vec<u32>,
    pub tally: Vec<HistoryTally>,
}

macro_rules! columns {
    ($m:ident) => {
        $m!(position, direction, energy, weight, region, material, stream, history, status, event,
            sigma_total, sigma_nu_fission, flights, collisions, tally)
    };
}

impl ParticleBank {
    pub fn with_capacity(n: usize) -> Self {
        macro_rules! make {
            ($($c:ident),*) => { ParticleBank { $($c: Vec::with_capacity(n)),* } };
        }
        columns!(make)
    }

    pub fn from_particles(particles: &[Particle]) -> Self {
        let mut bank = ParticleBank::with_capacity(particles.len());
        for p in particles {
            bank.push(p);
        }
        bank
    }

    pub fn len(&self) -> usize {
        self.history.len()
    }

    pub fn is_empty(&self) -> bool {
        self.history.is_empty()
    }

    pub fn push(&mut self, p: &Particle) {
        macro_rules! push {
            ($($c:ident),*) => {{ $(self.$c.push(p.$c);)* }};
        }
        columns!(push)
    }

    /// Gathers row `i` into a particle.
    #[inline]
    pub fn get(&self, i: usize) -> Particle {
        macro_rules! get {
            ($($c:ident),*) => { Particle { $($c: self.$c[i]),* } };
        }
        columns!(get)
    }

    /// Scatters a particle back into row `i`.
    #[inline]
    pub fn set(&mut self, i: usize, p: &Particle) {
        macro_rules! set {
            ($($c:ident),*) => {{ $(self.$c[i] = p.$c;)* }};
        }
        columns!(set)
    }

    pub fn to_particles(&self) -> Vec<Particle> {
        (0..self.len()).map(|i| self.get(i)).collect()
    }

    /// Reorders every column so that new row `j` is old row `perm[j]`.
    /// `perm` may cover only a leading block of rows; later rows stay put.
    pub fn permute(&mut self, perm: &[usize]) {
        assert!(perm.len() <= self.len(), "permutation longer than bank");
        let start = perm.iter().enumerate().position(|(j, &i)| i != j).unwrap_or(perm.len());
        let moved = &perm[start..];
        fn gather<T: Copy>(col: &mut [T], start: usize, moved: &[usize]) {
            let out: Vec<T> = moved.iter().map(|&i| col[i]).collect();
            col[start..start + out.len()].copy_from_slice(&out);
        }
        macro_rules! apply {
            ($($c:ident),*) => {{ $(gather(&mut self.$c, start, moved);)* }};
        }
        columns!(apply)
    }

    pub fn is_consistent(&self) -> bool {
        let n = self.len();
        macro_rules! check {
            ($($c:ident),*) => { true $(&& self.$c.len() == n)* };
        }
        columns!(check)
    }
}
