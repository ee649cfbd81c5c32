//! Sort keys and bank permutation for the event pipeline.

use crate::transport::{Event, Particle, ParticleBank};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum SortStrategy {
    #[default]
    None,
    Material,
    Energy,
    MaterialEnergy,
}

impl SortStrategy {
    pub const ALL: [SortStrategy; 4] = [
        SortStrategy::None,
        SortStrategy::Material,
        SortStrategy::Energy,
        SortStrategy::MaterialEnergy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SortStrategy::None => "none",
            SortStrategy::Material => "material",
            SortStrategy::Energy => "energy",
            SortStrategy::MaterialEnergy => "material-energy",
        }
    }

    fn uses_material(self) -> bool {
        matches!(self, SortStrategy::Material | SortStrategy::MaterialEnergy)
    }

    fn uses_energy(self) -> bool {
        matches!(self, SortStrategy::Energy | SortStrategy::MaterialEnergy)
    }
}

impl fmt::Display for SortStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SortStrategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "none" => Ok(SortStrategy::None),
            "material" => Ok(SortStrategy::Material),
            "energy" => Ok(SortStrategy::Energy),
            "material-energy" | "material_energy" => Ok(SortStrategy::MaterialEnergy),
            other => Err(format!(
                "unknown sort strategy `{other}` (expected none, material, energy or material-energy)"
            )),
        }
    }
}

/// Composite key, ordered material first, then energy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct SortKey {
    pub material: u32,
    pub energy_bits: u64,
}

/// Order-preserving map from a float to an unsigned integer.
#[inline]
pub fn energy_bits(energy: f64) -> u64 {
    let b = energy.to_bits();
    if b >> 63 == 1 {
        !b
    } else {
        b | (1 << 63)
    }
}

#[inline]
pub fn key_for(material: u32, energy: f64, strategy: SortStrategy) -> SortKey {
    SortKey {
        material: if strategy.uses_material() { material } else { 0 },
        energy_bits: if strategy.uses_energy() { energy_bits(energy) } else { 0 },
    }
}

pub fn make_key(p: &Particle, strategy: SortStrategy) -> SortKey {
    key_for(p.material, p.energy, strategy)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SortOutcome {
    /// New row `j` holds old row `permutation[j]`.
    pub permutation: Vec<usize>,
    /// Number of live particles, now occupying the leading rows.
    pub alive: usize,
}

impl SortOutcome {
    pub fn is_identity(&self) -> bool {
        self.permutation.iter().enumerate().all(|(j, &i)| i == j)
    }
}

/// Stable sort of live particles by key with dead particles moved to the
/// tail. The permutation equals that of a sequential stable sort.
pub fn sort_bank(bank: &mut ParticleBank, strategy: SortStrategy) -> SortOutcome {
    let n = bank.len();
    sort_prefix(bank, strategy, n)
}

/// [`sort_bank`] restricted to the first `len` rows, for banks whose rows
/// from `len` on are known to be dead. The permutation covers `len` rows.
pub fn sort_prefix(bank: &mut ParticleBank, strategy: SortStrategy, len: usize) -> SortOutcome {
    assert!(len <= bank.len(), "prefix longer than bank");
    let live = |i: usize| bank.event[i] != Event::Done;
    let mut permutation: Vec<usize> = (0..len).filter(|&i| live(i)).collect();
    let alive = permutation.len();
    if strategy != SortStrategy::None {
        let keys: Vec<SortKey> = permutation
            .par_iter()
            .map(|&i| key_for(bank.material[i], bank.energy[i], strategy))
            .collect();
        let mut order: Vec<usize> = (0..alive).collect();
        order.par_sort_by_key(|&j| keys[j]);
        permutation = order.into_iter().map(|j| permutation[j]).collect();
    }
    permutation.extend((0..len).filter(|&i| !live(i)));
    let outcome = SortOutcome { permutation, alive };
    if !outcome.is_identity() {
        bank.permute(&outcome.permutation);
    }
    outcome
}
