//! Sampling kernels: free flights, collision partners, reaction channels,
//! target-at-rest elastic kinematics and the Watt fission spectrum.

use super::TransportError;
use crate::geometry::Vec3;
use crate::nucleardata::{Library, Material, MicroXs};
use crate::rng::Stream;
use std::f64::consts::PI;

/// Watt parameters for thermal fission of U-235: `a` in eV, `b` in 1/eV.
pub const WATT_A: f64 = 0.988e6;
pub const WATT_B: f64 = 2.249e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reaction {
    Elastic,
    Capture,
    Fission,
}

/// Exponential free-flight distance for total cross section `sigma_total` (1/cm).
pub fn sample_flight(sigma_total: f32, xi: f64) -> Result<f64, TransportError> {
    if !(sigma_total > 0.0) {
        return Err(TransportError::NonPositiveTotal(sigma_total));
    }
    Ok(-(1.0 - xi).ln() / sigma_total as f64)
}

/// Picks the constituent a collision happens with, by discrete inverse CDF
/// over `density * sigma_total` in constituent order. Returns the
/// constituent position and its microscopic cross sections.
///
/// `sigma_total` must be the material total at `energy`; the running sum
/// repeats its f32 accumulation, so constituents past the chosen one are
/// never evaluated.
pub fn sample_collision_nuclide(
    material: &Material,
    library: &Library,
    energy: f64,
    sigma_total: f32,
    xi: f64,
) -> Result<(usize, MicroXs), TransportError> {
    if !(sigma_total > 0.0) {
        return Err(TransportError::NonPositiveTotal(sigma_total));
    }
    let target = xi * sigma_total as f64;
    let mut cumulative = 0.0f32;
    let last = material.constituents.len() - 1;
    for (i, c) in material.constituents.iter().enumerate() {
        let m = library.nuclide(c.nuclide).micro_xs(energy, material.temperature)?;
        cumulative += c.density * m.total;
        if target < cumulative as f64 || i == last {
            return Ok((i, m));
        }
    }
    unreachable!("materials have at least one constituent")
}

/// Chooses elastic, capture or fission in proportion to the channel cross sections.
pub fn sample_reaction(micro: &MicroXs, xi: f64) -> Reaction {
    let target = xi * micro.total as f64;
    let scatter = micro.scatter as f64;
    if target < scatter || (micro.capture <= 0.0 && micro.fission <= 0.0) {
        Reaction::Elastic
    } else if target < scatter + micro.capture as f64 || micro.fission <= 0.0 {
        Reaction::Capture
    } else {
        Reaction::Fission
    }
}

/// Elastic scattering off a target at rest, isotropic in the centre of mass.
pub fn elastic_scatter(energy: f64, dir: Vec3, awr: f64, xi1: f64, xi2: f64) -> (f64, Vec3) {
    let mu_cm = 2.0 * xi1 - 1.0;
    let a = awr;
    let q = 1.0 + a * a + 2.0 * a * mu_cm;
    let e_out = energy * q / ((1.0 + a) * (1.0 + a));
    let mu_lab = if q > 0.0 { (1.0 + a * mu_cm) / q.sqrt() } else { 0.0 };
    let phi = 2.0 * PI * xi2;
    (e_out, rotate(dir, mu_lab.clamp(-1.0, 1.0), phi))
}

/// Rotates `dir` by polar cosine `mu` and azimuth `phi`, then renormalizes.
pub fn rotate(dir: Vec3, mu: f64, phi: f64) -> Vec3 {
    let (u, v, w) = (dir.x, dir.y, dir.z);
    let (sin_phi, cos_phi) = phi.sin_cos();
    let a = (1.0 - mu * mu).max(0.0).sqrt();
    let b = (1.0 - w * w).max(0.0).sqrt();
    let out = if b > 1e-10 {
        Vec3::new(
            mu * u + a * (u * w * cos_phi - v * sin_phi) / b,
            mu * v + a * (v * w * cos_phi + u * sin_phi) / b,
            mu * w - a * b * cos_phi,
        )
    } else {
        let b = (1.0 - v * v).max(0.0).sqrt();
        Vec3::new(
            mu * u + a * (u * v * cos_phi + w * sin_phi) / b,
            mu * v - a * b * cos_phi,
            mu * w + a * (v * w * cos_phi - u * sin_phi) / b,
        )
    };
    out.normalized()
}

/// Isotropic unit vector from two draws.
pub fn isotropic(stream: &mut Stream) -> Vec3 {
    let mu = 2.0 * stream.next_f64() - 1.0;
    let phi = 2.0 * PI * stream.next_f64();
    let s = (1.0 - mu * mu).max(0.0).sqrt();
    Vec3::new(s * phi.cos(), mu, s * phi.sin()).normalized()
}

/// Watt spectrum by shifting a Maxwellian sample. Draws falling outside
/// `(0, e_max)` are rejected and redrawn.
pub fn sample_watt(a: f64, b: f64, e_max: f64, stream: &mut Stream) -> f64 {
    loop {
        let r1 = 1.0 - stream.next_f64();
        let r2 = 1.0 - stream.next_f64();
        let c = (PI / 2.0 * stream.next_f64()).cos();
        let maxwell = -a * (r1.ln() + r2.ln() * c * c);
        let e = maxwell + a * a * b / 4.0 + (2.0 * stream.next_f64() - 1.0) * (a * a * b * maxwell).sqrt();
        if e > 0.0 && e < e_max {
            return e;
        }
    }
}
