//! Nuclide cross sections and their on-the-fly temperature treatment.
//!
//! Each nuclide carries a smooth 0 K point-wise background on its own
//! energy grid plus a list of single-level Breit-Wigner resonances. The
//! resonances are Doppler broadened analytically at lookup time through the
//! psi line shape, so any material temperature can be served without
//! pre-broadened tables.

mod faddeeva;
pub mod library;
pub mod sigma1;

pub use faddeeva::faddeeva_w;
pub use library::{builtin_library, Library};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Boltzmann constant in eV/K.
pub const BOLTZMANN_EV: f64 = 8.617_333_262e-5;

/// SLBW peak constant in barn eV.
pub const SLBW_PEAK_CONSTANT: f64 = 2.608e6;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum XsError {
    #[error("energy {energy} eV outside the grid of nuclide {nuclide} [{min}, {max}] eV")]
    OutOfRange {
        nuclide: String,
        energy: f64,
        min: f64,
        max: f64,
    },
    #[error("temperature must be non-negative, got {0} K")]
    InvalidTemperature(f64),
    #[error("invalid nuclide {nuclide}: {reason}")]
    InvalidNuclide { nuclide: String, reason: String },
    #[error("invalid resonance: {0}")]
    InvalidResonance(String),
    #[error("invalid material {material}: {reason}")]
    InvalidMaterial { material: String, reason: String },
    #[error("unknown nuclide {0}")]
    UnknownNuclide(String),
    #[error("library document: {0}")]
    Format(String),
    #[error("quadrature did not converge at E = {energy} eV")]
    Quadrature { energy: f64 },
}

/// One single-level Breit-Wigner resonance. Widths in eV.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Resonance {
    pub energy: f64,
    pub neutron_width: f64,
    pub capture_width: f64,
    #[serde(default)]
    pub fission_width: f64,
    pub spin_factor: f64,
}

impl Resonance {
    pub fn new(
        energy: f64,
        neutron_width: f64,
        capture_width: f64,
        fission_width: f64,
        spin_factor: f64,
    ) -> Result<Self, XsError> {
        let r = Resonance {
            energy,
            neutron_width,
            capture_width,
            fission_width,
            spin_factor,
        };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<(), XsError> {
        let bad = |msg: &str| Err(XsError::InvalidResonance(format!("{msg} ({self:?})")));
        if !(self.energy > 0.0) {
            return bad("resonance energy must be positive");
        }
        if !(self.neutron_width > 0.0) {
            return bad("neutron width must be positive");
        }
        if !(self.capture_width >= 0.0 && self.fission_width >= 0.0) {
            return bad("widths must be non-negative");
        }
        if !(self.spin_factor > 0.0 && self.spin_factor <= 1.0) {
            return bad("spin factor must lie in (0, 1]");
        }
        Ok(())
    }

    pub fn total_width(&self) -> f64 {
        self.neutron_width + self.capture_width + self.fission_width
    }

    /// Peak total cross section `sigma_0` in barns.
    pub fn peak(&self) -> f64 {
        SLBW_PEAK_CONSTANT * self.spin_factor * (self.neutron_width / self.total_width())
            / self.energy
    }

    /// Doppler width in eV for a target of mass ratio `awr` at `temperature` K.
    pub fn doppler_width(&self, temperature: f64, awr: f64) -> f64 {
        (4.0 * self.energy * BOLTZMANN_EV * temperature / awr).sqrt()
    }

    /// Broadened capture and fission contributions in barns at `energy`.
    /// A temperature of exactly zero gives the unbroadened Lorentzian.
    ///
    /// The 0 K shape `sqrt(E0/E) / (1 + x^2)` is broadened with the exact
    /// free-gas kernel by splitting it over the complex pole pair
    /// `+-p`, `p^2 = E0 + i Gamma/2`, in `sqrt(E)` space. Each pole gives one
    /// Faddeeva evaluation; near the peak the result reduces to `psi(xi, x)`
    /// with `xi = Gamma / Delta`.
    pub fn evaluate(&self, energy: f64, temperature: f64, awr: f64) -> (f64, f64) {
        Line::new(self).evaluate(energy, thermal_speed(temperature, awr))
    }
}

/// `sqrt(kT/A)`, the Doppler spread in `sqrt(E)` space.
fn thermal_speed(temperature: f64, awr: f64) -> f64 {
    (BOLTZMANN_EV * temperature / awr).sqrt()
}

/// A resonance with its energy-independent factors worked out once.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Line {
    energy: f64,
    root_energy: f64,
    gamma: f64,
    pole: Complex64,
    capture_peak: f64,
    fission_peak: f64,
}

impl Line {
    fn new(r: &Resonance) -> Self {
        let gamma = r.total_width();
        // principal root of E0 + i Gamma/2, without the polar round trip
        let (a, b) = (r.energy, gamma / 2.0);
        let re = (0.5 * ((a * a + b * b).sqrt() + a)).sqrt();
        Line {
            energy: r.energy,
            root_energy: r.energy.sqrt(),
            gamma,
            pole: Complex64::new(re, b / (2.0 * re)),
            capture_peak: r.peak() * r.capture_width / gamma,
            fission_peak: r.peak() * r.fission_width / gamma,
        }
    }

    /// `beta` of zero gives the unbroadened Lorentzian.
    #[inline]
    fn evaluate(&self, energy: f64, beta: f64) -> (f64, f64) {
        let shape = if beta == 0.0 {
            let x = 2.0 * (energy - self.energy) / self.gamma;
            self.root_energy / energy.sqrt() / (1.0 + x * x)
        } else {
            let y = energy.sqrt();
            let near = faddeeva_w((self.pole - y) / beta);
            let far = faddeeva_w((-self.pole.conj() - y) / beta);
            self.root_energy * PI.sqrt() * self.gamma / (4.0 * beta * energy) * (near.re - far.re)
        };
        (self.capture_peak * shape, self.fission_peak * shape)
    }
}

/// The psi and chi line-shape functions at Doppler ratio `xi` and reduced
/// energy `x`.
pub fn psi_chi(xi: f64, x: f64) -> (f64, f64) {
    let z = Complex64::new(x * xi / 2.0, xi / 2.0);
    let w = faddeeva_w(z);
    let root_pi = PI.sqrt();
    let psi = (xi * root_pi / 2.0 * w.re).max(0.0);
    let chi = xi * root_pi * w.im;
    (psi, chi)
}

/// Point-wise values from the background tables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointXs {
    pub scatter: f32,
    pub capture: f32,
    pub fission: f32,
    pub nu: f32,
}

/// Microscopic cross sections in barns at one (energy, temperature).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MicroXs {
    pub total: f32,
    pub scatter: f32,
    pub capture: f32,
    pub fission: f32,
    pub nu: f32,
}

impl MicroXs {
    pub fn absorb(&self) -> f32 {
        self.capture + self.fission
    }
}

/// Macroscopic cross sections in 1/cm.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MacroXs {
    pub total: f32,
    pub scatter: f32,
    pub absorb: f32,
    pub fission: f32,
    pub nu_fission: f32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Nuclide {
    name: String,
    awr: f64,
    energy: Vec<f64>,
    scatter: Vec<f32>,
    capture: Vec<f32>,
    fission: Vec<f32>,
    nu: Vec<f32>,
    resonances: Vec<Resonance>,
    lines: Vec<Line>,
}

impl Nuclide {
    pub fn new(
        name: impl Into<String>,
        awr: f64,
        energy: Vec<f64>,
        scatter: Vec<f32>,
        capture: Vec<f32>,
        fission: Vec<f32>,
        nu: Vec<f32>,
        resonances: Vec<Resonance>,
    ) -> Result<Self, XsError> {
        let nuc = Nuclide {
            name: name.into(),
            awr,
            energy,
            scatter,
            capture,
            fission,
            nu,
            lines: resonances.iter().map(Line::new).collect(),
            resonances,
        };
        nuc.validate()?;
        Ok(nuc)
    }

    fn validate(&self) -> Result<(), XsError> {
        let bad = |reason: String| {
            Err(XsError::InvalidNuclide {
                nuclide: self.name.clone(),
                reason,
            })
        };
        if !(self.awr >= 0.9) {
            return bad(format!("mass ratio {} below 0.9", self.awr));
        }
        let n = self.energy.len();
        if n < 2 {
            return bad("energy grid needs at least two points".into());
        }
        if !self.energy.iter().all(|&e| e > 0.0 && e.is_finite()) {
            return bad("energies must be positive and finite".into());
        }
        if !self.energy.windows(2).all(|w| w[0] < w[1]) {
            return bad("energy grid must be strictly increasing".into());
        }
        for (label, col) in [
            ("scatter", &self.scatter),
            ("capture", &self.capture),
            ("fission", &self.fission),
            ("nu", &self.nu),
        ] {
            if col.len() != n {
                return bad(format!("{label} has {} values for {n} energies", col.len()));
            }
            if !col.iter().all(|&v| v >= 0.0 && v.is_finite()) {
                return bad(format!("{label} values must be non-negative"));
            }
        }
        for r in &self.resonances {
            r.validate()?;
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn awr(&self) -> f64 {
        self.awr
    }

    pub fn energy(&self) -> &[f64] {
        &self.energy
    }

    pub fn scatter(&self) -> &[f32] {
        &self.scatter
    }

    pub fn capture(&self) -> &[f32] {
        &self.capture
    }

    pub fn fission(&self) -> &[f32] {
        &self.fission
    }

    pub fn nu(&self) -> &[f32] {
        &self.nu
    }

    pub fn resonances(&self) -> &[Resonance] {
        &self.resonances
    }

    pub fn energy_span(&self) -> (f64, f64) {
        (self.energy[0], self.energy[self.energy.len() - 1])
    }

    fn out_of_range(&self, energy: f64) -> XsError {
        let (min, max) = self.energy_span();
        XsError::OutOfRange {
            nuclide: self.name.clone(),
            energy,
            min,
            max,
        }
    }

    /// Lin-lin interpolation of the background tables. Exact at grid nodes.
    pub fn sigma_pointwise(&self, energy: f64) -> Result<PointXs, XsError> {
        let n = self.energy.len();
        let (min, max) = self.energy_span();
        if !(energy >= min && energy <= max) {
            return Err(self.out_of_range(energy));
        }
        let i = self.energy.partition_point(|&e| e <= energy) - 1;
        if i == n - 1 || self.energy[i] == energy {
            return Ok(self.node(i));
        }
        let f = ((energy - self.energy[i]) / (self.energy[i + 1] - self.energy[i])) as f32;
        let lerp = |col: &[f32]| col[i] + f * (col[i + 1] - col[i]);
        Ok(PointXs {
            scatter: lerp(&self.scatter),
            capture: lerp(&self.capture),
            fission: lerp(&self.fission),
            nu: lerp(&self.nu),
        })
    }

    fn node(&self, i: usize) -> PointXs {
        PointXs {
            scatter: self.scatter[i],
            capture: self.capture[i],
            fission: self.fission[i],
            nu: self.nu[i],
        }
    }

    /// Sum of all broadened resonance contributions `(capture, fission)` in barns.
    pub fn resonance_xs(&self, energy: f64, temperature: f64) -> (f64, f64) {
        let beta = thermal_speed(temperature, self.awr);
        self.lines.iter().fold((0.0, 0.0), |(c, f), line| {
            let (dc, df) = line.evaluate(energy, beta);
            (c + dc, f + df)
        })
    }


    /// Capture and fission in barns at `temperature`: broadened resonances plus
    /// the 0 K background.
    pub fn sigma_resonant(&self, energy: f64, temperature: f64) -> Result<(f64, f64), XsError> {
        if !(temperature >= 0.0) {
            return Err(XsError::InvalidTemperature(temperature));
        }
        let bg = self.sigma_pointwise(energy)?;
        let (c, f) = self.resonance_xs(energy, temperature);
        Ok((c + bg.capture as f64, f + bg.fission as f64))
    }

    /// Single-precision lookup used during transport.
    pub fn micro_xs(&self, energy: f64, temperature: f64) -> Result<MicroXs, XsError> {
        let bg = self.sigma_pointwise(energy)?;
        let (capture, fission) = if self.resonances.is_empty() {
            (bg.capture, bg.fission)
        } else {
            let (c, f) = self.resonance_xs(energy, temperature);
            ((c + bg.capture as f64) as f32, (f + bg.fission as f64) as f32)
        };
        Ok(MicroXs {
            total: bg.scatter + capture + fission,
            scatter: bg.scatter,
            capture,
            fission,
            nu: bg.nu,
        })
    }
}

/// One constituent of a material: index into the library plus number density
/// in atoms/(barn cm).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constituent {
    pub nuclide: usize,
    pub density: f32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Material {
    pub name: String,
    pub temperature: f64,
    pub constituents: Vec<Constituent>,
}

impl Material {
    pub fn new(
        name: impl Into<String>,
        temperature: f64,
        constituents: Vec<Constituent>,
    ) -> Result<Self, XsError> {
        let m = Material {
            name: name.into(),
            temperature,
            constituents,
        };
        let bad = |reason: &str| {
            Err(XsError::InvalidMaterial {
                material: m.name.clone(),
                reason: reason.into(),
            })
        };
        if m.constituents.is_empty() {
            return bad("needs at least one constituent");
        }
        if !m.constituents.iter().all(|c| c.density > 0.0 && c.density.is_finite()) {
            return bad("densities must be positive");
        }
        if !(m.temperature > 0.0 && m.temperature.is_finite()) {
            return bad("temperature must be positive");
        }
        Ok(m)
    }

    /// Macroscopic cross sections at `energy`, summed in constituent order.
    pub fn macro_xs(&self, library: &Library, energy: f64) -> Result<MacroXs, XsError> {
        let mut out = MacroXs::default();
        for c in &self.constituents {
            let micro = library.nuclide(c.nuclide).micro_xs(energy, self.temperature)?;
            out.total += c.density * micro.total;
            out.scatter += c.density * micro.scatter;
            out.absorb += c.density * micro.absorb();
            out.fission += c.density * micro.fission;
            out.nu_fission += c.density * (micro.nu * micro.fission);
        }
        Ok(out)
    }
}
