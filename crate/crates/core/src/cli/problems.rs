//! Built-in problems and the problem section of configuration files.

use crate::geometry::Pincell;
use crate::nucleardata::{builtin_library, Constituent, Library, Material, Nuclide};
use crate::transport::Problem;
use anyhow::{anyhow, bail, Context, Result};
use serde::Deserialize;
use std::collections::HashMap;
use std::path::Path;
use std::sync::Arc;

pub const BUILTIN_PROBLEMS: [&str; 5] =
    ["pincell-600K", "pincell-900K", "pincell-1200K", "bench-pincell", "infinite-medium"];

/// Pincell dimensions in cm: fuel, gap and clad outer radii, and pitch.
pub const FUEL_RADIUS: f64 = 0.4096;
pub const GAP_RADIUS: f64 = 0.418;
pub const CLAD_RADIUS: f64 = 0.475;
pub const PITCH: f64 = 1.26;

/// Temperature of everything outside the fuel, K.
pub const STRUCTURE_TEMPERATURE: f64 = 600.0;

/// Analytic k-infinity of the `infinite-medium` problem.
pub const INFINITE_MEDIUM_K: f64 = 1.25;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySpec {
    pub pitch: f64,
    #[serde(default)]
    pub radii: Vec<f64>,
    /// Material name per region, innermost first.
    pub regions: Vec<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstituentSpec {
    pub nuclide: String,
    pub density: f32,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialSpec {
    pub name: String,
    pub temperature: f64,
    pub constituents: Vec<ConstituentSpec>,
}

/// Builds a problem from geometry and material blocks.
pub fn assemble(
    name: &str,
    geometry: &GeometrySpec,
    materials: &[MaterialSpec],
    library: Arc<Library>,
    source_region: usize,
) -> Result<Problem> {
    let mut index = HashMap::new();
    let mut built = Vec::with_capacity(materials.len());
    for (i, m) in materials.iter().enumerate() {
        if index.insert(m.name.as_str(), i).is_some() {
            bail!("materials: duplicate material `{}`", m.name);
        }
        let constituents = m
            .constituents
            .iter()
            .map(|c| {
                Ok(Constituent { nuclide: library.require(&c.nuclide)?, density: c.density })
            })
            .collect::<Result<Vec<_>>>()
            .with_context(|| format!("materials: material `{}`", m.name))?;
        built.push(Material::new(m.name.clone(), m.temperature, constituents)?);
    }
    let regions = geometry
        .regions
        .iter()
        .map(|r| index.get(r.as_str()).copied().ok_or_else(|| anyhow!("geometry.regions: unknown material `{r}`")))
        .collect::<Result<Vec<_>>>()?;
    let pincell = Pincell::new(geometry.pitch, geometry.radii.clone(), regions).context("geometry")?;
    let problem = Problem {
        name: name.to_string(),
        geometry: pincell,
        materials: built,
        library,
        source_region,
    };
    problem.validate()?;
    Ok(problem)
}

fn mat(name: &str, temperature: f64, parts: &[(&str, f32)]) -> MaterialSpec {
    MaterialSpec {
        name: name.into(),
        temperature,
        constituents: parts
            .iter()
            .map(|&(n, d)| ConstituentSpec { nuclide: n.into(), density: d })
            .collect(),
    }
}

/// UO2 fuel at about 3% enrichment.
fn fuel(temperature: f64) -> MaterialSpec {
    mat("fuel", temperature, &[("U235", 7.18e-4), ("U238", 2.21e-2), ("O16", 4.57e-2)])
}

fn water() -> MaterialSpec {
    mat("water", STRUCTURE_TEMPERATURE, &[("H1", 4.96e-2), ("O16", 2.48e-2)])
}

/// Reflected UO2 pincell with fuel, gap, clad and water regions.
pub fn pincell(fuel_temperature: f64, library: Arc<Library>) -> Result<Problem> {
    let geometry = GeometrySpec {
        pitch: PITCH,
        radii: vec![FUEL_RADIUS, GAP_RADIUS, CLAD_RADIUS],
        regions: ["fuel", "gap", "clad", "water"].map(String::from).to_vec(),
    };
    let materials = [
        fuel(fuel_temperature),
        // helium-filled gap: a thin gas, modelled with a dilute light nuclide
        mat("gap", STRUCTURE_TEMPERATURE, &[("O16", 1.0e-5)]),
        // zirconium stand-in with a similar scattering cross section
        mat("clad", STRUCTURE_TEMPERATURE, &[("O16", 7.0e-2)]),
        water(),
    ];
    let name = format!("pincell-{}K", fuel_temperature);
    assemble(&name, &geometry, &materials, library, 0)
}

/// Two-material pincell with a hydride fuel, so the fuel holds four nuclides.
pub fn bench_pincell(library: Arc<Library>) -> Result<Problem> {
    let geometry = GeometrySpec {
        pitch: PITCH,
        radii: vec![FUEL_RADIUS],
        regions: ["fuel", "water"].map(String::from).to_vec(),
    };
    let materials = [
        mat(
            "fuel",
            900.0,
            &[("U235", 7.18e-4), ("U238", 2.21e-2), ("O16", 4.57e-2), ("H1", 5.0e-3)],
        ),
        water(),
    ];
    assemble("bench-pincell", &geometry, &materials, library, 0)
}

/// One nuclide with constant cross sections filling a reflected cell:
/// sigma_s = 2, sigma_c = 0.6, sigma_f = 0.4 b and nu = 3.125.
pub fn infinite_medium() -> Result<Problem> {
    let grid = vec![1.0e-5, 3.0e7];
    let nuclide = Nuclide::new("X", 200.0, grid, vec![2.0; 2], vec![0.6; 2], vec![0.4; 2], vec![3.125; 2], vec![])?;
    let mut library = Library::default();
    library.push(nuclide)?;
    let geometry = GeometrySpec { pitch: 10.0, radii: vec![], regions: vec!["medium".into()] };
    let materials = [mat("medium", 300.0, &[("X", 0.05)])];
    assemble("infinite-medium", &geometry, &materials, Arc::new(library), 0)
}

pub fn is_builtin(name: &str) -> bool {
    BUILTIN_PROBLEMS.contains(&name)
}

/// Builds a built-in problem, using `library` in place of the shipped data
/// where the problem uses library nuclides.
pub fn builtin(name: &str, library: Option<Arc<Library>>) -> Result<Problem> {
    let lib = || library.clone().unwrap_or_else(|| Arc::new(builtin_library()));
    match name {
        "pincell-600K" => pincell(600.0, lib()),
        "pincell-900K" => pincell(900.0, lib()),
        "pincell-1200K" => pincell(1200.0, lib()),
        "bench-pincell" => bench_pincell(lib()),
        "infinite-medium" => infinite_medium(),
        other => bail!("unknown problem `{other}`; built-in problems: {}", BUILTIN_PROBLEMS.join(", ")),
    }
}

pub fn load_library(path: &Path) -> Result<Arc<Library>> {
    Ok(Arc::new(Library::load(path).with_context(|| format!("loading library {}", path.display()))?))
}
