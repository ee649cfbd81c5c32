//! Nuclide libraries: the versioned TOML document format and the built-in
//! four-nuclide set used by the shipped pincell problems.

use super::{Nuclide, Resonance, XsError};
use serde::{Deserialize, Serialize};
use std::path::Path;

pub const FORMAT_NAME: &str = "pinmc-nuclear-library";
pub const FORMAT_VERSION: u32 = 1;

/// Lower and upper end of the built-in energy grids, eV.
pub const GRID_MIN: f64 = 1.0e-5;
pub const GRID_MAX: f64 = 3.0e7;
const POINTS_PER_DECADE: usize = 2000;

/// An immutable-after-load set of nuclides addressed by dense index.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Library {
    nuclides: Vec<Nuclide>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LibraryDoc {
    format: String,
    version: u32,
    #[serde(default)]
    nuclides: Vec<NuclideDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum Column {
    Constant(f32),
    Table(Vec<f32>),
}

impl Column {
    fn expand(self, n: usize) -> Vec<f32> {
        match self {
            Column::Constant(v) => vec![v; n],
            Column::Table(v) => v,
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NuclideDoc {
    name: String,
    awr: f64,
    energy: Vec<f64>,
    scatter: Column,
    capture: Column,
    #[serde(default = "zero_column")]
    fission: Column,
    #[serde(default = "zero_column")]
    nu: Column,
    #[serde(default)]
    resonances: Vec<Resonance>,
}

fn zero_column() -> Column {
    Column::Constant(0.0)
}

impl Library {
    /// Appends a nuclide and returns its index. Names must be unique.
    pub fn push(&mut self, nuclide: Nuclide) -> Result<usize, XsError> {
        if self.index_of(nuclide.name()).is_some() {
            return Err(XsError::InvalidNuclide {
                nuclide: nuclide.name().to_string(),
                reason: "duplicate name in library".into(),
            });
        }
        self.nuclides.push(nuclide);
        Ok(self.nuclides.len() - 1)
    }

    pub fn nuclide(&self, index: usize) -> &Nuclide {
        &self.nuclides[index]
    }

    pub fn nuclides(&self) -> &[Nuclide] {
        &self.nuclides
    }

    pub fn len(&self) -> usize {
        self.nuclides.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nuclides.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.nuclides.iter().position(|n| n.name() == name)
    }

    pub fn require(&self, name: &str) -> Result<usize, XsError> {
        self.index_of(name)
            .ok_or_else(|| XsError::UnknownNuclide(name.to_string()))
    }

    pub fn from_toml_str(text: &str) -> Result<Self, XsError> {
        let doc: LibraryDoc = toml::from_str(text).map_err(|e| XsError::Format(e.to_string()))?;
        if doc.format != FORMAT_NAME {
            return Err(XsError::Format(format!(
                "expected format \"{FORMAT_NAME}\", found \"{}\"",
                doc.format
            )));
        }
        if doc.version != FORMAT_VERSION {
            return Err(XsError::Format(format!(
                "unsupported version {} (this build reads {FORMAT_VERSION})",
                doc.version
            )));
        }
        let mut lib = Library::default();
        for n in doc.nuclides {
            let len = n.energy.len();
            lib.push(Nuclide::new(
                n.name,
                n.awr,
                n.energy,
                n.scatter.expand(len),
                n.capture.expand(len),
                n.fission.expand(len),
                n.nu.expand(len),
                n.resonances,
            )?)?;
        }
        Ok(lib)
    }

    pub fn to_toml_string(&self) -> String {
        let doc = LibraryDoc {
            format: FORMAT_NAME.to_string(),
            version: FORMAT_VERSION,
            nuclides: self
                .nuclides
                .iter()
                .map(|n| NuclideDoc {
                    name: n.name().to_string(),
                    awr: n.awr(),
                    energy: n.energy().to_vec(),
                    scatter: Column::Table(n.scatter().to_vec()),
                    capture: Column::Table(n.capture().to_vec()),
                    fission: Column::Table(n.fission().to_vec()),
                    nu: Column::Table(n.nu().to_vec()),
                    resonances: n.resonances().to_vec(),
                })
                .collect(),
        };
        toml::to_string(&doc).expect("library documents always serialize")
    }

    pub fn load(path: &Path) -> Result<Self, XsError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| XsError::Format(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }
}

/// Log-uniform grid shared by the built-in nuclides.
pub fn builtin_grid() -> Vec<f64> {
    let decades = (GRID_MAX / GRID_MIN).log10();
    let n = (decades * POINTS_PER_DECADE as f64).ceil() as usize;
    let mut grid: Vec<f64> = (0..=n)
        .map(|i| GRID_MIN * (GRID_MAX / GRID_MIN).powf(i as f64 / n as f64))
        .collect();
    grid[0] = GRID_MIN;
    grid[n] = GRID_MAX;
    grid
}

fn tabulate(grid: &[f64], f: impl Fn(f64) -> f64) -> Vec<f32> {
    grid.iter().map(|&e| f(e) as f32).collect()
}

fn one_over_v(thermal: f64, e: f64) -> f64 {
    thermal * (0.0253 / e).sqrt()
}

/// s-wave ladder of the resonant absorber: `(E0, Gamma_n, Gamma_gamma)` in eV,
/// close to U-238 up to about 0.7 keV.
const U238_LADDER: [(f64, f64, f64); 25] = [
    (6.674, 1.493e-3, 0.0230),
    (20.87, 1.009e-2, 0.0229),
    (36.68, 3.354e-2, 0.0229),
    (66.03, 2.463e-2, 0.0233),
    (80.75, 1.865e-3, 0.0234),
    (102.56, 7.17e-2, 0.0246),
    (116.9, 2.55e-2, 0.0230),
    (165.3, 3.4e-3, 0.0230),
    (189.7, 1.71e-1, 0.0230),
    (208.5, 5.1e-2, 0.0230),
    (237.4, 2.68e-2, 0.0230),
    (273.7, 2.5e-2, 0.0230),
    (291.0, 1.7e-2, 0.0230),
    (347.8, 8.1e-2, 0.0230),
    (397.6, 8.8e-3, 0.0230),
    (410.2, 2.1e-2, 0.0230),
    (434.0, 1.2e-2, 0.0230),
    (463.0, 5.1e-3, 0.0230),
    (478.6, 4.5e-2, 0.0230),
    (518.1, 4.9e-2, 0.0230),
    (535.3, 4.1e-2, 0.0230),
    (580.2, 3.1e-2, 0.0230),
    (595.0, 8.8e-2, 0.0230),
    (619.9, 3.0e-2, 0.0230),
    (661.2, 1.35e-1, 0.0230),
];

/// The shipped library: hydrogen, oxygen, a fissile uranium and a resonant
/// uranium absorber. Backgrounds are smooth analytic shapes tabulated on a
/// fine log grid; resonances are kept as parameters.
pub fn builtin_library() -> Library {
    let grid = builtin_grid();
    let n = grid.len();
    let mut lib = Library::default();

    let h1 = Nuclide::new(
        "H1",
        0.9992,
        grid.clone(),
        tabulate(&grid, |e| 20.4 / (1.0 + (e / 1.5e5).powf(0.85))),
        tabulate(&grid, |e| one_over_v(0.332, e)),
        vec![0.0; n],
        vec![0.0; n],
        vec![],
    );
    let o16 = Nuclide::new(
        "O16",
        15.858,
        grid.clone(),
        tabulate(&grid, |e| 3.8 / (1.0 + e / 5.0e6)),
        tabulate(&grid, |e| one_over_v(1.9e-4, e)),
        vec![0.0; n],
        vec![0.0; n],
        vec![],
    );
    let u235 = Nuclide::new(
        "U235",
        233.0248,
        grid.clone(),
        tabulate(&grid, |e| 4.5 + 9.5 / (1.0 + e / 2.0e5)),
        tabulate(&grid, |e| one_over_v(98.8, e) + 0.1 / (1.0 + e / 1.0e6)),
        tabulate(&grid, |e| one_over_v(585.0, e) + 1.2 * e / (e + 1.0e5)),
        tabulate(&grid, |e| 2.43 + 0.13e-6 * e),
        vec![Resonance {
            energy: 8.77,
            neutron_width: 1.0e-3,
            capture_width: 0.035,
            fission_width: 0.1,
            spin_factor: 0.5,
        }],
    );
    let u238 = Nuclide::new(
        "U238",
        236.0058,
        grid.clone(),
        tabulate(&grid, |e| 4.5 + 4.5 / (1.0 + e / 5.0e5)),
        tabulate(&grid, |e| one_over_v(2.68, e)),
        tabulate(&grid, |e| 0.55 / (1.0 + (-(e - 1.5e6) / 2.0e5).exp())),
        tabulate(&grid, |e| 2.3 + 0.15e-6 * e),
        U238_LADDER
            .iter()
            .map(|&(energy, neutron_width, capture_width)| Resonance {
                energy,
                neutron_width,
                capture_width,
                fission_width: 0.0,
                spin_factor: 1.0,
            })
            .collect(),
    );
    for nuc in [h1, o16, u235, u238] {
        lib.push(nuc.expect("built-in nuclide data is valid"))
            .expect("built-in names are unique");
    }
    lib
}
