//! Run configuration: a TOML file with `[geometry]`, `[[materials]]` and
//! `[run]` blocks, overridden by command-line flags.

use super::problems::{self, GeometrySpec, MaterialSpec, BUILTIN_PROBLEMS};
use crate::transport::{Cutoffs, Mode, Problem, RunSettings, TransportError};
use crate::sorting::SortStrategy;
use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    /// Built-in problem name, used when the file has no geometry.
    pub problem: Option<String>,
    pub name: Option<String>,
    /// Nuclear data library, relative to the config file.
    pub library: Option<PathBuf>,
    pub source_region: Option<usize>,
    pub geometry: Option<GeometrySpec>,
    #[serde(default)]
    pub materials: Vec<MaterialSpec>,
    #[serde(default)]
    pub run: RunSpec,
}

/// The `[run]` block. Every field can also be given as a flag.
#[derive(Debug, Clone, Default, PartialEq, Deserialize, clap::Args)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    /// Particles per batch
    #[arg(long)]
    pub particles: Option<usize>,
    /// Total batches
    #[arg(long)]
    pub batches: Option<usize>,
    /// Inactive batches
    #[arg(long)]
    pub inactive: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// history or event
    #[arg(long)]
    pub mode: Option<Mode>,
    /// none, material, energy or material-energy
    #[arg(long)]
    pub sort: Option<SortStrategy>,
    #[arg(long)]
    pub workers: Option<usize>,
    /// Energy cutoff, eV
    #[arg(long)]
    pub energy_cutoff: Option<f64>,
    /// Maximum flights per history
    #[arg(long)]
    pub flight_cutoff: Option<u32>,
    /// Output prefix; writes <prefix>.batches.csv and <prefix>.summary.json
    #[arg(long)]
    pub output: Option<PathBuf>,
}

impl RunSpec {
    /// Fields set in `self` win over `base`.
    pub fn or(self, base: RunSpec) -> RunSpec {
        RunSpec {
            particles: self.particles.or(base.particles),
            batches: self.batches.or(base.batches),
            inactive: self.inactive.or(base.inactive),
            seed: self.seed.or(base.seed),
            mode: self.mode.or(base.mode),
            sort: self.sort.or(base.sort),
            workers: self.workers.or(base.workers),
            energy_cutoff: self.energy_cutoff.or(base.energy_cutoff),
            flight_cutoff: self.flight_cutoff.or(base.flight_cutoff),
            output: self.output.or(base.output),
        }
    }
}

/// Where the problem definition comes from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProblemRef {
    Builtin(String),
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub problem: ProblemRef,
    pub library: Option<PathBuf>,
    pub settings: RunSettings,
    pub output: Option<PathBuf>,
}

pub fn read_config_file(path: &Path) -> Result<ConfigFile> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn relative_to(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.parent().unwrap_or(Path::new(".")).join(p)
    }
}

/// Merges flags over an optional config file and validates the result.
pub fn parse_config(
    config: Option<&Path>,
    problem: Option<&str>,
    library: Option<&Path>,
    flags: RunSpec,
) -> Result<RunConfig> {
    let file = match config {
        Some(p) => Some((p, read_config_file(p)?)),
        None => None,
    };
    let problem = match (problem, &file) {
        (Some(name), _) if problems::is_builtin(name) => ProblemRef::Builtin(name.to_string()),
        (Some(path), _) if Path::new(path).is_file() => ProblemRef::File(PathBuf::from(path)),
        (Some(other), _) => bail!(
            "problem: `{other}` is neither a built-in problem nor a file; built-in problems: {}",
            BUILTIN_PROBLEMS.join(", ")
        ),
        (None, Some((path, f))) if f.geometry.is_some() => ProblemRef::File(path.to_path_buf()),
        (None, Some((_, f))) if f.problem.is_some() => {
            let name = f.problem.clone().unwrap();
            if !problems::is_builtin(&name) {
                bail!("problem: unknown built-in `{name}`; built-in problems: {}", BUILTIN_PROBLEMS.join(", "));
            }
            ProblemRef::Builtin(name)
        }
        _ => bail!("problem: missing; pass --problem or a config file; built-in problems: {}", BUILTIN_PROBLEMS.join(", ")),
    };
    let library = match (library, &file) {
        (Some(p), _) => Some(p.to_path_buf()),
        (None, Some((path, f))) => f.library.as_deref().map(|l| relative_to(path, l)),
        _ => None,
    };
    let spec = match &file {
        Some((_, f)) => flags.or(f.run.clone()),
        None => flags,
    };
    let required = |v: Option<usize>, field: &str| {
        v.with_context(|| format!("{field}: missing required field (set it in [run] or pass --{field})"))
    };
    let defaults = Cutoffs::default();
    let settings = RunSettings {
        particles: required(spec.particles, "particles")?,
        batches: required(spec.batches, "batches")?,
        inactive: required(spec.inactive, "inactive")?,
        seed: spec.seed.unwrap_or(1),
        mode: spec.mode.unwrap_or_default(),
        sort: spec.sort.unwrap_or_default(),
        workers: spec.workers.unwrap_or(1),
        cutoffs: Cutoffs {
            energy: spec.energy_cutoff.unwrap_or(defaults.energy),
            flights: spec.flight_cutoff.unwrap_or(defaults.flights),
        },
    };
    if let Err(TransportError::InvalidSettings { field, reason }) = settings.validate() {
        bail!("{field}: {reason}");
    }
    Ok(RunConfig { problem, library, settings, output: spec.output })
}

/// Builds the problem a config refers to.
pub fn load_problem(config: &RunConfig) -> Result<Problem> {
    let library = match &config.library {
        Some(p) => Some(problems::load_library(p)?),
        None => None,
    };
    match &config.problem {
        ProblemRef::Builtin(name) => problems::builtin(name, library),
        ProblemRef::File(path) => {
            let file = read_config_file(path)?;
            let geometry = file
                .geometry
                .as_ref()
                .with_context(|| format!("{}: geometry: missing block", path.display()))?;
            let library = match (library, &file.library) {
                (Some(l), _) => l,
                (None, Some(l)) => problems::load_library(&relative_to(path, l))?,
                (None, None) => std::sync::Arc::new(crate::nucleardata::builtin_library()),
            };
            let name = file
                .name
                .clone()
                .unwrap_or_else(|| path.file_stem().map_or("problem".into(), |s| s.to_string_lossy().into_owned()));
            problems::assemble(&name, geometry, &file.materials, library, file.source_region.unwrap_or(0))
                .with_context(|| format!("problem file {}", path.display()))
        }
    }
}
