//! Command-line front end: `run`, `bench`, `compare` and `xs-dump`.

pub mod bench;
pub mod config;
pub mod problems;
pub mod results;

use crate::nucleardata::builtin_library;
use crate::tally::RunResult;
use crate::transport::{power_iteration, Mode, Problem};
use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use config::{load_problem, parse_config, RunConfig, RunSpec};
use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Debug, Parser)]
#[command(name = "pinmc", version, about = "Monte Carlo k-eigenvalue transport for reflected pincells")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run power iteration and write results
    Run(RunArgs),
    /// Compare event-pipeline throughput across sorting strategies
    Bench(BenchArgs),
    /// Doppler coefficient between two results files
    Compare(CompareArgs),
    /// Tabulate a nuclide's cross sections at a temperature
    XsDump(XsDumpArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Config file with [geometry], [[materials]] and [run] blocks
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Built-in problem name or problem file
    #[arg(long)]
    pub problem: Option<String>,
    /// Nuclear data library file (defaults to the built-in library)
    #[arg(long)]
    pub library: Option<PathBuf>,
    #[command(flatten)]
    pub run: RunSpec,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub base: RunArgs,
    /// Runs per strategy; the best throughput is kept
    #[arg(long, default_value_t = 1)]
    pub repeats: usize,
    /// Also write the table to this file
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Results summary (or output prefix) of the first run
    pub first: PathBuf,
    /// Results summary (or output prefix) of the second run
    pub second: PathBuf,
    /// Print JSON instead of a text line
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct XsDumpArgs {
    #[arg(long)]
    pub nuclide: String,
    /// Temperature, K
    #[arg(long)]
    pub temperature: f64,
    #[arg(long)]
    pub library: Option<PathBuf>,
    /// Lowest energy, eV (defaults to the nuclide's grid minimum)
    #[arg(long)]
    pub emin: Option<f64>,
    /// Highest energy, eV (defaults to the nuclide's grid maximum)
    #[arg(long)]
    pub emax: Option<f64>,
    /// Log-spaced points
    #[arg(long, default_value_t = 2000)]
    pub points: usize,
    /// Output file (defaults to stdout)
    #[arg(long)]
    pub output: Option<PathBuf>,
}

impl RunArgs {
    pub fn config(self) -> Result<RunConfig> {
        parse_config(self.config.as_deref(), self.problem.as_deref(), self.library.as_deref(), self.run)
    }
}

/// Runs the configured problem and writes its results files.
pub fn execute_run(config: &RunConfig) -> Result<(Problem, RunResult, results::Summary)> {
    let problem = load_problem(config)?;
    let result = power_iteration(&problem, &config.settings)?;
    let summary = results::summarize(config, &problem, &result);
    let prefix = config.output.clone().unwrap_or_else(|| PathBuf::from(&problem.name));
    results::write_results(&prefix, &summary, &result)?;
    Ok((problem, result, summary))
}

pub fn xs_dump(args: &XsDumpArgs) -> Result<String> {
    let library = match &args.library {
        Some(p) => crate::nucleardata::Library::load(p)?,
        None => builtin_library(),
    };
    let nuclide = library.nuclide(library.require(&args.nuclide)?);
    let (lo, hi) = nuclide.energy_span();
    let emin = args.emin.unwrap_or(lo);
    let emax = args.emax.unwrap_or(hi);
    if !(emin > 0.0 && emin < emax) {
        bail!("emin/emax: need 0 < emin < emax, got {emin} and {emax}");
    }
    if args.points < 2 {
        bail!("points: need at least 2");
    }
    let mut out = String::from("energy_ev,sigma_s,sigma_gamma,sigma_f\n");
    for i in 0..args.points {
        let f = i as f64 / (args.points - 1) as f64;
        let e = if i + 1 == args.points { emax } else { emin * (emax / emin).powf(f) };
        let point = nuclide.sigma_pointwise(e)?;
        let (capture, fission) = nuclide.sigma_resonant(e, args.temperature)?;
        out.push_str(&format!("{e:.8e},{:.8e},{capture:.8e},{fission:.8e}\n", point.scatter));
    }
    Ok(out)
}

fn write_or_print(path: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => Ok(out.write_all(text.as_bytes())?),
    }
}

/// Executes a parsed command line, writing human-readable output to `out`.
pub fn dispatch(cli: Cli, out: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Run(args) => {
            let config = args.config()?;
            let (_, result, _) = execute_run(&config)?;
            writeln!(out, "{}", results::summary_line(&result))?;
            if result.stream_overflows > 0 {
                writeln!(out, "warning: {} histories overran their random stream window", result.stream_overflows)?;
            }
        }
        Command::Bench(args) => {
            let mut base = args.base;
            if base.config.is_none() && base.problem.is_none() {
                base.problem = Some("bench-pincell".into());
            }
            let mut config = base.config()?;
            config.settings.mode = Mode::Event;
            let problem = load_problem(&config)?;
            let rows = bench::bench(&problem, &config.settings, args.repeats)?;
            let csv = bench::bench_csv(&rows);
            out.write_all(csv.as_bytes())?;
            if let Some(p) = &args.csv {
                std::fs::write(p, &csv).with_context(|| format!("writing {}", p.display()))?;
            }
        }
        Command::Compare(args) => {
            let a = results::read_summary(&args.first)?;
            let b = results::read_summary(&args.second)?;
            let c = results::compare(&a, &b)?;
            if args.json {
                writeln!(out, "{}", serde_json::to_string_pretty(&c)?)?;
            } else {
                writeln!(out, "{}", c.line())?;
            }
        }
        Command::XsDump(args) => {
            let csv = xs_dump(&args)?;
            write_or_print(args.output.as_deref(), &csv, out)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_table_iv_command_line() {
        let cli = Cli::try_parse_from([
            "pinmc", "run", "--problem", "pincell-600K", "--particles", "131072", "--batches", "1200", "--inactive",
            "200",
        ])
        .unwrap();
        let Command::Run(args) = cli.command else { panic!("expected run") };
        let c = args.config().unwrap();
        assert_eq!((c.settings.particles, c.settings.batches, c.settings.inactive), (131_072, 1200, 200));
    }

    #[test]
    fn rejects_bad_sort_name() {
        assert!(Cli::try_parse_from(["pinmc", "run", "--sort", "fastest"]).is_err());
        let cli = Cli::try_parse_from(["pinmc", "run", "--sort", "material-energy", "--mode", "event"]).unwrap();
        let Command::Run(args) = cli.command else { panic!() };
        assert_eq!(args.run.sort, Some(crate::sorting::SortStrategy::MaterialEnergy));
    }

    #[test]
    fn xs_dump_columns() {
        let args = XsDumpArgs {
            nuclide: "U238".into(),
            temperature: 900.0,
            library: None,
            emin: Some(1.0),
            emax: Some(100.0),
            points: 50,
            output: None,
        };
        let csv = xs_dump(&args).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "energy_ev,sigma_s,sigma_gamma,sigma_f");
        assert_eq!(lines.len(), 51);
        assert!(lines[1].starts_with("1.00000000e0,"));
    }
}
