//! Acceptance run. Prints one PASS/FAIL line per criterion and exits non-zero
//! if any criterion fails.

use clap::Parser;
use pinmc::cli::{bench, dispatch, problems, Cli};
use pinmc::nucleardata::{builtin_library, sigma1, Nuclide, BOLTZMANN_EV};
use pinmc::rng::{origin, RngState, Stream};
use pinmc::sorting::SortStrategy;
use pinmc::tally::{doppler_coefficient, format_uncertain, parse_uncertain};
use pinmc::transport::{physics, power_iteration, Mode, RunSettings};
use pinmc_acceptance::Report;
use std::path::{Path, PathBuf};
use std::time::Instant;

type Outcome = Result<(bool, String), Box<dyn std::error::Error + Send + Sync>>;

const ORACLE_TOLERANCE: f64 = 5e-3;
const FIXED_POINT_TOLERANCE: f64 = 1e-3;
const INFINITE_K: f64 = 1.25;
const INFINITE_SIGMA_MAX: f64 = 5e-4;
const ALPHA_MIN: f64 = 0.5;
const ALPHA_MAX: f64 = 10.0;
const REFERENCE_ALPHA: f64 = -2.430;
const REFERENCE_ALPHA_TOLERANCE: f64 = 1e-3;
const SKIP_DISTANCE: u64 = 10_000_000;
const NORMALIZATION_TOLERANCE: f64 = 1e-6;
const WATT_MEAN_TOLERANCE: f64 = 1e-2;

/// Stream overruns seen by every transport run in this process.
#[derive(Default)]
struct Overruns {
    runs: usize,
    total: u64,
}

impl Overruns {
    fn add(&mut self, n: u64) {
        self.runs += 1;
        self.total += n;
    }
}

fn run_cli(args: &[&str]) -> Result<String, Box<dyn std::error::Error + Send + Sync>> {
    let cli = Cli::try_parse_from(std::iter::once("pinmc").chain(args.iter().copied()))?;
    let mut out = Vec::new();
    dispatch(cli, &mut out)?;
    Ok(String::from_utf8(out)?)
}

/// Dense 0 K grid: log background plus uniform patches resolving each
/// resonance at its natural width.
fn zero_kelvin_grid(nuc: &Nuclide, lo: f64, hi: f64, t_max: f64) -> Vec<f64> {
    let mut grid: Vec<f64> = (0..=6000).map(|i| lo * (hi / lo).powf(i as f64 / 6000.0)).collect();
    for r in nuc.resonances() {
        let gamma = r.total_width();
        let half = 60.0 * gamma + 12.0 * r.doppler_width(t_max, nuc.awr());
        let step = gamma / 40.0;
        let n = (2.0 * half / step).ceil() as usize;
        grid.extend((0..=n).map(|i| r.energy - half + step * i as f64));
    }
    grid.retain(|&e| e >= lo && e <= hi);
    grid.sort_by(f64::total_cmp);
    grid.dedup_by(|a, b| (*a - *b).abs() < 1e-12 * *b);
    grid
}

fn oracle_agreement() -> Outcome {
    let lib = builtin_library();
    let temperatures = [600.0, 900.0, 1200.0];
    let mut worst: (f64, String) = (0.0, String::new());
    let mut checked = 0usize;
    let mut resonances = 0usize;
    for nuc in lib.nuclides().iter().filter(|n| !n.resonances().is_empty()) {
        resonances += nuc.resonances().len();
        let e0: Vec<f64> = nuc.resonances().iter().map(|r| r.energy).collect();
        let lo = e0.iter().copied().fold(f64::INFINITY, f64::min) * 0.25;
        let hi = e0.iter().copied().fold(0.0, f64::max) * 2.0;
        let (span_lo, span_hi) = nuc.energy_span();
        let (lo, hi) = (lo.max(span_lo), hi.min(span_hi));
        let grid = zero_kelvin_grid(nuc, lo, hi, 1200.0);
        let cold = grid
            .iter()
            .map(|&e| nuc.sigma_resonant(e, 0.0).map(|(c, f)| c + f))
            .collect::<Result<Vec<f64>, _>>()?;
        let mut points: Vec<f64> = Vec::new();
        for r in nuc.resonances() {
            let half = 20.0 * r.total_width() + 6.0 * r.doppler_width(1200.0, nuc.awr());
            points.extend((0..800).map(|i| r.energy - half + 2.0 * half * i as f64 / 799.0));
        }
        let (a, b) = (lo * 2.0, hi / 1.5);
        points.extend((0..400).map(|i| a * (b / a).powf(i as f64 / 399.0)));
        points.retain(|&e| e > lo * 1.5 && e < hi / 1.2);
        for t in temperatures {
            for &e in &points {
                let (c, f) = nuc.sigma_resonant(e, t)?;
                let analytic = c + f;
                if analytic <= 1.0 {
                    continue;
                }
                let exact = sigma1::broaden_at(&grid, &cold, t, nuc.awr(), e)?;
                let rel = (analytic - exact).abs() / exact;
                checked += 1;
                if rel > worst.0 {
                    worst = (rel, format!("{} at {e:.4} eV, {t} K", nuc.name()));
                }
            }
        }
    }
    Ok((
        worst.0 < ORACLE_TOLERANCE && checked > 0,
        format!(
            "{resonances} resonances, {checked} points with sigma > 1 b, worst {:.2e} ({}) vs {ORACLE_TOLERANCE}",
            worst.0, worst.1
        ),
    ))
}

fn oracle_fixed_points() -> Outcome {
    let grid: Vec<f64> = (0..800).map(|i| 1e-4 * (1e8f64).powf(i as f64 / 799.0)).collect();
    let constant = vec![7.0; grid.len()];
    let one_over_v: Vec<f64> = grid.iter().map(|e| 10.0 / e.sqrt()).collect();
    let mut worst_const: f64 = 0.0;
    let mut worst_inv: f64 = 0.0;
    for awr in [1.0, 16.0, 238.0] {
        for t in [300.0, 600.0, 900.0, 1200.0] {
            let kt = BOLTZMANN_EV * t / awr;
            let c = sigma1::broaden(&grid, &constant, t, awr)?;
            let v = sigma1::broaden(&grid, &one_over_v, t, awr)?;
            for i in 0..grid.len() {
                let e = grid[i];
                if e > 5e3 {
                    continue;
                }
                if e > 1000.0 * kt {
                    worst_const = worst_const.max((c[i] - 7.0).abs() / 7.0);
                }
                if e > 100.0 * kt {
                    worst_inv = worst_inv.max((v[i] - one_over_v[i]).abs() / one_over_v[i]);
                }
            }
        }
    }
    Ok((
        worst_const < FIXED_POINT_TOLERANCE && worst_inv < FIXED_POINT_TOLERANCE,
        format!("constant worst {worst_const:.2e}, 1/v worst {worst_inv:.2e} vs {FIXED_POINT_TOLERANCE}"),
    ))
}

fn analytic_k(overruns: &mut Overruns) -> Outcome {
    let problem = problems::infinite_medium()?;
    let settings = RunSettings::new(10_000, 120, 20);
    let r = power_iteration(&problem, &settings)?;
    overruns.add(r.stream_overflows);
    let within = (r.mean - INFINITE_K).abs() < 3.0 * r.sigma;
    let tight = r.sigma <= INFINITE_SIGMA_MAX;
    Ok((
        within && tight,
        format!(
            "k = {} (|k - {INFINITE_K}| = {:.2} sigma, needs < 3: {}; sigma = {:.2e}, needs <= {INFINITE_SIGMA_MAX:.0e}: {}); {} energy / {} flight cutoffs",
            format_uncertain(r.mean, r.sigma),
            (r.mean - INFINITE_K).abs() / r.sigma,
            if within { "ok" } else { "no" },
            r.sigma,
            if tight { "ok" } else { "no" },
            r.energy_cutoffs,
            r.flight_cutoffs
        ),
    ))
}

fn mode_equivalence(overruns: &mut Overruns) -> Outcome {
    let problem = problems::builtin("pincell-900K", None)?;
    let base = RunSettings::new(10_000, 20, 5);
    let mut reference: Option<Vec<u64>> = None;
    let mut combos = 0;
    let mut mismatches = Vec::new();
    for mode in [Mode::History, Mode::Event] {
        for sort in SortStrategy::ALL {
            for workers in [1, 4] {
                let settings = RunSettings { mode, sort, workers, ..base };
                let r = power_iteration(&problem, &settings)?;
                overruns.add(r.stream_overflows);
                let bits: Vec<u64> = r.batches.iter().map(|b| b.k.to_bits()).collect();
                combos += 1;
                match &reference {
                    None => reference = Some(bits),
                    Some(want) if *want != bits => mismatches.push(format!("{mode}/{sort}/{workers}")),
                    Some(_) => {}
                }
            }
        }
    }
    Ok((
        mismatches.is_empty() && combos == 16,
        if mismatches.is_empty() {
            format!("{combos} combinations, per-batch k bitwise identical")
        } else {
            format!("{combos} combinations, differing: {}", mismatches.join(", "))
        },
    ))
}

fn doppler_protocol(scratch: &Path, overruns: &mut Overruns) -> Outcome {
    let mut prefixes = Vec::new();
    for t in [600, 900, 1200] {
        let name = format!("pincell-{t}K");
        let prefix = scratch.join(&name);
        let prefix_text = prefix.display().to_string();
        let line = run_cli(&[
            "run",
            "--problem",
            &name,
            "--particles",
            "10000",
            "--batches",
            "220",
            "--inactive",
            "20",
            "--output",
            &prefix_text,
        ])?;
        println!("    {name}: {}", line.trim());
        let summary = pinmc::cli::results::read_summary(&prefix)?;
        overruns.add(summary.stream_overflows);
        prefixes.push(prefix_text);
    }
    let mut alphas = Vec::new();
    for pair in prefixes.windows(2) {
        let line = run_cli(&["compare", &pair[0], &pair[1]])?;
        let line = line.trim().to_string();
        let value = line.split(" = ").nth(1).and_then(|s| s.strip_suffix(" pcm/K")).ok_or("unexpected compare output")?;
        let (alpha, sigma) = parse_uncertain(value)?;
        alphas.push((line, alpha, sigma));
    }
    let ok = alphas.iter().all(|(_, a, _)| *a < 0.0 && a.abs() >= ALPHA_MIN && a.abs() <= ALPHA_MAX);
    let detail = alphas.iter().map(|(l, _, _)| l.as_str()).collect::<Vec<_>>().join("; ");
    Ok((ok, format!("{detail}; need alpha < 0 and |alpha| in [{ALPHA_MIN}, {ALPHA_MAX}]")))
}

fn reference_arithmetic() -> Outcome {
    let (alpha, _) = doppler_coefficient(1.18256, 0.0, 600.0, 1.17245, 0.0, 900.0)?;
    Ok((
        (alpha - REFERENCE_ALPHA).abs() <= REFERENCE_ALPHA_TOLERANCE,
        format!("alpha = {alpha:.5} pcm/K vs {REFERENCE_ALPHA} +- {REFERENCE_ALPHA_TOLERANCE}"),
    ))
}

fn sorting_bench(scratch: &Path, overruns: &mut Overruns) -> Outcome {
    let problem = problems::builtin("bench-pincell", None)?;
    let fuel_nuclides = problem.materials[0].constituents.len();
    let settings = RunSettings { workers: 4, mode: Mode::Event, ..RunSettings::new(10_000, 6, 1) };
    let rows = bench::bench_with(&problem, &settings, 2, |p, s| {
        let r = power_iteration(p, s)?;
        overruns.add(r.stream_overflows);
        Ok(r)
    })?;
    let csv = bench::bench_csv(&rows);
    std::fs::write(scratch.join("bench.csv"), &csv)?;
    for line in csv.lines() {
        println!("    {line}");
    }
    let me = rows.iter().find(|r| r.strategy == SortStrategy::MaterialEnergy).ok_or("missing row")?;
    let shape = rows.len() == 4 && csv.lines().next() == Some(bench::BENCH_HEADER);
    let setup = problem.materials.len() == 2 && fuel_nuclides >= 4;
    Ok((
        shape && setup && me.relative_excluding_sort >= 1.0,
        format!(
            "{} materials, {fuel_nuclides} fuel nuclides, results equal across strategies, material-energy / none = {:.3} (sort excluded)",
            problem.materials.len(),
            me.relative_excluding_sort
        ),
    ))
}

fn scattering_properties() -> Outcome {
    let mut stream = Stream::new(origin(12345));
    let mut worst_norm: f64 = 0.0;
    let mut bound_violations = 0usize;
    for awr in [1.0f64, 16.0, 238.0] {
        let alpha = ((awr - 1.0) / (awr + 1.0)).powi(2);
        for _ in 0..1_000_000 {
            let e = 1e-3 * (2e7f64 / 1e-3).powf(stream.next_f64());
            let dir = physics::isotropic(&mut stream);
            let (e2, d2) = physics::elastic_scatter(e, dir, awr, stream.next_f64(), stream.next_f64());
            let ratio = e2 / e;
            if !(ratio >= alpha * (1.0 - 1e-12) && ratio <= 1.0 + 1e-12) {
                bound_violations += 1;
            }
            worst_norm = worst_norm.max((d2.norm() - 1.0).abs()).max((dir.norm() - 1.0).abs());
        }
    }
    let n = 1_000_000;
    let mut sum = 0.0;
    for _ in 0..n {
        sum += physics::sample_watt(physics::WATT_A, physics::WATT_B, 2.0e7, &mut stream);
    }
    let mean = sum / n as f64;
    let (a, b) = (physics::WATT_A, physics::WATT_B);
    let closed = 1.5 * a + a * a * b / 4.0;
    let watt_rel = (mean - closed).abs() / closed;
    Ok((
        bound_violations == 0 && worst_norm < NORMALIZATION_TOLERANCE && watt_rel < WATT_MEAN_TOLERANCE,
        format!(
            "3e6 scatters, {bound_violations} outside E'/E bounds, worst |norm - 1| {worst_norm:.1e}; Watt mean {mean:.4e} vs {closed:.4e} ({watt_rel:.1e})"
        ),
    ))
}

fn rng_contracts(overruns: &Overruns) -> Outcome {
    let start = origin(1);
    let mut s = start;
    for _ in 0..SKIP_DISTANCE {
        s = s.step();
    }
    let skipped = start.skip(SKIP_DISTANCE);
    let other = RngState::new(0x1234_5678_9abc).skip(SKIP_DISTANCE);
    let mut t = RngState::new(0x1234_5678_9abc);
    for _ in 0..SKIP_DISTANCE {
        t = t.step();
    }
    Ok((
        skipped == s && other == t && overruns.total == 0 && overruns.runs > 0,
        format!(
            "skip({SKIP_DISTANCE}) matches stepping: {}; stream overruns {} over {} runs",
            skipped == s && other == t,
            overruns.total,
            overruns.runs
        ),
    ))
}

fn main() {
    let scratch: PathBuf = std::env::temp_dir().join(format!("pinmc-acceptance-{}", std::process::id()));
    if let Err(e) = std::fs::create_dir_all(&scratch) {
        eprintln!("cannot create {}: {e}", scratch.display());
        std::process::exit(2);
    }
    let mut report = Report::new("pinmc acceptance");
    let mut overruns = Overruns::default();

    let record = |report: &mut Report, id: &str, name: &str, f: &mut dyn FnMut() -> Outcome| {
        let t = Instant::now();
        let outcome = f();
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok((ok, detail)) => report.check(id, name, ok, &detail, secs),
            Err(e) => report.error(id, name, &e, secs),
        }
    };

    record(&mut report, "1", "Doppler broadening matches the quadrature oracle", &mut oracle_agreement);
    record(&mut report, "2", "oracle leaves 1/v and constant cross sections unchanged", &mut oracle_fixed_points);
    record(&mut report, "3", "infinite-medium k matches the analytic value", &mut || analytic_k(&mut overruns));
    record(&mut report, "4", "history and event modes agree bitwise across sorts and workers", &mut || {
        mode_equivalence(&mut overruns)
    });
    record(&mut report, "5", "Doppler coefficient is negative with plausible magnitude", &mut || {
        doppler_protocol(&scratch, &mut overruns)
    });
    record(&mut report, "6", "Doppler coefficient arithmetic on reference k values", &mut reference_arithmetic);
    record(&mut report, "7", "sorting benchmark: material-energy not slower than none", &mut || {
        sorting_bench(&scratch, &mut overruns)
    });
    record(&mut report, "8", "skip-ahead equals stepping; no stream overruns", &mut || rng_contracts(&overruns));
    record(&mut report, "9", "elastic kinematics and Watt sampling", &mut scattering_properties);

    let _ = std::fs::remove_dir_all(&scratch);
    std::process::exit(report.finish());
}
