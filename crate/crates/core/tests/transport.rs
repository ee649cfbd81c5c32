use pinmc::cli::problems::{self, ConstituentSpec, GeometrySpec, MaterialSpec, INFINITE_MEDIUM_K};
use pinmc::nucleardata::builtin_library;
use pinmc::transport::{power_iteration, RunSettings, TransportError};
use std::sync::Arc;

#[test]
fn weight_is_conserved_every_batch() {
    let problem = problems::builtin("pincell-600K", None).unwrap();
    let r = power_iteration(&problem, &RunSettings::new(2000, 8, 2)).unwrap();
    for b in &r.batches {
        assert!(b.weight_balance_error() < 1e-4, "batch {}: {}", b.index, b.weight_balance_error());
        assert_eq!(b.launched_weight, 2000.0);
        assert_eq!(b.active, b.index >= 2);
    }
    assert_eq!(r.stream_overflows, 0);
}

#[test]
fn infinite_medium_reproduces_analytic_k() {
    let problem = problems::infinite_medium().unwrap();
    let r = power_iteration(&problem, &RunSettings::new(100_000, 110, 10)).unwrap();
    assert_eq!(r.batches.iter().filter(|b| b.active).count(), 100);
    let z = (r.mean - INFINITE_MEDIUM_K).abs() / r.sigma;
    assert!(z < 3.0, "k = {} +- {} ({z:.2} sigma)", r.mean, r.sigma);
    assert_eq!(r.energy_cutoffs, 0);
    assert_eq!(r.flight_cutoffs, 0);
    for b in &r.batches {
        assert!(b.weight_balance_error() < 1e-4);
    }
}

#[test]
fn worker_count_does_not_change_results() {
    let problem = problems::builtin("pincell-1200K", None).unwrap();
    let base = RunSettings::new(500, 5, 1);
    let one = power_iteration(&problem, &base).unwrap();
    let many = power_iteration(&problem, &RunSettings { workers: 5, ..base }).unwrap();
    assert_eq!(one.k_values(), many.k_values());
    let batches = |r: &pinmc::tally::RunResult| {
        r.batches.iter().map(|b| (b.fission_sites, b.absorbed_weight.to_bits())).collect::<Vec<_>>()
    };
    assert_eq!(batches(&one), batches(&many));
}

#[test]
fn pincells_differ_only_in_fuel_temperature() {
    let cold = problems::builtin("pincell-600K", None).unwrap();
    let hot = problems::builtin("pincell-1200K", None).unwrap();
    assert_eq!(cold.geometry, hot.geometry);
    assert_eq!(cold.materials.len(), hot.materials.len());
    for (a, b) in cold.materials.iter().zip(&hot.materials) {
        assert_eq!(a.constituents, b.constituents);
        if a.name != "fuel" {
            assert_eq!(a.temperature, b.temperature);
        }
    }
    assert_eq!((cold.source_temperature(), hot.source_temperature()), (600.0, 1200.0));
}

#[test]
fn non_multiplying_problem_collapses() {
    let geometry = GeometrySpec { pitch: 1.26, radii: vec![], regions: vec!["water".into()] };
    let water = MaterialSpec {
        name: "water".into(),
        temperature: 600.0,
        constituents: vec![
            ConstituentSpec { nuclide: "H1".into(), density: 4.96e-2 },
            ConstituentSpec { nuclide: "O16".into(), density: 2.48e-2 },
        ],
    };
    let problem = problems::assemble("water", &geometry, &[water], Arc::new(builtin_library()), 0).unwrap();
    let err = power_iteration(&problem, &RunSettings::new(200, 3, 1)).unwrap_err();
    assert!(matches!(err, TransportError::SubcriticalCollapse { batch: 0 }), "{err}");
}
