//! Analytic on-the-fly broadening against direct quadrature of the exact kernel.

use pinmc::nucleardata::{builtin_library, sigma1, Nuclide};

/// Dense 0 K sampling: a log background plus fine uniform patches around
/// every resonance, so lin-lin interpolation resolves the bare Lorentzians.
fn zero_kelvin_grid(nuc: &Nuclide, lo: f64, hi: f64, t_max: f64) -> Vec<f64> {
    let mut grid: Vec<f64> = (0..=6000)
        .map(|i| lo * (hi / lo).powf(i as f64 / 6000.0))
        .collect();
    for r in nuc.resonances() {
        let gamma = r.total_width();
        let delta = r.doppler_width(t_max, nuc.awr());
        let half = 60.0 * gamma + 12.0 * delta;
        let step = gamma / 40.0;
        let n = (2.0 * half / step).ceil() as usize;
        grid.extend((0..=n).map(|i| r.energy - half + step * i as f64));
    }
    grid.retain(|&e| e >= lo && e <= hi);
    grid.sort_by(f64::total_cmp);
    grid.dedup_by(|a, b| (*a - *b).abs() < 1e-12 * *b);
    grid
}

#[test]
fn analytic_broadening_matches_quadrature() {
    let lib = builtin_library();
    for name in ["U238", "U235"] {
        let nuc = lib.nuclide(lib.require(name).unwrap());
        let grid = zero_kelvin_grid(nuc, 0.5, 60.0, 1200.0);
        let cold: Vec<f64> = grid
            .iter()
            .map(|&e| nuc.sigma_resonant(e, 0.0).unwrap())
            .map(|(c, f)| c + f)
            .collect();
        let check: Vec<f64> = (0..2000)
            .map(|i| 1.0 + 19.0 * i as f64 / 1999.0)
            .chain((0..2000).map(|i| 15.0 + 35.0 * i as f64 / 1999.0))
            .collect();
        for t in [300.0, 600.0, 900.0, 1200.0] {
            let mut worst: f64 = 0.0;
            for &e in &check {
                let (c, f) = nuc.sigma_resonant(e, t).unwrap();
                let analytic = c + f;
                if analytic <= 1.0 {
                    continue;
                }
                let exact = sigma1::broaden_at(&grid, &cold, t, nuc.awr(), e).unwrap();
                let rel = (analytic - exact).abs() / exact;
                worst = worst.max(rel);
            }
            println!("{name} T={t}: worst relative deviation {worst:.2e}");
            assert!(worst < 5e-3, "{name} at {t} K: {worst}");
        }
    }
}
