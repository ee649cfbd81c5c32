//! Reference Doppler broadening by direct quadrature of the exact
//! free-gas kernel over a lin-lin tabulated 0 K cross section.
//!
//! This is slow and only meant for validating the analytic line shapes.
//! Working in `x = sqrt(E')`, with `beta^2 = kT/A` and `y = sqrt(E)`:
//!
//! ```text
//! sigma(E) = 1/(y^2 sqrt(pi) beta) * Int sigma0(x^2) x^2 [exp(-(x-y)^2/beta^2) - exp(-(x+y)^2/beta^2)] dx
//! ```
//!
//! The table is taken as zero outside its span, so results are only
//! meaningful at energies whose kernel window lies inside the table.

use super::{XsError, BOLTZMANN_EV};
use std::f64::consts::PI;

/// Kernel half-width in units of beta; exp(-36) is below double precision.
const WINDOW: f64 = 6.0;
const REL_TOL: f64 = 1e-6;
const MAX_DEPTH: u32 = 40;

/// Broadens `sigma0` (barns, lin-lin on `grid`) to `temperature` for a target
/// of mass ratio `awr`, returning one value per grid point.
pub fn broaden(
    grid: &[f64],
    sigma0: &[f64],
    temperature: f64,
    awr: f64,
) -> Result<Vec<f64>, XsError> {
    grid.iter()
        .map(|&e| broaden_at(grid, sigma0, temperature, awr, e))
        .collect()
}

/// Broadened value at a single energy.
pub fn broaden_at(
    grid: &[f64],
    sigma0: &[f64],
    temperature: f64,
    awr: f64,
    energy: f64,
) -> Result<f64, XsError> {
    assert_eq!(grid.len(), sigma0.len(), "grid and table lengths differ");
    assert!(grid.windows(2).all(|w| w[0] < w[1]), "grid must increase");
    if !(temperature > 0.0) {
        return Err(XsError::InvalidTemperature(temperature));
    }
    let beta = (BOLTZMANN_EV * temperature / awr).sqrt();
    let y = energy.sqrt();
    let lo = (y - WINDOW * beta).max(0.0).max(grid[0].sqrt());
    let hi = (y + WINDOW * beta).min(grid[grid.len() - 1].sqrt());
    if lo >= hi {
        return Ok(0.0);
    }

    let table = |x: f64| -> f64 {
        let e = x * x;
        let i = grid.partition_point(|&g| g <= e).clamp(1, grid.len() - 1) - 1;
        let f = (e - grid[i]) / (grid[i + 1] - grid[i]);
        sigma0[i] + f * (sigma0[i + 1] - sigma0[i])
    };
    let integrand = |x: f64| -> f64 {
        let a = (x - y) / beta;
        let b = (x + y) / beta;
        table(x) * x * x * ((-a * a).exp() - (-b * b).exp())
    };

    // breakpoints: table nodes inside the window, then pieces no wider than beta/4
    let mut nodes = vec![lo];
    let first = grid.partition_point(|&g| g.sqrt() <= lo);
    for &g in &grid[first..] {
        let x = g.sqrt();
        if x >= hi {
            break;
        }
        nodes.push(x);
    }
    nodes.push(hi);
    let max_piece = beta / 4.0;
    let mut pieces = Vec::with_capacity(nodes.len() * 2);
    for w in nodes.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let k = ((b - a) / max_piece).ceil().max(1.0) as usize;
        for j in 0..k {
            let pa = a + (b - a) * j as f64 / k as f64;
            let pb = if j + 1 == k { b } else { a + (b - a) * (j + 1) as f64 / k as f64 };
            pieces.push((pa, pb));
        }
    }

    // coarse pass fixes the absolute tolerance
    let coarse: Vec<(f64, f64, f64, f64)> = pieces
        .iter()
        .map(|&(a, b)| {
            let (fa, fm, fb) = (integrand(a), integrand(0.5 * (a + b)), integrand(b));
            (fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
        })
        .collect();
    let estimate: f64 = coarse.iter().map(|c| c.3.abs()).sum();
    if estimate == 0.0 {
        return Ok(0.0);
    }
    let width = hi - lo;
    let mut total = 0.0;
    for (&(a, b), &(fa, fm, fb, whole)) in pieces.iter().zip(&coarse) {
        let tol = REL_TOL * estimate * (b - a) / width;
        total += adaptive_simpson(&integrand, a, b, fa, fm, fb, whole, tol, MAX_DEPTH)
            .ok_or(XsError::Quadrature { energy })?;
    }
    Ok(total / (y * y * PI.sqrt() * beta))
}

#[allow(clippy::too_many_arguments)]
fn adaptive_simpson(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Option<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol {
        return Some(left + right + delta / 15.0);
    }
    if depth == 0 {
        return None;
    }
    Some(
        adaptive_simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)?
            + adaptive_simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)?,
    )
}
