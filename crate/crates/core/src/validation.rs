//! Self-checks run by `chiral-scatter validate` and the acceptance tests.
//!
//! Every criterion records what it measured alongside the bound it was held
//! to, so loosening a tolerance changes only the verdict, never the numbers.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cli::{render, Command, RunConfig};
use crate::disorder::{ensemble_average, DisorderConfig};
use crate::error::Result;
use crate::model::{EmitterArray, GaussianPacket1, GaussianPacket2, Grid};
use crate::oracle::{
    four_coordinate_t, oracle_compose_m2, oracle_fourier_t, oracle_mixed_t, oracle_single_convolution, oracle_tmft,
    oracle_yudson, ContourSpec, TmftVariant,
};
use crate::single_photon::{self, kernel_single, propagate_single, t_single};
use crate::specfun::laguerre_assoc1_roots;
use crate::two_photon::{
    self, irreducible_T_degenerate, irreducible_T_distinct, large_delta_asymptotic, parity_limit, two_photon_out,
};
use crate::Complex64;

/// Bounds for every check. Defaults are the project's acceptance levels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub unitarity: f64,
    pub norm_conservation: f64,
    /// Largest admissible grid spacing for locating kernel minima.
    pub minima_spacing: f64,
    pub convergence_slope: f64,
    pub convergence_slope_band: f64,
    pub parity: f64,
    pub tail_exponent: f64,
    pub tail_exponent_band: f64,
    pub residual_exponent: f64,
    pub residual_exponent_band: f64,
    pub convolution: f64,
    pub yudson: f64,
    pub contour_invariance: f64,
    pub tmft: f64,
    pub composition: f64,
    pub permutation: f64,
    /// Allowed factor between observed and ideal `n^{-1/2}` error ratios.
    pub standard_error_factor: f64,
    pub dip_retention: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            unitarity: 1e-14,
            norm_conservation: 1e-8,
            minima_spacing: 0.02,
            convergence_slope: 1.0,
            convergence_slope_band: 0.15,
            parity: 1e-9,
            tail_exponent: -2.0,
            tail_exponent_band: 0.1,
            residual_exponent: -3.0,
            residual_exponent_band: 0.2,
            convolution: 1e-8,
            yudson: 1e-5,
            contour_invariance: 1e-8,
            tmft: 1e-6,
            composition: 1e-6,
            permutation: 1e-12,
            standard_error_factor: 1.5,
            dip_retention: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    /// Human-readable bound, e.g. `<= 1e-9` or `in [-2.1, -1.9]`.
    pub bound: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    fn at_most(name: impl Into<String>, measured: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            measured,
            bound: format!("<= {limit:e}"),
            passed: measured <= limit,
            note: None,
        }
    }

    fn at_least(name: impl Into<String>, measured: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            measured,
            bound: format!(">= {limit}"),
            passed: measured >= limit,
            note: None,
        }
    }

    fn within(name: impl Into<String>, measured: f64, centre: f64, band: f64) -> Self {
        Self {
            name: name.into(),
            measured,
            bound: format!("in [{}, {}]", centre - band, centre + band),
            passed: (measured - centre).abs() <= band,
            note: None,
        }
    }

    fn flag(name: impl Into<String>, ok: bool, note: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            measured: if ok { 1.0 } else { 0.0 },
            bound: "== 1".into(),
            passed: ok,
            note: Some(note.into()),
        }
    }

    fn error(name: impl Into<String>, err: impl std::fmt::Display) -> Self {
        Self {
            name: name.into(),
            measured: f64::NAN,
            bound: "completes".into(),
            passed: false,
            note: Some(err.to_string()),
        }
    }

    // A ratio is only meaningful when its premise holds.
    fn requiring(mut self, premise: bool) -> Self {
        self.passed &= premise;
        self
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub id: u8,
    pub name: String,
    pub passed: bool,
    pub checks: Vec<Check>,
    /// Wall-clock seconds; kept out of serialized reports so they stay
    /// reproducible.
    #[serde(skip)]
    pub elapsed_s: f64,
    #[serde(skip)]
    pub runtime_budget_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub criteria: Vec<CriterionReport>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.criteria.iter().all(|c| c.passed)
    }
}

type Runner = fn(&Tolerances) -> Vec<Check>;

/// `(id, name, runtime budget in seconds, runner)` for every criterion.
const CRITERIA: [(u8, &str, f64, Runner); 9] = [
    (1, "unitarity", 10.0, unitarity),
    (2, "laguerre-minima", 30.0, laguerre_minima),
    (3, "degenerate-limit", 60.0, degenerate_limit),
    (4, "parity", 60.0, parity),
    (5, "large-detuning", 120.0, large_detuning),
    (6, "oracles", 300.0, oracles),
    (7, "order-invariance", f64::INFINITY, order_invariance),
    (8, "disorder", 300.0, disorder),
    (9, "determinism", f64::INFINITY, determinism),
];

/// Names of all criteria, in order.
pub fn criterion_names() -> Vec<&'static str> {
    CRITERIA.iter().map(|c| c.1).collect()
}

/// Runs every criterion whose name contains `filter` (or whose number equals
/// it); all of them when `filter` is `None`.
pub fn run_validation(filter: Option<&str>, tol: &Tolerances) -> ValidationReport {
    let selected = CRITERIA
        .iter()
        .filter(|c| filter.is_none_or(|f| c.1.contains(f) || c.0.to_string() == f));
    let criteria = selected
        .map(|&(id, name, budget, run)| {
            let start = Instant::now();
            let checks = run(tol);
            CriterionReport {
                id,
                name: name.to_string(),
                passed: !checks.is_empty() && checks.iter().all(|c| c.passed),
                checks,
                elapsed_s: start.elapsed().as_secs_f64(),
                runtime_budget_s: budget,
            }
        })
        .collect();
    ValidationReport { criteria }
}

fn sup_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn rel_err(value: Complex64, reference: Complex64) -> f64 {
    (value - reference).norm() / reference.norm()
}

fn sci_list(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.3e}")).collect::<Vec<_>>().join(" ")
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

// Wraps a fallible check body so an error becomes a failed check.
fn guarded(name: &str, body: impl FnOnce() -> Result<Vec<Check>>) -> Vec<Check> {
    body().unwrap_or_else(|e| vec![Check::error(name, e)])
}

fn unitarity(tol: &Tolerances) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut worst = 0.0_f64;
    for _ in 0..10_000 {
        let m = rng.random_range(1..=12);
        let detunings = (0..m).map(|_| rng.random_range(-5.0..5.0)).collect();
        let couplings = (0..m).map(|_| rng.random_range(0.05..3.0)).collect();
        let k = rng.random_range(-20.0..20.0);
        match EmitterArray::with_couplings(detunings, couplings) {
            Ok(e) => worst = worst.max((t_single(k, &e).norm() - 1.0).abs()),
            Err(e) => return vec![Check::error("|t(k)| = 1", e)],
        }
    }
    let mut checks = vec![Check::at_most("max ||t(k)| - 1| over 1e4 configurations", worst, tol.unitarity)];
    checks.extend(guarded("norm conservation", || {
        let mut worst = 0.0_f64;
        for m in 0..=10 {
            for &(delta, sigma) in &[(0.0, 2.0), (1.5, 2.0), (0.0, 10.0), (0.7, 5.0)] {
                let packet = GaussianPacket1::new(delta, sigma)?;
                let emitters = EmitterArray::degenerate(m, 0.0);
                let grid = single_photon::default_grid(&packet, &emitters)?;
                let out = propagate_single(&packet, &emitters, &grid)?;
                let incoming: Vec<Complex64> = grid.points().map(|y| packet.amplitude(y)).collect();
                let n_in = grid.integrate(&incoming.iter().map(|a| a.norm_sqr()).collect::<Vec<_>>());
                worst = worst.max((out.norm() - n_in).abs());
            }
        }
        let spread = EmitterArray::new(vec![-1.1, 0.3, 0.8, 2.4])?;
        let packet = GaussianPacket1::new(0.4, 3.0)?;
        let grid = single_photon::default_grid(&packet, &spread)?;
        let out = propagate_single(&packet, &spread, &grid)?;
        worst = worst.max((out.norm() - 1.0).abs());
        Ok(vec![Check::at_most(
            "max |∫|φ_out|² − ∫|φ_in|²| over single-photon sweep",
            worst,
            tol.norm_conservation,
        )])
    }));
    checks
}

fn laguerre_minima(tol: &Tolerances) -> Vec<Check> {
    let spacing = tol.minima_spacing.min(0.01);
    let mut checks = Vec::new();
    for m in 2..=10 {
        checks.extend(guarded(&format!("M={m}"), || {
            let emitters = EmitterArray::degenerate(m, 0.0);
            let reach = 4.0 * m as f64 + 8.0;
            let n = (reach / spacing).round() as usize;
            let us: Vec<f64> = (0..=n).map(|j| -reach + j as f64 * spacing).collect();
            let dens: Vec<f64> = us
                .iter()
                .map(|&u| kernel_single(u, &emitters, 0.0).map(|k| k.norm_sqr()))
                .collect::<Result<_>>()?;
            let minima: Vec<f64> = (1..dens.len() - 1)
                .filter(|&j| dens[j] < dens[j - 1] && dens[j] <= dens[j + 1])
                .map(|j| us[j])
                .collect();
            let mut roots: Vec<f64> = laguerre_assoc1_roots(m - 1).iter().map(|x| -x).collect();
            roots.sort_by(f64::total_cmp);
            if minima.len() != roots.len() {
                return Ok(vec![Check::flag(
                    format!("M={m} minima count"),
                    false,
                    format!("{} minima vs {} roots", minima.len(), roots.len()),
                )]);
            }
            let worst = minima.iter().zip(&roots).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            Ok(vec![Check::at_most(
                format!("M={m} max |minimum − root| (spacing {spacing})"),
                worst,
                spacing,
            )])
        }));
    }
    checks
}

const EPSILONS: [f64; 3] = [1e-2, 1e-3, 1e-4];

fn degenerate_limit(tol: &Tolerances) -> Vec<Check> {
    let mut checks = Vec::new();
    for m in [2usize, 3] {
        checks.extend(guarded(&format!("kernel M={m}"), || {
            let reference = EmitterArray::degenerate(m, 0.0);
            let us: Vec<f64> = (0..=400).map(|j| -0.05 * j as f64).collect();
            let errs: Vec<f64> = EPSILONS
                .iter()
                .map(|&eps| {
                    let spread = EmitterArray::new((0..m).map(|a| eps * a as f64).collect())?;
                    let mut worst = 0.0_f64;
                    for &u in &us {
                        let d = kernel_single(u, &spread, 0.0)? - kernel_single(u, &reference, 0.0)?;
                        worst = worst.max(d.norm());
                    }
                    Ok(worst)
                })
                .collect::<Result<_>>()?;
            let slope = log_log_slope(&EPSILONS, &errs);
            Ok(vec![Check::within(
                format!("kernel M={m} error slope in ε"),
                slope,
                tol.convergence_slope,
                tol.convergence_slope_band,
            )
            .with_note(format!("errors {}", sci_list(&errs)))])
        }));
    }
    checks.extend(guarded("T-matrix M=2", || {
        let delta = 0.7;
        let xs: Vec<f64> = (0..=300).map(|j| 0.05 * j as f64).collect();
        let errs: Vec<f64> = EPSILONS
            .iter()
            .map(|&eps| {
                let spread = EmitterArray::new(vec![0.0, eps])?;
                let mut worst = 0.0_f64;
                for &x in &xs {
                    let d = irreducible_T_distinct(x, 0.0, 2.0 * delta, &spread)? - irreducible_T_degenerate(x, delta, 2);
                    worst = worst.max(d.norm());
                }
                Ok(worst)
            })
            .collect::<Result<_>>()?;
        let slope = log_log_slope(&EPSILONS, &errs);
        Ok(vec![Check::within(
            "T-matrix M=2 error slope in ε",
            slope,
            tol.convergence_slope,
            tol.convergence_slope_band,
        )
        .with_note(format!("errors {}", sci_list(&errs)))])
    }));
    checks
}

fn parity(tol: &Tolerances) -> Vec<Check> {
    guarded("parity", || {
        let sigma = 2.0;
        let packet = GaussianPacket2::wide(0.0, sigma)?;
        let grid = two_photon::default_grid(&packet, &EmitterArray::degenerate(1, 0.0))?;
        let ds: Vec<f64> = grid.points().collect();
        let mut checks = Vec::new();
        for m in [2usize, 4, 6, 8] {
            let out = two_photon_out(&packet, &EmitterArray::degenerate(m, 0.0), &grid)?;
            let input: Vec<Complex64> = ds.iter().map(|&d| packet.relative(d).into()).collect();
            checks.push(Check::at_most(format!("even M={m}: sup |φ₂ − φ_in|"), sup_diff(&out.phi2, &input), tol.parity));
        }
        let closed: Vec<Complex64> = ds.iter().map(|&d| parity_limit(d, sigma, 1).into()).collect();
        let first = two_photon_out(&packet, &EmitterArray::degenerate(1, 0.0), &grid)?;
        for m in [1usize, 3, 5, 7] {
            let out = two_photon_out(&packet, &EmitterArray::degenerate(m, 0.0), &grid)?;
            checks.push(Check::at_most(format!("odd M={m}: sup |φ₂ − closed form|"), sup_diff(&out.phi2, &closed), tol.parity));
            if m > 1 {
                checks.push(Check::at_most(format!("odd M={m}: sup |φ₂ − φ₂(M=1)|"), sup_diff(&out.phi2, &first.phi2), tol.parity));
            }
        }
        Ok(checks)
    })
}

fn large_detuning(tol: &Tolerances) -> Vec<Check> {
    let deltas = [8.0, 16.0, 32.0, 64.0];
    let sigma = 1.0;
    let mut checks = Vec::new();
    for m in [1usize, 3, 5] {
        checks.extend(guarded(&format!("M={m}"), || {
            let grid = Grid::symmetric(40.0, 0.05)?;
            let probe = grid.points().position(|d| (d - 10.0).abs() < 1e-9).expect("10 is a grid point");
            let emitters = EmitterArray::degenerate(m, 0.0);
            let mut tails = Vec::new();
            let mut residuals = Vec::new();
            for &delta in &deltas {
                let out = two_photon_out(&GaussianPacket2::wide(delta, sigma)?, &emitters, &grid)?;
                tails.push(out.phi2[probe].norm());
                let asym: Vec<Complex64> = grid.points().map(|d| large_delta_asymptotic(d, sigma, delta, m)).collect();
                residuals.push(sup_diff(&out.phi2, &asym));
            }
            Ok(vec![
                Check::within(
                    format!("M={m} tail exponent |φ₂(d=10)| vs δ"),
                    log_log_slope(&deltas, &tails),
                    tol.tail_exponent,
                    tol.tail_exponent_band,
                ),
                Check::within(
                    format!("M={m} residual exponent vs asymptotic form"),
                    log_log_slope(&deltas, &residuals),
                    tol.residual_exponent,
                    tol.residual_exponent_band,
                ),
            ])
        }));
    }
    checks
}

fn oracles(tol: &Tolerances) -> Vec<Check> {
    let mut checks = Vec::new();
    checks.extend(guarded("convolution", || {
        let cases = [
            (EmitterArray::degenerate(1, 0.0), GaussianPacket1::new(1.0, 2.0)?, "M=1 σ=2 δ=1"),
            (EmitterArray::degenerate(10, 0.0), GaussianPacket1::new(0.0, 10.0)?, "M=10 degenerate σ=10"),
            (EmitterArray::new(vec![-0.8, 0.1, 1.2])?, GaussianPacket1::new(0.5, 2.0)?, "M=3 distinct σ=2"),
        ];
        let mut out = Vec::new();
        for (emitters, packet, label) in cases {
            let fine = single_photon::default_grid(&packet, &emitters)?;
            let closed = propagate_single(&packet, &emitters, &fine)?;
            // Every 8th point of the fine grid.
            let stride = 8;
            let n = (fine.n_points() - 1) / stride + 1;
            let coarse = Grid::new(fine.start(), fine.point((n - 1) * stride), n)?;
            let brute = oracle_single_convolution(&packet, &emitters, &coarse)?;
            let sampled: Vec<Complex64> = (0..n).map(|j| closed.amplitudes[j * stride]).collect();
            out.push(Check::at_most(
                format!("single photon {label}: sup |closed − convolution|"),
                sup_diff(&sampled, &brute.amplitudes),
                tol.convolution,
            ));
        }
        Ok(out)
    }));
    checks.extend(guarded("yudson", || yudson_checks(tol)));
    checks.extend(guarded("tmft", || tmft_checks(tol)));
    checks
}

fn yudson_checks(tol: &Tolerances) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut checks = Vec::new();
    let arrays = [EmitterArray::degenerate(1, 0.0), EmitterArray::new(vec![-0.6, 0.5, 1.1])?];
    for emitters in &arrays {
        let contour = ContourSpec::standard(1, 1.0);
        let mut worst = 0.0_f64;
        for _ in 0..10 {
            let z = rng.random_range(-3.0..3.0);
            let y = z - rng.random_range(0.2..8.0);
            let value = oracle_yudson(emitters, &[z], &[y], &contour)?;
            worst = worst.max(rel_err(value, kernel_single(y - z, emitters, 0.0)?));
        }
        checks.push(Check::at_most(
            format!("N=1 M={}: max relative error vs kernel", emitters.len()),
            worst,
            tol.yudson,
        ));
    }
    let arrays = [EmitterArray::degenerate(1, 0.0), EmitterArray::new(vec![-0.4, 0.9])?];
    for emitters in &arrays {
        let contour = ContourSpec::standard(2, 1.0);
        let (mut worst, mut shift, mut bridge) = (0.0_f64, 0.0_f64, 0.0_f64);
        for _ in 0..6 {
            // z1 > z2 > y2 > y1
            let z2 = rng.random_range(-1.0..1.0);
            let z1 = z2 + rng.random_range(0.1..2.0);
            let y2 = z2 - rng.random_range(0.5..2.5);
            let y1 = y2 - rng.random_range(0.1..2.0);
            let (y, z) = ([y1, y2], [z1, z2]);
            let value = oracle_yudson(emitters, &z, &y, &contour)?;
            let expected = kernel_single(y1 - z1, emitters, 0.0)? * kernel_single(y2 - z2, emitters, 0.0)?
                + Complex64::i() * four_coordinate_t(y, z, emitters)?;
            worst = worst.max(rel_err(value, expected));
            let raised = oracle_yudson(emitters, &z, &y, &contour.raised(0.25))?;
            shift = shift.max((raised - value).norm());
            let e_total = rng.random_range(-2.0..2.0);
            let (dy, dz) = (y2 - y1, z1 - z2);
            let closed = irreducible_T_distinct(dy, dz, e_total, emitters)?;
            bridge = bridge.max(rel_err(oracle_mixed_t(dy, dz, e_total, emitters)?, closed));
        }
        let m = emitters.len();
        checks.push(Check::at_most(format!("N=2 M={m}: max relative error vs K·K + iT"), worst, tol.yudson));
        checks.push(Check::at_most(
            format!("N=2 M={m}: contour raised by κ/4, max change"),
            shift,
            tol.contour_invariance,
        ));
        checks.push(Check::at_most(
            format!("M={m}: four-coordinate T vs closed-form mixed T, max relative error"),
            bridge,
            tol.yudson,
        ));
    }
    Ok(checks)
}

fn tmft_checks(tol: &Tolerances) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    let arrays = [EmitterArray::new(vec![-0.3, 0.9])?, EmitterArray::new(vec![-0.7, 0.4, 1.3])?];
    let mut same = 0.0_f64;
    let mut mixed = 0.0_f64;
    let mut samples = Vec::new();
    for emitters in &arrays {
        for _ in 0..10 {
            let (p1, p2, k1) = (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            let reference = oracle_fourier_t(p1, p2, k1, emitters)?;
            same = same.max(rel_err(oracle_tmft(p1, p2, k1, emitters, TmftVariant::SameIndex)?, reference));
            mixed = mixed.max(rel_err(oracle_tmft(p1, p2, k1, emitters, TmftVariant::MixedIndex)?, reference));
            if emitters.len() == 2 {
                samples.push((p1, p2, k1));
            }
        }
    }
    while samples.len() < 20 {
        samples.push((rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)));
    }
    let unique = (same <= tol.tmft) != (mixed <= tol.tmft);
    let variant = if same <= mixed { TmftVariant::SameIndex } else { TmftVariant::MixedIndex };
    let mut checks = vec![
        Check::at_most("TMFT same-index vs Fourier transform of T, max relative error", same.min(mixed), tol.tmft)
            .with_note(format!("same-index {same:.3e}, mixed-index {mixed:.3e}")),
        Check::flag("exactly one index convention matches", unique, format!("selected {variant:?}")),
    ];

    let (d1, d2) = (-0.3, 0.9);
    let pair = EmitterArray::new(vec![d1, d2])?;
    let composed = oracle_compose_m2(&samples, d1, d2)?;
    let swapped = oracle_compose_m2(&samples, d2, d1)?;
    let (mut irr, mut red, mut swap) = (0.0_f64, 0.0_f64, 0.0_f64);
    for ((&(p1, p2, k1), c), s) in samples.iter().zip(&composed).zip(&swapped) {
        irr = irr.max(rel_err(c.irreducible, oracle_tmft(p1, p2, k1, &pair, variant)?));
        red = red.max(rel_err(c.reducible, t_single(p1, &pair) * t_single(p2, &pair)));
        swap = swap.max(rel_err(s.irreducible, c.irreducible));
    }
    checks.push(Check::at_most("M=2 composition vs Bethe T, max relative error", irr, tol.composition));
    checks.push(Check::at_most("M=2 composition reducible part vs t(p1)t(p2)", red, tol.composition));
    checks.push(Check::at_most("M=2 composition Δ1↔Δ2 swap", swap, tol.composition));
    Ok(checks)
}

fn order_invariance(tol: &Tolerances) -> Vec<Check> {
    guarded("permutation", || {
        let arrays = [
            EmitterArray::new(vec![0.9, -1.3, 0.2, 2.1])?,
            EmitterArray::new(vec![0.01, -0.03, 0.05, 0.0])?,
        ];
        let perms: [[usize; 4]; 3] = [[3, 2, 1, 0], [1, 3, 0, 2], [2, 0, 3, 1]];
        let mut worst = 0.0_f64;
        for emitters in &arrays {
            let p1 = GaussianPacket1::new(0.3, 2.0)?;
            let g1 = single_photon::default_grid(&p1, emitters)?;
            let p2 = GaussianPacket2::wide(0.3, 2.0)?;
            let g2 = two_photon::default_grid(&p2, emitters)?;
            let base1 = propagate_single(&p1, emitters, &g1)?;
            let base2 = two_photon_out(&p2, emitters, &g2)?;
            for perm in &perms {
                let permuted = emitters.permuted(perm);
                worst = worst.max(sup_diff(&propagate_single(&p1, &permuted, &g1)?.amplitudes, &base1.amplitudes));
                worst = worst.max(sup_diff(&two_photon_out(&p2, &permuted, &g2)?.phi2, &base2.phi2));
                for j in 0..200 {
                    let u = -0.1 * j as f64;
                    worst = worst.max((kernel_single(u, &permuted, 0.0)? - kernel_single(u, emitters, 0.0)?).norm());
                }
            }
        }
        Ok(vec![Check::at_most("max output change under detuning permutations", worst, tol.permutation)])
    })
}

fn disorder(tol: &Tolerances) -> Vec<Check> {
    guarded("disorder", || {
        let (m, delta, sigma) = (3, 0.0, 2.0);
        let packet = GaussianPacket2::wide(delta, sigma)?;
        let grid = Grid::symmetric(10.0, 0.05)?;
        let centre = (grid.n_points() - 1) / 2;
        let mut checks = Vec::new();

        let clean = ensemble_average(&DisorderConfig::new(m, 0.0, delta, sigma, 3, 11, grid)?)?;
        let exact = two_photon_out(&packet, &EmitterArray::degenerate(m, 0.0), &grid)?;
        let identical = clean.mean_density == exact.density
            && clean.median_abs_dev.iter().chain(&clean.mean_abs_dev).all(|&x| x == 0.0);
        checks.push(Check::flag("Σ=0 reproduces the deterministic density exactly", identical, "bitwise comparison"));

        let sizes = [250usize, 1000, 4000];
        let mut errors = Vec::new();
        let mut full = None;
        for &n in &sizes {
            let stats = ensemble_average(&DisorderConfig::new(m, 0.5, delta, sigma, n, 2024, grid)?)?;
            errors.push(stats.std_error[centre]);
            full = Some(stats);
        }
        let full = full.expect("at least one ensemble");
        for (w, n) in errors.windows(2).zip(sizes.windows(2)) {
            let ideal = (n[1] as f64 / n[0] as f64).sqrt();
            let ratio = w[0] / w[1];
            let factor = (ratio / ideal).max(ideal / ratio);
            checks.push(
                Check::at_most(
                    format!("standard error n={}→{}: deviation factor from n^-1/2", n[0], n[1]),
                    factor,
                    tol.standard_error_factor,
                )
                .with_note(format!("ratio {ratio:.4}, ideal {ideal:.4}")),
            );
        }

        // Dip depth relative to the incoming pair density at d = 0.
        let incoming = packet.relative(0.0).powi(2);
        let depth_clean = 1.0 - clean.mean_density[centre] / incoming;
        let depth_noisy = 1.0 - full.mean_density[centre] / incoming;
        let retention = depth_noisy / depth_clean;
        checks.push(Check {
            name: "d=0 dip depth at Σ=0 (must be a dip)".into(),
            measured: depth_clean,
            bound: "> 0".into(),
            passed: depth_clean > 0.0,
            note: Some(format!("ρ(0)/ρ_in(0) = {:.6}", clean.mean_density[centre] / incoming)),
        });
        checks.push(
            Check::at_least("d=0 dip retention at Σ=0.5, n=4000", retention, tol.dip_retention)
                .requiring(depth_clean > 0.0)
                .with_note(format!("depth {depth_noisy:.6} vs {depth_clean:.6}")),
        );
        Ok(checks)
    })
}

fn determinism(_tol: &Tolerances) -> Vec<Check> {
    let mut configs = Vec::new();
    let mut c = RunConfig::new(Command::Single);
    c.m = Some(4);
    c.delta = 0.5;
    configs.push(c);
    let mut c = RunConfig::new(Command::Two);
    c.m = Some(3);
    configs.push(c);
    let mut c = RunConfig::new(Command::Disorder);
    c.m = Some(3);
    c.disorder = 0.5;
    c.samples = 64;
    c.seed = 99;
    configs.push(c.clone());
    c.constrain_mean = true;
    c.format = crate::cli::Format::Json;
    configs.push(c);
    let mut c = RunConfig::new(Command::Sweep);
    c.m = Some(5);
    configs.push(c);

    configs
        .iter()
        .map(|cfg| {
            let name = format!("{:?} ({:?})", cfg.command, cfg.format);
            let run = |threads: usize| -> Result<Vec<u8>> {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build()
                    .expect("thread pool");
                pool.install(|| render(cfg)).map(|r| r.bytes)
            };
            match (run(1), run(1), run(4)) {
                (Ok(a), Ok(b), Ok(c)) => Check::flag(
                    format!("{name} byte-identical across runs and thread counts"),
                    a == b && a == c,
                    format!("{} bytes", a.len()),
                ),
                (Err(e), _, _) | (_, Err(e), _) | (_, _, Err(e)) => Check::error(name, e),
            }
        })
        .collect()
}
