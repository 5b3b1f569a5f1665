//! Two-photon scattering in the wide-pulse limit.
//!
//! The outgoing relative wavefunction `φ₂(d)` is the sum of a reducible part
//! (each photon scatters independently, `t(E/2+k) t(E/2−k)` in relative
//! momentum) and an irreducible part built from the bound-state T-matrix
//! `T⁺⁺(X)`, `X = Δy + Δz`, convolved with the incoming relative Gaussian.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::cluster::SumRule;
use crate::error::{invalid, Error, Result};
use crate::model::{is_degenerate, min_pairwise_gap, EmitterArray, GaussianPacket2, Grid};
use crate::quad::GaussKronrod;
use crate::single_photon::{check_spacing, t_single, tail_length, MAX_SPACING_KAPPA, MAX_SPACING_PER_SIGMA};
use crate::specfun::{erfcx, laguerre_assoc1, series_inv, series_mul, series_pow, TruncatedSeries};

/// The T-matrix decays as `e^{−κX/2}`; beyond this it is dropped.
pub const X_MAX: f64 = 80.0;
const SPECTRAL_HALF_WIDTH: f64 = 8.584_6;
// g(ζ)/g(0) = e^{-ζ²/2σ²} is below 1e-17 beyond this many σ.
const GAUSSIAN_REACH: f64 = 8.9;

/// `Σ c · X^p · e^{rate·X}`.
#[derive(Debug, Clone, Default)]
pub(crate) struct ExpPoly {
    pub terms: Vec<(Complex64, u32, Complex64)>,
}

impl ExpPoly {
    pub fn eval(&self, x: f64) -> Complex64 {
        self.terms
            .iter()
            .map(|&(c, p, r)| c * x.powi(p as i32) * (r * x).exp())
            .sum()
    }
}

fn t_matrix_distinct(emitters: &EmitterArray, e_total: f64, kappa: f64) -> ExpPoly {
    let rule = SumRule::new(emitters.detunings(), kappa);
    let ik = Complex64::new(0.0, kappa);
    let pref = Complex64::new(0.0, -2.0 * kappa.powi(3));
    let terms = rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .map(|(&la, &wa)| {
            let inner: Complex64 = rule
                .nodes
                .iter()
                .zip(&rule.weights)
                .map(|(&lb, &wb)| wb / ((la - lb + ik) * (e_total - la - lb + ik)))
                .sum();
            let rate = Complex64::i() * (0.5 * e_total - la) - 0.5 * kappa;
            (pref * wa * inner, 0, rate)
        })
        .collect();
    ExpPoly { terms }
}

// T for M coincident emitters with unit coupling: 2i e^{(iδ−1/2)x} Σ_j d_j x^j.
fn degenerate_polynomial(m: usize, delta: f64) -> Vec<Complex64> {
    let k = m - 1;
    let i = Complex64::i();
    let one = Complex64::new(1.0, 0.0);
    let lin = |a: Complex64| TruncatedSeries::linear(a, one, k);
    let pole = match series_inv(&lin((-delta).into()).scale(2.0.into())) {
        Ok(p) => p,
        Err(Error::SingularSeries { .. }) => {
            let mut d = vec![Complex64::new(0.0, 0.0); m];
            if m % 2 == 1 {
                d[0] = one;
            }
            return d;
        }
        Err(e) => unreachable!("{e}"),
    };
    let num = series_mul(&series_pow(&lin(-i), m as u32), &series_pow(&lin((-2.0 * delta).into()), m as u32));
    let den = series_inv(&series_pow(&lin(Complex64::new(-2.0 * delta, -1.0)), m as u32))
        .expect("(−2δ−i)^M is never zero");
    let fact: f64 = (1..m).map(|j| j as f64).product();
    let f = series_mul(&series_mul(&num, &den), &pole).scale((1.0 / fact).into());
    // F = Σ_l C(K,l) f^{(l)}(0) (−i x)^{K−l}; collect by power j = K − l.
    let mut d = vec![Complex64::new(0.0, 0.0); m];
    let mut binom = 1.0;
    for l in 0..=k {
        let j = k - l;
        d[j] = f.derivative_at_zero(l) * binom * (-i).powu(j as u32);
        binom *= (k - l) as f64 / (l + 1) as f64;
    }
    d
}

fn t_matrix_degenerate(m: usize, delta: f64, kappa: f64) -> ExpPoly {
    let d = degenerate_polynomial(m, delta / kappa);
    let rate = Complex64::new(-0.5 * kappa, delta);
    let pref = Complex64::new(0.0, 2.0 * kappa);
    let terms = d
        .into_iter()
        .enumerate()
        .map(|(j, c)| (pref * c * kappa.powi(j as i32), j as u32, rate))
        .collect();
    ExpPoly { terms }
}

/// `T⁺⁺` component of the irreducible two-photon T-matrix at total energy
/// `e_total` for distinct detunings; zero unless `dy, dz ≥ 0`.
#[allow(non_snake_case)]
pub fn irreducible_T_distinct(dy: f64, dz: f64, e_total: f64, emitters: &EmitterArray) -> Result<Complex64> {
    let kappa = emitters.uniform_coupling()?;
    let min_gap = min_pairwise_gap(emitters);
    if min_gap < emitters.degeneracy_tol() {
        return Err(Error::DegenerateDetunings {
            min_gap,
            tol: emitters.degeneracy_tol(),
        });
    }
    if dy < 0.0 || dz < 0.0 || emitters.is_empty() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    Ok(t_matrix_distinct(emitters, e_total, kappa).eval(dy + dz))
}

/// `T⁺⁺(δ; X)` for `m ≥ 1` coincident emitters (unit coupling), from the
/// degree-`(m−1)` polynomial closed form. `δ = 0` uses the exact parity result.
#[allow(non_snake_case)]
pub fn irreducible_T_degenerate(x: f64, delta: f64, m: usize) -> Complex64 {
    assert!(m >= 1, "need at least one emitter");
    t_matrix_degenerate(m, delta, 1.0).eval(x)
}

/// Polynomial `F(δ, x)` with `T⁺⁺ = 2i e^{(iδ−1/2)x} F`, unit coupling.
pub fn f_polynomial(delta: f64, x: f64, m: usize) -> Complex64 {
    assert!(m >= 1, "need at least one emitter");
    degenerate_polynomial(m, delta)
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * x + c)
}

/// `T⁺⁺(X)` for any admissible array, dispatching on degeneracy.
pub(crate) fn t_matrix(emitters: &EmitterArray, delta: f64) -> Result<ExpPoly> {
    if emitters.is_empty() {
        return Ok(ExpPoly::default());
    }
    let kappa = emitters.uniform_coupling()?;
    if is_degenerate(emitters)? {
        Ok(t_matrix_degenerate(emitters.len(), delta, kappa))
    } else {
        let e_total = 2.0 * (emitters.mean_detuning() + delta);
        Ok(t_matrix_distinct(emitters, e_total, kappa))
    }
}

/// How the irreducible convolution is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IrreducibleMethod {
    /// Exponential-moment expansion: a handful of quadratures shared by all
    /// grid points.
    #[default]
    Moments,
    /// Adaptive quadrature of `T(|d|+ζ) g(ζ)` separately at every point.
    Direct,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPhotonOptions {
    pub method: IrreducibleMethod,
    pub quad: GaussKronrod,
}

impl Default for TwoPhotonOptions {
    fn default() -> Self {
        Self {
            method: IrreducibleMethod::Moments,
            quad: GaussKronrod::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoPhotonParts {
    pub reducible: Vec<Complex64>,
    pub irreducible: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoPhotonResult {
    pub grid: Grid,
    pub phi2: Vec<Complex64>,
    pub density: Vec<f64>,
    pub parts: Option<TwoPhotonParts>,
}

/// Outgoing relative wavefunction `φ₂(d)` for a wide Gaussian pair.
pub fn two_photon_out(packet: &GaussianPacket2, emitters: &EmitterArray, grid: &Grid) -> Result<TwoPhotonResult> {
    two_photon_out_with(packet, emitters, grid, &TwoPhotonOptions::default())
}

pub fn two_photon_out_with(
    packet: &GaussianPacket2,
    emitters: &EmitterArray,
    grid: &Grid,
    opts: &TwoPhotonOptions,
) -> Result<TwoPhotonResult> {
    if !packet.is_wide() {
        return Err(Error::FiniteMuUnsupported);
    }
    if !grid.is_symmetric() {
        return Err(invalid("grid", "relative-coordinate grid must be symmetric about d = 0"));
    }
    let kappa = if emitters.is_empty() { 1.0 } else { emitters.uniform_coupling()? };
    check_spacing(grid, packet.sigma, kappa)?;
    let t = t_matrix(emitters, packet.delta)?;

    let ds: Vec<f64> = grid.points().collect();
    let reducible = reducible_part(packet, emitters, grid, &ds);
    let irreducible = match opts.method {
        _ if emitters.is_empty() => vec![Complex64::new(0.0, 0.0); ds.len()],
        IrreducibleMethod::Moments => irreducible_by_moments(&t, packet, kappa, &ds, &opts.quad)?,
        IrreducibleMethod::Direct => irreducible_direct(&t, packet, kappa, &ds, &opts.quad)?,
    };
    let phi2: Vec<Complex64> = reducible.iter().zip(&irreducible).map(|(a, b)| a + b).collect();
    let density = phi2.iter().map(|p| p.norm_sqr()).collect();
    Ok(TwoPhotonResult {
        grid: *grid,
        phi2,
        density,
        parts: Some(TwoPhotonParts { reducible, irreducible }),
    })
}

/// Symmetric grid over `|d| ≤ 5σ + 10/κ` at the finest admissible spacing.
pub fn default_grid(packet: &GaussianPacket2, emitters: &EmitterArray) -> Result<Grid> {
    let kappa = if emitters.is_empty() { 1.0 } else { emitters.uniform_coupling()? };
    let limit = (packet.sigma * MAX_SPACING_PER_SIGMA).min(MAX_SPACING_KAPPA / kappa);
    Grid::symmetric(5.0 * packet.sigma + 10.0 / kappa, limit)
}

/// `|φ₂(d)|²` at every grid point.
pub fn g2_density(result: &TwoPhotonResult) -> Vec<f64> {
    result.phi2.iter().map(|p| p.norm_sqr()).collect()
}

fn reducible_part(packet: &GaussianPacket2, emitters: &EmitterArray, grid: &Grid, ds: &[f64]) -> Vec<Complex64> {
    let incoming = ds.iter().map(|&d| Complex64::from(packet.relative(d)));
    if emitters.is_empty() {
        return incoming.collect();
    }
    let half_e = emitters.mean_detuning() + packet.delta;
    let reach = SPECTRAL_HALF_WIDTH * packet.sigma + tail_length(emitters);
    let period = grid.stop().max(-grid.start()) + reach + 1.0;
    let h = 2.0 * std::f64::consts::PI / period;
    let n = (SPECTRAL_HALF_WIDTH / packet.sigma / h).ceil() as usize;
    // Even integrand: φ − g = (h/2π)[F(0) + 2 Σ_{n≥1} F(k_n) cos(k_n d)].
    let amps: Vec<Complex64> = (0..=n)
        .map(|j| {
            let k = j as f64 * h;
            let f = (t_single(half_e + k, emitters) * t_single(half_e - k, emitters) - 1.0) * packet.relative_spectrum(k);
            let w = if j == 0 { 1.0 } else { 2.0 };
            f * (w * h / (2.0 * std::f64::consts::PI))
        })
        .collect();
    incoming
        .zip(ds)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(g, &d)| g + cosine_sum(&amps, h, d))
        .collect()
}

fn cosine_sum(amps: &[Complex64], h: f64, d: f64) -> Complex64 {
    let step = Complex64::from_polar(1.0, h * d);
    let mut acc = Complex64::new(0.0, 0.0);
    for (block, chunk) in amps.chunks(32).enumerate() {
        let mut ph = Complex64::from_polar(1.0, (block * 32) as f64 * h * d);
        for &a in chunk {
            acc += a * ph.re;
            ph *= step;
        }
    }
    acc
}

fn convolution_reach(packet: &GaussianPacket2, kappa: f64) -> f64 {
    (GAUSSIAN_REACH * packet.sigma).min(X_MAX / kappa)
}

// φ_irr(d) = i Σ c e^{r|d|} Σ_q C(p,q) |d|^{p−q} ∫ ζ^q e^{rζ} g(ζ) dζ.
fn irreducible_by_moments(
    t: &ExpPoly,
    packet: &GaussianPacket2,
    kappa: f64,
    ds: &[f64],
    quad: &GaussKronrod,
) -> Result<Vec<Complex64>> {
    let z = convolution_reach(packet, kappa);
    let breaks: Vec<f64> = (0..=16).map(|j| z * j as f64 / 16.0).collect();
    let mut moments = Vec::with_capacity(t.terms.len());
    for &(_, p, rate) in &t.terms {
        let mut row = Vec::with_capacity(p as usize + 1);
        for qp in 0..=p {
            let f = |zeta: f64| zeta.powi(qp as i32) * (rate * zeta).exp() * packet.relative(zeta);
            // Accuracy is judged against the integral of |f|, which is what
            // rounding in the oscillatory sum is proportional to.
            let scale = GaussKronrod::with_tolerance(0.0, 1e-6).integrate_pieces(&|x| f(x).norm().into(), &breaks)?;
            let q = GaussKronrod {
                abs_tol: 1e-13 * scale.re,
                rel_tol: 0.0,
                max_depth: quad.max_depth,
                max_intervals: quad.max_intervals,
            };
            row.push(q.integrate_pieces(&f, &breaks)?);
        }
        moments.push(row);
    }
    let i = Complex64::i();
    Ok(ds
        .par_iter()
        .map(|&d| {
            let a = d.abs();
            let mut acc = Complex64::new(0.0, 0.0);
            for (&(c, p, rate), row) in t.terms.iter().zip(&moments) {
                let mut inner = Complex64::new(0.0, 0.0);
                let mut binom = 1.0;
                for (qp, &g) in row.iter().enumerate() {
                    inner += g * binom * a.powi((p as usize - qp) as i32);
                    binom *= (p as usize - qp) as f64 / (qp + 1) as f64;
                }
                acc += c * (rate * a).exp() * inner;
            }
            i * acc
        })
        .collect())
}

fn irreducible_direct(
    t: &ExpPoly,
    packet: &GaussianPacket2,
    kappa: f64,
    ds: &[f64],
    quad: &GaussKronrod,
) -> Result<Vec<Complex64>> {
    let z = convolution_reach(packet, kappa);
    let i = Complex64::i();
    ds.par_iter()
        .map(|&d| {
            let a = d.abs();
            let f = |zeta: f64| t.eval(a + zeta) * packet.relative(zeta);
            Ok(i * quad.integrate(f, 0.0, z)?)
        })
        .collect()
}

/// Closed-form `φ₂(d)` at zero detuning (unit coupling): the incoming
/// Gaussian for even `m`, and for odd `m` the Gaussian minus an
/// exponential bound-state tail.
pub fn parity_limit(d: f64, sigma: f64, m: usize) -> f64 {
    let norm = (sigma * std::f64::consts::PI.sqrt()).powf(-0.5);
    let gauss = (-d * d / (2.0 * sigma * sigma)).exp();
    if m.is_multiple_of(2) {
        return norm * gauss;
    }
    let tail = (2.0 * std::f64::consts::PI).sqrt() * sigma * (-0.5 * d.abs()).exp() * erfcx(sigma / (2.0 * 2f64.sqrt()));
    norm * (gauss - tail)
}

/// Large-detuning expansion of `φ₂(d)` through order `δ^{-2}` (unit coupling).
pub fn large_delta_asymptotic(d: f64, sigma: f64, delta: f64, m: usize) -> Complex64 {
    let norm = (sigma * std::f64::consts::PI.sqrt()).powf(-0.5);
    let mf = m as f64;
    let gauss = (-d * d / (2.0 * sigma * sigma)).exp();
    let renorm = Complex64::new(1.0 - 2.0 * mf * mf / (delta * delta), -2.0 * mf / delta);
    let mut out = renorm * gauss;
    if m > 0 {
        let a = d.abs();
        let tail = laguerre_assoc1(m - 1, a) * (-0.5 * a).exp() / (delta * delta);
        out += Complex64::from_polar(tail, delta * a);
    }
    out * norm
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_closed_forms() {
        let i = Complex64::i();
        for x in [0.0, 0.7, 3.0] {
            for m in [2, 4, 6] {
                assert_eq!(irreducible_T_degenerate(x, 0.0, m), Complex64::new(0.0, 0.0));
            }
            for m in [1, 3, 5] {
                let want = 2.0 * i * (-0.5 * x).exp();
                assert!((irreducible_T_degenerate(x, 0.0, m) - want).norm() < 1e-15);
            }
            let delta = 0.5;
            let want = -2.0 * Complex64::new(-0.5 * x, delta * x).exp() / Complex64::new(2.0 * delta, 1.0);
            assert!((irreducible_T_degenerate(x, delta, 1) - want).norm() < 1e-15);
        }
    }

    #[test]
    fn m1_f_is_constant() {
        let delta = 0.5;
        let want = Complex64::i() / Complex64::new(2.0 * delta, 1.0);
        assert!((f_polynomial(delta, 4.0, 1) - want).norm() < 1e-15);
    }

    #[test]
    fn small_detuning_approaches_parity_branch() {
        for m in 1..=8 {
            for x in [0.0, 1.0, 5.0] {
                let exact = irreducible_T_degenerate(x, 0.0, m);
                let near = irreducible_T_degenerate(x, 1e-7, m);
                assert!((exact - near).norm() < 1e-5, "M={m} x={x}: {exact} vs {near}");
            }
        }
    }

    #[test]
    fn ordering_guard() {
        let e = EmitterArray::new(vec![0.0, 1.0]).unwrap();
        assert_eq!(irreducible_T_distinct(-0.1, 1.0, 0.0, &e).unwrap(), Complex64::new(0.0, 0.0));
        assert_eq!(irreducible_T_distinct(1.0, -0.1, 0.0, &e).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn single_emitter_distinct_matches_degenerate() {
        let e = EmitterArray::new(vec![0.0]).unwrap();
        for x in [0.0, 2.0] {
            let a = irreducible_T_distinct(x, 0.5, 1.0, &e).unwrap();
            let b = irreducible_T_degenerate(x + 0.5, 0.5, 1);
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn asymptotic_tends_to_input() {
        let g = |d: f64| (2.0f64 * std::f64::consts::PI.sqrt()).powf(-0.5) * (-d * d / 8.0).exp();
        for d in [-3.0, 0.0, 1.5] {
            assert!((large_delta_asymptotic(d, 2.0, 1e9, 3) - g(d)).norm() < 1e-8);
        }
    }
}
