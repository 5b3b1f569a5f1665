//! Domain types shared by every scattering routine.
//!
//! All quantities are dimensionless: frequencies are measured in units of the
//! reference coupling `kappa` and lengths (retarded coordinates) in units of
//! `1/kappa`. [`UnitScale`] converts to and from physical units at the I/O
//! boundary.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Default gap (in units of kappa) below which two detunings are treated as equal.
pub const DEFAULT_DEGENERACY_TOL: f64 = 1e-6;

/// Array of two-level emitters side-coupled to the chiral channel.
///
/// Positions are not represented: the outgoing state of a unidirectional
/// channel does not depend on them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmitterArray {
    detunings: Vec<f64>,
    couplings: Vec<f64>,
    degeneracy_tol: f64,
}

impl EmitterArray {
    /// Emitters with the given detunings and unit coupling.
    pub fn new(detunings: Vec<f64>) -> Result<Self> {
        let couplings = vec![1.0; detunings.len()];
        Self::with_couplings(detunings, couplings)
    }

    /// `m` emitters that all sit at detuning `detuning`.
    pub fn degenerate(m: usize, detuning: f64) -> Self {
        Self::new(vec![detuning; m]).expect("finite detuning")
    }

    pub fn with_couplings(detunings: Vec<f64>, couplings: Vec<f64>) -> Result<Self> {
        if detunings.len() != couplings.len() {
            return Err(invalid(
                "couplings",
                format!(
                    "{} couplings for {} detunings",
                    couplings.len(),
                    detunings.len()
                ),
            ));
        }
        if let Some(d) = detunings.iter().find(|d| !d.is_finite()) {
            return Err(invalid("detunings", format!("non-finite value {d}")));
        }
        if let Some(k) = couplings.iter().find(|k| !(k.is_finite() && **k > 0.0)) {
            return Err(invalid("couplings", format!("must be positive, got {k}")));
        }
        Ok(Self {
            detunings,
            couplings,
            degeneracy_tol: DEFAULT_DEGENERACY_TOL,
        })
    }

    pub fn with_tolerance(mut self, tol: f64) -> Result<Self> {
        if !(tol.is_finite() && tol > 0.0) {
            return Err(invalid("degeneracy_tol", format!("must be positive, got {tol}")));
        }
        self.degeneracy_tol = tol;
        Ok(self)
    }

    pub fn detunings(&self) -> &[f64] {
        &self.detunings
    }

    pub fn couplings(&self) -> &[f64] {
        &self.couplings
    }

    pub fn degeneracy_tol(&self) -> f64 {
        self.degeneracy_tol
    }

    pub fn len(&self) -> usize {
        self.detunings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.detunings.is_empty()
    }

    /// Arithmetic mean of the detunings; zero for an empty array.
    pub fn mean_detuning(&self) -> f64 {
        if self.detunings.is_empty() {
            0.0
        } else {
            self.detunings.iter().sum::<f64>() / self.detunings.len() as f64
        }
    }

    /// Largest distance of a detuning from the mean.
    pub fn spread(&self) -> f64 {
        let mean = self.mean_detuning();
        self.detunings
            .iter()
            .map(|d| (d - mean).abs())
            .fold(0.0, f64::max)
    }

    /// The common coupling, or [`Error::NonuniformCoupling`].
    ///
    /// An empty array reports unit coupling.
    pub fn uniform_coupling(&self) -> Result<f64> {
        match self.couplings.first() {
            None => Ok(1.0),
            Some(&k) if self.couplings.iter().all(|&c| c == k) => Ok(k),
            Some(_) => Err(Error::NonuniformCoupling),
        }
    }

    pub fn min_pairwise_gap(&self) -> f64 {
        min_pairwise_gap(self)
    }

    pub fn is_degenerate(&self) -> Result<bool> {
        is_degenerate(self)
    }

    /// Copy with detunings (and couplings) reordered by `perm`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.len());
        Self {
            detunings: perm.iter().map(|&i| self.detunings[i]).collect(),
            couplings: perm.iter().map(|&i| self.couplings[i]).collect(),
            degeneracy_tol: self.degeneracy_tol,
        }
    }
}

/// Smallest `|Δa − Δb|` over distinct pairs, `+∞` for fewer than two emitters.
pub fn min_pairwise_gap(emitters: &EmitterArray) -> f64 {
    let mut sorted = emitters.detunings.clone();
    sorted.sort_by(f64::total_cmp);
    sorted
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min)
}

/// Whether all detunings coincide within the degeneracy tolerance.
///
/// Arrays where only some detunings cluster are rejected with
/// [`Error::MixedDegeneracy`]; no mixed closed form exists for them.
pub fn is_degenerate(emitters: &EmitterArray) -> Result<bool> {
    let tol = emitters.degeneracy_tol;
    let min_gap = min_pairwise_gap(emitters);
    if !(min_gap < tol) {
        return Ok(false);
    }
    let spread = emitters.spread();
    if spread < tol {
        Ok(true)
    } else {
        Err(Error::MixedDegeneracy {
            min_gap,
            spread,
            tol,
        })
    }
}

/// Normalisation `σ^{-1/2} π^{-1/4}` of a unit-norm Gaussian of width `σ`.
pub(crate) fn gaussian_norm(sigma: f64) -> f64 {
    (sigma * std::f64::consts::PI.sqrt()).powf(-0.5)
}

/// Incoming single-photon Gaussian packet.
///
/// Amplitudes are expressed in the frame rotating at the mean emitter
/// frequency, so the carrier is `exp(i δ x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianPacket1 {
    pub delta: f64,
    pub sigma: f64,
    pub center: f64,
}

impl GaussianPacket1 {
    pub fn new(delta: f64, sigma: f64) -> Result<Self> {
        Self::centered(delta, sigma, 0.0)
    }

    pub fn centered(delta: f64, sigma: f64, center: f64) -> Result<Self> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(invalid("sigma", format!("must be positive, got {sigma}")));
        }
        if !delta.is_finite() || !center.is_finite() {
            return Err(invalid("delta", "detuning and centre must be finite"));
        }
        Ok(Self {
            delta,
            sigma,
            center,
        })
    }

    pub fn amplitude(&self, x: f64) -> Complex64 {
        let u = x - self.center;
        let env = gaussian_norm(self.sigma) * (-u * u / (2.0 * self.sigma * self.sigma)).exp();
        Complex64::from_polar(env, self.delta * u)
    }

    /// Fourier amplitude `∫ e^{-ikx} φ(x) dx` at relative momentum `q`
    /// (measured from the mean emitter frequency).
    pub fn spectrum(&self, q: f64) -> Complex64 {
        let s = self.sigma;
        let w = q - self.delta;
        let mag = gaussian_norm(s) * (2.0 * std::f64::consts::PI).sqrt() * s * (-0.5 * s * s * w * w).exp();
        Complex64::from_polar(mag, -q * self.center)
    }
}

/// Incoming two-photon packet: Gaussian in the relative coordinate with
/// width `sigma`, centre-of-mass width `mu` (`f64::INFINITY` for the
/// wide-pulse limit) and carrier detuning `delta` per photon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianPacket2 {
    pub delta: f64,
    pub sigma: f64,
    pub mu: f64,
}

impl GaussianPacket2 {
    pub fn wide(delta: f64, sigma: f64) -> Result<Self> {
        Self::new(delta, sigma, f64::INFINITY)
    }

    pub fn new(delta: f64, sigma: f64, mu: f64) -> Result<Self> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(invalid("sigma", format!("must be positive, got {sigma}")));
        }
        if !(mu > 0.0) || mu.is_nan() {
            return Err(invalid("mu", format!("must be positive or infinite, got {mu}")));
        }
        if !delta.is_finite() {
            return Err(invalid("delta", "must be finite"));
        }
        Ok(Self { delta, sigma, mu })
    }

    pub fn is_wide(&self) -> bool {
        self.mu == f64::INFINITY
    }

    /// Relative-coordinate amplitude `(σ√π)^{-1/2} exp(-d²/2σ²)`.
    pub fn relative(&self, d: f64) -> f64 {
        gaussian_norm(self.sigma) * (-d * d / (2.0 * self.sigma * self.sigma)).exp()
    }

    /// `∫ e^{-ikd} φ(d) dd` of the relative amplitude.
    pub fn relative_spectrum(&self, k: f64) -> f64 {
        let s = self.sigma;
        gaussian_norm(s) * (2.0 * std::f64::consts::PI).sqrt() * s * (-0.5 * s * s * k * k).exp()
    }
}

/// Uniform sampling grid `start, start + h, …, stop`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    start: f64,
    stop: f64,
    n_points: usize,
}

impl Grid {
    pub fn new(start: f64, stop: f64, n_points: usize) -> Result<Self> {
        if !start.is_finite() || !stop.is_finite() {
            return Err(invalid("grid", "bounds must be finite"));
        }
        if !(stop > start) {
            return Err(invalid("grid", format!("stop {stop} must exceed start {start}")));
        }
        if n_points < 2 {
            return Err(invalid("grid", format!("need at least 2 points, got {n_points}")));
        }
        Ok(Self {
            start,
            stop,
            n_points,
        })
    }

    /// Grid on `[-half_width, half_width]` with the given spacing (rounded so
    /// that the end points are hit exactly and `0` is a grid point).
    pub fn symmetric(half_width: f64, spacing: f64) -> Result<Self> {
        let intervals = (half_width / spacing).ceil() as usize;
        Self::new(-half_width, half_width, 2 * intervals.max(1) + 1)
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn stop(&self) -> f64 {
        self.stop
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn spacing(&self) -> f64 {
        (self.stop - self.start) / (self.n_points - 1) as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        if i + 1 == self.n_points {
            self.stop
        } else {
            self.start + i as f64 * self.spacing()
        }
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(move |i| self.point(i))
    }

    pub fn is_symmetric(&self) -> bool {
        (self.start + self.stop).abs() <= 1e-9 * self.spacing()
    }

    /// Trapezoid-rule integral of sampled values.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        assert_eq!(values.len(), self.n_points);
        let inner: f64 = values[1..values.len() - 1].iter().sum();
        self.spacing() * (inner + 0.5 * (values[0] + values[values.len() - 1]))
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.start * factor, self.stop * factor, self.n_points)
    }
}

/// Complex amplitudes sampled on a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct SampledWave {
    pub grid: Grid,
    pub amplitudes: Vec<Complex64>,
}

impl SampledWave {
    pub fn new(grid: Grid, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != grid.n_points() {
            return Err(invalid(
                "amplitudes",
                format!("{} values for {} grid points", amplitudes.len(), grid.n_points()),
            ));
        }
        Ok(Self { grid, amplitudes })
    }

    pub fn density(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn norm(&self) -> f64 {
        self.grid.integrate(&self.density())
    }

    /// Largest pointwise distance to another wave on the same grid.
    pub fn sup_distance(&self, other: &SampledWave) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Conversion between physical units and the dimensionless `kappa = 1` units
/// used internally.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitScale {
    pub kappa: f64,
}

impl Default for UnitScale {
    fn default() -> Self {
        Self { kappa: 1.0 }
    }
}

impl UnitScale {
    pub fn new(kappa: f64) -> Result<Self> {
        if !(kappa.is_finite() && kappa > 0.0) {
            return Err(invalid("kappa", format!("must be positive, got {kappa}")));
        }
        Ok(Self { kappa })
    }

    pub fn frequency_to_internal(&self, f: f64) -> f64 {
        f / self.kappa
    }

    pub fn frequency_to_physical(&self, f: f64) -> f64 {
        f * self.kappa
    }

    pub fn length_to_internal(&self, x: f64) -> f64 {
        x * self.kappa
    }

    pub fn length_to_physical(&self, x: f64) -> f64 {
        x / self.kappa
    }
}
