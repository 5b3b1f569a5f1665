//! Single-photon scattering: transmission phase, real-space response kernel
//! and Gaussian packet propagation.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::cluster::{coefficients, SumRule};
use crate::error::{Error, Result};
use crate::model::{is_degenerate, min_pairwise_gap, EmitterArray, GaussianPacket1, Grid, SampledWave};
use crate::specfun::laguerre_assoc1;

/// Largest admissible grid spacing relative to the packet width.
pub const MAX_SPACING_PER_SIGMA: f64 = 1.0 / 16.0;
/// Largest admissible grid spacing in units of `1/κ`.
pub const MAX_SPACING_KAPPA: f64 = 0.05;

// Half-width (in units of 1/σ) of the spectral window: e^{-w²/2} = 1e-16 at the edge.
const SPECTRAL_HALF_WIDTH: f64 = 8.584_6;
// Relative amplitude at which the response tail is considered gone.
const TAIL_CUTOFF: f64 = 1e-17;

/// The coefficients `C_a` of the distinct-detuning response.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatterCoeffs {
    pub c: Vec<Complex64>,
}

/// Transmission amplitude `t(k) = Π_a (k−Δ_a−iκ_a/2)/(k−Δ_a+iκ_a/2)`.
pub fn t_single(k: f64, emitters: &EmitterArray) -> Complex64 {
    emitters
        .detunings()
        .iter()
        .zip(emitters.couplings())
        .map(|(&d, &kap)| {
            let w = Complex64::new(k - d, 0.5 * kap);
            w.conj() / w
        })
        .product()
}

pub fn scatter_coeffs(emitters: &EmitterArray) -> Result<ScatterCoeffs> {
    let kappa = emitters.uniform_coupling()?;
    let min_gap = min_pairwise_gap(emitters);
    if min_gap < emitters.degeneracy_tol() {
        return Err(Error::DegenerateDetunings {
            min_gap,
            tol: emitters.degeneracy_tol(),
        });
    }
    Ok(ScatterCoeffs {
        c: coefficients(emitters.detunings(), kappa),
    })
}

/// Scattered part of the response to a δ-function input at retarded
/// coordinate `u = y − z`, in the frame rotating at `delta_offset`.
///
/// Zero for `u > 0`. Degenerate arrays use the Laguerre closed form.
pub fn kernel_single(u: f64, emitters: &EmitterArray, delta_offset: f64) -> Result<Complex64> {
    Ok(Kernel::new(emitters, delta_offset)?.eval(u))
}

/// [`kernel_single`] with the branch decision and coefficients precomputed,
/// for repeated evaluation.
#[derive(Debug, Clone)]
pub struct Kernel {
    kappa: f64,
    offset: f64,
    form: KernelForm,
}

#[derive(Debug, Clone)]
enum KernelForm {
    Empty,
    Degenerate { m: usize, detuning: f64 },
    Distinct(SumRule),
}

impl Kernel {
    pub fn new(emitters: &EmitterArray, delta_offset: f64) -> Result<Self> {
        if emitters.is_empty() {
            return Ok(Self {
                kappa: 1.0,
                offset: delta_offset,
                form: KernelForm::Empty,
            });
        }
        let kappa = emitters.uniform_coupling()?;
        let form = if is_degenerate(emitters)? {
            KernelForm::Degenerate {
                m: emitters.len(),
                detuning: emitters.mean_detuning() - delta_offset,
            }
        } else {
            KernelForm::Distinct(SumRule::new(emitters.detunings(), kappa))
        };
        Ok(Self {
            kappa,
            offset: delta_offset,
            form,
        })
    }

    pub fn eval(&self, u: f64) -> Complex64 {
        if u > 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        match &self.form {
            KernelForm::Empty => Complex64::new(0.0, 0.0),
            KernelForm::Degenerate { m, detuning } => kernel_degenerate(u, *m, *detuning, self.kappa),
            KernelForm::Distinct(rule) => {
                let i = Complex64::i();
                -self.kappa * rule.sum(|l| ((i * (l - self.offset) + 0.5 * self.kappa) * u).exp())
            }
        }
    }
}

pub(crate) fn kernel_degenerate(u: f64, m: usize, detuning: f64, kappa: f64) -> Complex64 {
    let env = -kappa * laguerre_assoc1(m - 1, -kappa * u) * (0.5 * kappa * u).exp();
    Complex64::from_polar(1.0, detuning * u) * env
}

/// Distance beyond which the response kernel is below `1e-17 κ`.
pub(crate) fn tail_length(emitters: &EmitterArray) -> f64 {
    let m = emitters.len();
    if m == 0 {
        return 0.0;
    }
    let kmin = emitters.couplings().iter().copied().fold(f64::INFINITY, f64::min);
    // |L^{(1)}_{M-1}(x)| ≤ Σ_j C(M, M-1-j) x^j / j!
    let laguerre_bound = |x: f64| {
        let mut sum = 0.0;
        let mut binom = m as f64;
        let mut pow = 1.0;
        for j in 0..m {
            sum += binom * pow;
            binom *= (m - 1 - j) as f64 / (j + 2) as f64;
            pow *= x / (j + 1) as f64;
        }
        sum
    };
    let mut x = 0.0;
    while laguerre_bound(x) * (-0.5 * x).exp() >= TAIL_CUTOFF && x < 4000.0 {
        x += 0.5;
    }
    let mut tail = x / kmin;
    if let (Ok(kappa), Ok(false)) = (emitters.uniform_coupling(), is_degenerate(emitters)) {
        if emitters.spread() > crate::cluster::CLUSTER_RADIUS * kappa {
            let total: f64 = coefficients(emitters.detunings(), kappa).iter().map(|c| c.norm()).sum();
            tail = tail.max(2.0 / kappa * (total / TAIL_CUTOFF).ln());
        }
    }
    tail.min(4000.0 / kmin)
}

pub(crate) fn check_spacing(grid: &Grid, sigma: f64, kappa_max: f64) -> Result<()> {
    let spacing = grid.spacing();
    let limit = (sigma * MAX_SPACING_PER_SIGMA).min(MAX_SPACING_KAPPA / kappa_max);
    if spacing > limit {
        return Err(Error::GridTooCoarse { spacing, limit });
    }
    Ok(())
}

/// Finest spacing [`propagate_single`] accepts for this input.
pub fn spacing_limit(sigma: f64, emitters: &EmitterArray) -> f64 {
    (sigma * MAX_SPACING_PER_SIGMA).min(MAX_SPACING_KAPPA / kappa_max(emitters))
}

/// Grid covering the incoming packet and the whole scattered tail behind it.
pub fn default_grid(packet: &GaussianPacket1, emitters: &EmitterArray) -> Result<Grid> {
    let reach = 9.0 * packet.sigma;
    let start = packet.center - reach - tail_length(emitters);
    let stop = packet.center + reach;
    let limit = spacing_limit(packet.sigma, emitters);
    Grid::new(start, stop, ((stop - start) / limit).ceil() as usize + 1)
}

fn kappa_max(emitters: &EmitterArray) -> f64 {
    if emitters.is_empty() {
        1.0
    } else {
        emitters.couplings().iter().copied().fold(0.0, f64::max)
    }
}

/// Incoming, scattered and total single-photon amplitudes on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SinglePhotonOutput {
    pub incoming: SampledWave,
    pub scattered: SampledWave,
    pub total: SampledWave,
}

/// Outgoing amplitude `φ_out(y)` for a Gaussian input.
pub fn propagate_single(packet: &GaussianPacket1, emitters: &EmitterArray, grid: &Grid) -> Result<SampledWave> {
    Ok(propagate_single_parts(packet, emitters, grid)?.total)
}

/// As [`propagate_single`], keeping the unscattered and scattered parts apart.
///
/// The scattered part `(t−1)·φ̃` is transformed back with the trapezoid rule on
/// a spectral step chosen so that periodic images of the output fall outside
/// the grid; the unscattered part is added analytically.
pub fn propagate_single_parts(
    packet: &GaussianPacket1,
    emitters: &EmitterArray,
    grid: &Grid,
) -> Result<SinglePhotonOutput> {
    check_spacing(grid, packet.sigma, kappa_max(emitters))?;
    let ys: Vec<f64> = grid.points().collect();
    let incoming: Vec<Complex64> = ys.iter().map(|&y| packet.amplitude(y)).collect();

    let scattered = if emitters.is_empty() {
        vec![Complex64::new(0.0, 0.0); ys.len()]
    } else {
        let reach = SPECTRAL_HALF_WIDTH * packet.sigma;
        let support_lo = packet.center - reach - tail_length(emitters);
        let support_hi = packet.center + reach;
        let period = (grid.stop() - support_lo).max(support_hi - grid.start()) + 1.0;
        let h = 2.0 * std::f64::consts::PI / period;
        let half = SPECTRAL_HALF_WIDTH / packet.sigma;
        let n = (half / h).ceil() as i64;
        let mean = emitters.mean_detuning();
        let q0 = packet.delta - n as f64 * h;
        let amps: Vec<Complex64> = (0..=2 * n)
            .map(|j| {
                let q = q0 + j as f64 * h;
                (t_single(mean + q, emitters) - 1.0) * packet.spectrum(q) * (h / (2.0 * std::f64::consts::PI))
            })
            .collect();
        ys.par_iter().map(|&y| phasor_sum(&amps, q0, h, y)).collect()
    };

    let total = incoming.iter().zip(&scattered).map(|(a, b)| a + b).collect();
    Ok(SinglePhotonOutput {
        incoming: SampledWave::new(*grid, incoming)?,
        scattered: SampledWave::new(*grid, scattered)?,
        total: SampledWave::new(*grid, total)?,
    })
}

/// `Σ_j a_j exp(i (q0 + j h) y)` with a rotation recurrence re-anchored every
/// 32 steps.
pub(crate) fn phasor_sum(amps: &[Complex64], q0: f64, h: f64, y: f64) -> Complex64 {
    let step = Complex64::from_polar(1.0, h * y);
    let mut acc = Complex64::new(0.0, 0.0);
    for (block, chunk) in amps.chunks(32).enumerate() {
        let mut ph = Complex64::from_polar(1.0, (q0 + (block * 32) as f64 * h) * y);
        for &a in chunk {
            acc += a * ph;
            ph *= step;
        }
    }
    acc
}
