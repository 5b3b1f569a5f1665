//! Ensemble averages over inhomogeneously broadened emitter arrays.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::model::{min_pairwise_gap, EmitterArray, GaussianPacket2, Grid, DEFAULT_DEGENERACY_TOL};
use crate::two_photon::two_photon_out;

/// Consecutive rejected draws tolerated before giving up.
pub const MAX_RESAMPLES: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisorderConfig {
    /// Number of emitters.
    pub m: usize,
    /// Standard deviation `Σ` of the detuning distribution.
    pub disorder: f64,
    /// Carrier detuning from the sample-mean emitter frequency.
    pub delta: f64,
    /// Relative width of the incoming photon pair.
    pub sigma: f64,
    pub n_samples: usize,
    pub seed: u64,
    pub grid: Grid,
    /// Shift every draw so that `Σ_a Δ_a = 0` exactly.
    pub constrain_mean: bool,
    pub degeneracy_tol: f64,
}

impl DisorderConfig {
    pub fn new(m: usize, disorder: f64, delta: f64, sigma: f64, n_samples: usize, seed: u64, grid: Grid) -> Result<Self> {
        let cfg = Self {
            m,
            disorder,
            delta,
            sigma,
            n_samples,
            seed,
            grid,
            constrain_mean: false,
            degeneracy_tol: DEFAULT_DEGENERACY_TOL,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.disorder >= 0.0 && self.disorder.is_finite()) {
            return Err(invalid("Sigma", format!("must be non-negative, got {}", self.disorder)));
        }
        if self.n_samples == 0 {
            return Err(invalid("samples", "need at least one sample"));
        }
        if !(self.degeneracy_tol > 0.0) {
            return Err(invalid("degeneracy_tol", "must be positive"));
        }
        GaussianPacket2::wide(self.delta, self.sigma)?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleStats {
    pub grid: Grid,
    pub mean_density: Vec<f64>,
    pub median_abs_dev: Vec<f64>,
    pub mean_abs_dev: Vec<f64>,
    /// Standard error of `mean_density` (sample standard deviation / √n).
    pub std_error: Vec<f64>,
    pub n_samples_used: usize,
    pub n_resampled: usize,
}

/// Detunings of sample `sample_index`, a pure function of `(seed, index)`.
pub fn sample_detunings(config: &DisorderConfig, sample_index: u64) -> Result<EmitterArray> {
    Ok(draw(config, sample_index)?.0)
}

// Returns the array together with the number of rejected draws.
fn draw(config: &DisorderConfig, sample_index: u64) -> Result<(EmitterArray, usize)> {
    let make = |d: Vec<f64>| EmitterArray::new(d)?.with_tolerance(config.degeneracy_tol);
    if config.disorder == 0.0 {
        return Ok((make(vec![0.0; config.m])?, 0));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(sample_index);
    for rejected in 0..=MAX_RESAMPLES {
        let mut d: Vec<f64> = (0..config.m)
            .map(|_| {
                let z: f64 = StandardNormal.sample(&mut rng);
                config.disorder * z
            })
            .collect();
        if config.constrain_mean && !d.is_empty() {
            let mean = d.iter().sum::<f64>() / d.len() as f64;
            d.iter_mut().for_each(|x| *x -= mean);
        }
        let arr = make(d)?;
        if min_pairwise_gap(&arr) >= config.degeneracy_tol {
            return Ok((arr, rejected));
        }
    }
    Err(Error::ResampleLimitExceeded {
        attempts: MAX_RESAMPLES,
    })
}

/// Per-point mean of `|φ₂(d)|²` over the ensemble with deviation bands.
///
/// Samples are evaluated in parallel; every reduction runs in sample order
/// so the result does not depend on the thread count.
pub fn ensemble_average(config: &DisorderConfig) -> Result<EnsembleStats> {
    config.validate()?;
    let packet = GaussianPacket2::wide(config.delta, config.sigma)?;
    let samples: Vec<(Vec<f64>, usize)> = (0..config.n_samples as u64)
        .into_par_iter()
        .map(|i| {
            let (emitters, rejected) = draw(config, i)?;
            Ok((two_photon_out(&packet, &emitters, &config.grid)?.density, rejected))
        })
        .collect::<Result<_>>()?;

    let n = samples.len();
    let npts = config.grid.n_points();
    let mut stats = EnsembleStats {
        grid: config.grid,
        mean_density: Vec::with_capacity(npts),
        median_abs_dev: Vec::with_capacity(npts),
        mean_abs_dev: Vec::with_capacity(npts),
        std_error: Vec::with_capacity(npts),
        n_samples_used: n,
        n_resampled: samples.iter().map(|s| s.1).sum(),
    };
    let mut column = vec![0.0; n];
    for p in 0..npts {
        for (dst, s) in column.iter_mut().zip(&samples) {
            *dst = s.0[p];
        }
        let mean = mean(&column);
        let abs_dev: Vec<f64> = column.iter().map(|x| (x - mean).abs()).collect();
        let var = if n > 1 {
            pairwise_sum(&column.iter().map(|x| (x - mean) * (x - mean)).collect::<Vec<_>>()) / (n - 1) as f64
        } else {
            0.0
        };
        let med = median(&column);
        let med_dev: Vec<f64> = column.iter().map(|x| (x - med).abs()).collect();
        stats.mean_density.push(mean);
        stats.mean_abs_dev.push(pairwise_sum(&abs_dev) / n as f64);
        stats.median_abs_dev.push(median(&med_dev));
        stats.std_error.push((var / n as f64).sqrt());
    }
    Ok(stats)
}

fn pairwise_sum(x: &[f64]) -> f64 {
    if x.len() <= 8 {
        x.iter().sum()
    } else {
        let (a, b) = x.split_at(x.len() / 2);
        pairwise_sum(a) + pairwise_sum(b)
    }
}

// Anchored at the first value so identical samples reproduce it exactly.
fn mean(x: &[f64]) -> f64 {
    let x0 = x[0];
    let shifted: Vec<f64> = x.iter().map(|v| v - x0).collect();
    x0 + pairwise_sum(&shifted) / x.len() as f64
}

fn median(x: &[f64]) -> f64 {
    let mut v = x.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(m: usize, disorder: f64, n: usize) -> DisorderConfig {
        DisorderConfig::new(m, disorder, 0.0, 2.0, n, 7, Grid::new(-1.0, 1.0, 41).unwrap()).unwrap()
    }

    #[test]
    fn zero_disorder_is_exactly_degenerate() {
        let a = sample_detunings(&cfg(4, 0.0, 1), 3).unwrap();
        assert_eq!(a.detunings(), &[0.0; 4]);
        assert!(a.is_degenerate().unwrap());
    }

    #[test]
    fn draws_are_reproducible_and_distinct_per_index() {
        let c = cfg(5, 1.0, 1);
        assert_eq!(sample_detunings(&c, 11).unwrap(), sample_detunings(&c, 11).unwrap());
        assert_ne!(sample_detunings(&c, 11).unwrap(), sample_detunings(&c, 12).unwrap());
    }

    #[test]
    fn constrained_mean_is_zero() {
        let mut c = cfg(6, 0.8, 1);
        c.constrain_mean = true;
        let a = sample_detunings(&c, 0).unwrap();
        assert!(a.detunings().iter().sum::<f64>().abs() < 1e-14);
    }

    #[test]
    fn hopeless_tolerance_gives_up() {
        let mut c = cfg(3, 1e-9, 1);
        c.degeneracy_tol = 1.0;
        assert!(matches!(sample_detunings(&c, 0), Err(Error::ResampleLimitExceeded { .. })));
    }

    #[test]
    fn statistics_helpers() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
        let v = [0.1; 37];
        assert_eq!(mean(&v), 0.1);
    }

    #[test]
    fn single_sample_has_zero_median_deviation() {
        let s = ensemble_average(&cfg(2, 0.5, 1)).unwrap();
        assert!(s.median_abs_dev.iter().all(|&x| x == 0.0));
        assert!(s.mean_abs_dev.iter().all(|&x| x == 0.0));
    }
}
