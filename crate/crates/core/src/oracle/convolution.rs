use num_complex::Complex64;

use crate::error::Result;
use crate::model::{EmitterArray, GaussianPacket1, Grid, SampledWave};
use crate::quad::GaussKronrod;
use crate::single_photon::Kernel;

// Beyond this many widths the incoming Gaussian is below 1e-17 of its peak.
const REACH: f64 = 8.9;

/// `φ_in(y) + ∫ K(y−x) φ_in(x) dx` by adaptive quadrature at each grid point.
pub fn oracle_single_convolution(packet: &GaussianPacket1, emitters: &EmitterArray, grid: &Grid) -> Result<SampledWave> {
    oracle_single_convolution_with(packet, emitters, grid, &GaussKronrod::default())
}

pub fn oracle_single_convolution_with(
    packet: &GaussianPacket1,
    emitters: &EmitterArray,
    grid: &Grid,
    quad: &GaussKronrod,
) -> Result<SampledWave> {
    let kernel = Kernel::new(emitters, emitters.mean_detuning())?;
    let lo = packet.center - REACH * packet.sigma;
    let hi = packet.center + REACH * packet.sigma;
    let amps = grid
        .points()
        .map(|y| {
            let direct = packet.amplitude(y);
            if emitters.is_empty() || y >= hi {
                return Ok(direct);
            }
            // The kernel vanishes for x < y; split where the integrand has
            // structure so the adaptive rule starts from a sensible partition.
            let mut breaks = vec![y];
            for p in [lo, packet.center] {
                if p > y {
                    breaks.push(p);
                }
            }
            breaks.push(hi);
            let mut fine = Vec::new();
            for w in breaks.windows(2) {
                let pieces = ((w[1] - w[0]) / packet.sigma.min(2.0)).ceil().max(1.0) as usize;
                for j in 0..pieces {
                    fine.push(w[0] + (w[1] - w[0]) * j as f64 / pieces as f64);
                }
            }
            fine.push(hi);
            let f = |x: f64| kernel.eval(y - x) * packet.amplitude(x);
            Ok(direct + quad.integrate_pieces(&f, &fine)?)
        })
        .collect::<Result<Vec<Complex64>>>()?;
    SampledWave::new(*grid, amps)
}
