//! Two resonant photons on arrays of growing size. Odd arrays all give the
//! same pair wavefunction; even arrays hand back the input.

use chiral_scatter::two_photon::{default_grid, parity_limit, two_photon_out};
use chiral_scatter::{EmitterArray, GaussianPacket2};

fn main() -> chiral_scatter::Result<()> {
    let sigma = 2.0;
    let packet = GaussianPacket2::wide(0.0, sigma)?;
    let grid = default_grid(&packet, &EmitterArray::degenerate(1, 0.0))?;
    let centre = grid.n_points() / 2;
    println!("{:>3} {:>14} {:>14} {:>12}", "M", "φ₂(0)", "limit", "sup |Δ|");
    for m in 1..=8 {
        let out = two_photon_out(&packet, &EmitterArray::degenerate(m, 0.0), &grid)?;
        let sup = grid
            .points()
            .zip(&out.phi2)
            .map(|(d, p)| (p - parity_limit(d, sigma, m)).norm())
            .fold(0.0, f64::max);
        println!(
            "{m:3} {:14.10} {:14.10} {sup:12.2e}",
            out.phi2[centre].re,
            parity_limit(0.0, sigma, m)
        );
    }
    Ok(())
}
