//! Far off resonance the emitters barely touch the pair; the leftover
//! correction approaches a closed form and the error falls like δ⁻³.

use chiral_scatter::two_photon::{large_delta_asymptotic, two_photon_out};
use chiral_scatter::{EmitterArray, GaussianPacket2, Grid};

fn main() -> chiral_scatter::Result<()> {
    let (m, sigma) = (3, 1.0);
    let emitters = EmitterArray::degenerate(m, 0.0);
    let grid = Grid::symmetric(30.0, 0.05)?;
    let mut last: Option<(f64, f64)> = None;
    println!("{:>6} {:>12} {:>8}", "δ", "residual", "slope");
    for delta in [10.0, 20.0, 40.0, 80.0] {
        let out = two_photon_out(&GaussianPacket2::wide(delta, sigma)?, &emitters, &grid)?;
        let res = grid
            .points()
            .zip(&out.phi2)
            .map(|(d, p)| (p - large_delta_asymptotic(d, sigma, delta, m)).norm())
            .fold(0.0, f64::max);
        let slope = last.map_or(f64::NAN, |(d0, r0)| (res / r0).ln() / (delta / d0).ln());
        println!("{delta:6.0} {res:12.3e} {slope:8.3}");
        last = Some((delta, res));
    }
    Ok(())
}
