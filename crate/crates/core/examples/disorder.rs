//! Ensemble average of the resonant pair density over Gaussian detuning
//! disorder, compared with the clean array.

use chiral_scatter::disorder::{ensemble_average, DisorderConfig};
use chiral_scatter::two_photon::two_photon_out;
use chiral_scatter::{EmitterArray, GaussianPacket2, Grid};

fn main() -> chiral_scatter::Result<()> {
    let grid = Grid::symmetric(8.0, 0.05)?;
    let (m, sigma) = (3, 2.0);
    let clean = two_photon_out(&GaussianPacket2::wide(0.0, sigma)?, &EmitterArray::degenerate(m, 0.0), &grid)?;
    let mut columns = Vec::new();
    for spread in [0.25, 0.5, 1.0] {
        let cfg = DisorderConfig::new(m, spread, 0.0, sigma, 2000, 7, grid)?;
        columns.push((spread, ensemble_average(&cfg)?));
    }
    print!("{:>7} {:>10}", "d", "clean");
    for (s, _) in &columns {
        print!(" {:>10} {:>9}", format!("Σ={s}"), "±");
    }
    println!();
    for (k, d) in grid.points().enumerate().step_by(20) {
        print!("{d:7.2} {:10.5}", clean.density[k]);
        for (_, st) in &columns {
            print!(" {:10.5} {:9.1e}", st.mean_density[k], st.std_error[k]);
        }
        println!();
    }
    Ok(())
}
