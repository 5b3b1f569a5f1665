//! A resonant Gaussian photon through five identical emitters: the
//! transmitted norm, the outgoing density, and the zeros of the impulse
//! response next to the Laguerre roots.

use chiral_scatter::single_photon::{default_grid, kernel_single, propagate_single_parts};
use chiral_scatter::specfun::laguerre_assoc1_roots;
use chiral_scatter::{EmitterArray, GaussianPacket1};

fn main() -> chiral_scatter::Result<()> {
    let m = 5;
    let emitters = EmitterArray::degenerate(m, 0.0);
    let packet = GaussianPacket1::new(0.0, 2.0)?;
    let grid = default_grid(&packet, &emitters)?;
    let out = propagate_single_parts(&packet, &emitters, &grid)?;
    println!("M = {m}, σ = {}, {} grid points", packet.sigma, grid.n_points());
    println!("norm in  {:.12}", out.incoming.norm());
    println!("norm out {:.12}", out.total.norm());

    println!("\n{:>8} {:>12} {:>12}", "y", "|φ_in|²", "|φ_out|²");
    let (rho_in, rho_out) = (out.incoming.density(), out.total.density());
    for (k, y) in grid.points().enumerate().step_by(40) {
        if !(-40.0..=8.0).contains(&y) {
            continue;
        }
        println!("{y:8.2} {:12.6} {:12.6}", rho_in[k], rho_out[k]);
    }

    // Zeros of the kernel sit at u = −x_j, x_j the roots of L^{(1)}_{M−1}.
    println!("\nkernel minima vs −(Laguerre roots):");
    let du = 1e-3;
    let dens = |u: f64| kernel_single(u, &emitters, 0.0).unwrap().norm_sqr();
    let mut u = -30.0;
    let mut roots: Vec<f64> = laguerre_assoc1_roots(m - 1).iter().map(|x| -x).collect();
    roots.sort_by(f64::total_cmp);
    let mut roots = roots.into_iter();
    while u < -du {
        if dens(u) < dens(u - du) && dens(u) <= dens(u + du) {
            println!("  {u:9.3}   {:9.3}", roots.next().unwrap_or(f64::NAN));
        }
        u += du;
    }
    Ok(())
}
