//! Brute-force contour integrals for one and two photons against the
//! closed-form kernels, and their insensitivity to where the contours run.

use chiral_scatter::oracle::{four_coordinate_t, oracle_yudson, ContourSpec};
use chiral_scatter::single_photon::kernel_single;
use chiral_scatter::{Complex64, EmitterArray};

fn main() -> chiral_scatter::Result<()> {
    let emitters = EmitterArray::new(vec![-0.4, 0.6])?;

    let one = ContourSpec::standard(1, 1.0);
    println!("one photon, z = 0");
    for y in [-0.5, -2.0, -6.0] {
        let v = oracle_yudson(&emitters, &[0.0], &[y], &one)?;
        let k = kernel_single(y, &emitters, 0.0)?;
        println!("  y={y:5.1}  contour {v:.10}  kernel {k:.10}");
    }

    let two = ContourSpec::standard(2, 1.0);
    let (y, z) = ([-2.5, -0.8], [0.9, 0.2]);
    let v = oracle_yudson(&emitters, &z, &y, &two)?;
    let kk = kernel_single(y[0] - z[0], &emitters, 0.0)? * kernel_single(y[1] - z[1], &emitters, 0.0)?;
    let closed = kk + Complex64::i() * four_coordinate_t(y, z, &emitters)?;
    let raised = oracle_yudson(&emitters, &z, &y, &two.raised(0.25))?;
    println!("\ntwo photons, y = {y:?}, z = {z:?}");
    println!("  contour      {v:.10}");
    println!("  K·K + iT     {closed:.10}");
    println!("  raised κ/4   {raised:.10}");
    Ok(())
}
