//! On-shell two-photon T in momentum space three ways: the pole sum (both
//! index placements), the Fourier transform of the coordinate form, and for
//! two emitters the composition of single-emitter scattering.

use chiral_scatter::oracle::{oracle_compose_m2, oracle_fourier_t, oracle_tmft, TmftVariant};
use chiral_scatter::EmitterArray;

fn main() -> chiral_scatter::Result<()> {
    let (d1, d2) = (-0.4, 0.8);
    let emitters = EmitterArray::new(vec![d1, d2])?;
    let samples = [(0.3, -0.5, 0.9), (1.1, 0.2, -0.4), (-0.2, -0.9, 0.6)];
    let composed = oracle_compose_m2(&samples, d1, d2)?;
    for (&(p1, p2, k1), c) in samples.iter().zip(&composed) {
        println!("p = ({p1}, {p2}), k1 = {k1}");
        println!("  same index   {:.10}", oracle_tmft(p1, p2, k1, &emitters, TmftVariant::SameIndex)?);
        println!("  mixed index  {:.10}", oracle_tmft(p1, p2, k1, &emitters, TmftVariant::MixedIndex)?);
        println!("  Fourier      {:.10}", oracle_fourier_t(p1, p2, k1, &emitters)?);
        println!("  composed     {:.10}", c.irreducible);
    }
    Ok(())
}
