use num_complex::Complex64;

use super::direct_coefficients;
use crate::error::{Error, Result};
use crate::model::{min_pairwise_gap, EmitterArray};
use crate::quad::GaussKronrod;
use crate::two_photon::irreducible_T_distinct;

/// Index placement in the momentum factors of the pole-sum formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TmftVariant {
    /// `α_a` in both the outgoing (p) and incoming (k) factors.
    SameIndex,
    /// `α_a` in the outgoing factors, `α_b` in the incoming ones.
    MixedIndex,
}

fn distinct_kappa(emitters: &EmitterArray) -> Result<f64> {
    let kappa = emitters.uniform_coupling()?;
    let min_gap = min_pairwise_gap(emitters);
    if min_gap < emitters.degeneracy_tol() {
        return Err(Error::DegenerateDetunings {
            min_gap,
            tol: emitters.degeneracy_tol(),
        });
    }
    Ok(kappa)
}

/// Momentum-space irreducible T on the energy shell `p1 + p2 = k1 + k2`,
/// with the energy δ-function stripped, from the double pole sum.
pub fn oracle_tmft(p1: f64, p2: f64, k1: f64, emitters: &EmitterArray, variant: TmftVariant) -> Result<Complex64> {
    let kappa = distinct_kappa(emitters)?;
    let d = emitters.detunings();
    let c = direct_coefficients(d, kappa);
    let e = p1 + p2;
    let k2 = e - k1;
    let alpha: Vec<Complex64> = d.iter().map(|&x| Complex64::new(x, -0.5 * kappa)).collect();
    let pair = |x1: f64, x2: f64, a: Complex64| 1.0 / (x1 - a) + 1.0 / (x2 - a);
    let mut sum = Complex64::new(0.0, 0.0);
    for a in 0..d.len() {
        for b in 0..d.len() {
            let w = c[a] * c[b] / Complex64::new(d[a] - d[b], kappa);
            let kb = match variant {
                TmftVariant::SameIndex => alpha[a],
                TmftVariant::MixedIndex => alpha[b],
            };
            sum += w / (e - alpha[a] - alpha[b]) * pair(p1, p2, alpha[a]) * pair(k1, k2, kb);
        }
    }
    Ok(sum * Complex64::new(0.0, kappa.powi(3) / std::f64::consts::PI))
}

/// Numerical Fourier transform of the mixed-representation T-matrix:
/// `(1/2π) ∫∫ dΔy dΔz e^{−ipΔy + ikΔz} T⁺⁺(|Δy| + |Δz|)` with relative momenta
/// `p = (p1−p2)/2`, `k = (k1−k2)/2`.
pub fn oracle_fourier_t(p1: f64, p2: f64, k1: f64, emitters: &EmitterArray) -> Result<Complex64> {
    let kappa = distinct_kappa(emitters)?;
    let e = p1 + p2;
    let p = 0.5 * (p1 - p2);
    let k = 0.5 * (k1 - (e - k1));
    let inner_q = GaussKronrod::with_tolerance(1e-13, 1e-10);
    let outer_q = GaussKronrod::with_tolerance(1e-10, 1e-8);
    // T depends on |Δy| + |Δz| only, so the four quadrants fold into cosines.
    // Every term decays as e^{−κX/2}; beyond X = 80/κ nothing is left.
    let reach = 80.0 / kappa;
    let panels = |len: f64| -> Vec<f64> {
        let n = (len * kappa).ceil().max(1.0) as usize;
        (0..=n).map(|j| len * j as f64 / n as f64).collect()
    };
    let inner = |a: f64| -> Result<Complex64> {
        let f = |b: f64| irreducible_T_distinct(a, b, e, emitters).expect("validated") * (k * b).cos();
        inner_q.integrate_pieces(&f, &panels(reach - a))
    };
    let failure = std::cell::Cell::new(None);
    let outer = |a: f64| match inner(a) {
        Ok(v) => v * (p * a).cos(),
        Err(err) => {
            failure.set(Some(err));
            Complex64::new(0.0, 0.0)
        }
    };
    let v = outer_q.integrate_pieces(&outer, &panels(reach))?;
    if let Some(err) = failure.take() {
        return Err(err);
    }
    Ok(v * (4.0 / (2.0 * std::f64::consts::PI)))
}

/// Reducible and irreducible parts of the two-emitter two-photon S-matrix
/// obtained by composing single-emitter S-matrices (emitter 1 first).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComposedT {
    /// Coefficient of the elastic δ-functions: `t₁(p₁)t₁(p₂)t₂(p₁)t₂(p₂)`.
    pub reducible: Complex64,
    pub irreducible: Complex64,
}

// Single-emitter irreducible part: (κ²/π)(E−2α) Π 1/(x−α).
fn tau_single(p1: f64, p2: f64, k1: f64, k2: f64, alpha: Complex64, kappa: f64) -> Complex64 {
    let e = p1 + p2;
    kappa * kappa / std::f64::consts::PI * (e - 2.0 * alpha) / ((p1 - alpha) * (p2 - alpha) * (k1 - alpha) * (k2 - alpha))
}

fn t_one(k: f64, alpha: Complex64) -> Complex64 {
    (k - alpha.conj()) / (k - alpha)
}

/// Composition at each on-shell sample `(p1, p2, k1)`, `k2 = p1 + p2 − k1`,
/// for emitters at detunings `d1`, `d2` with unit coupling.
pub fn oracle_compose_m2(samples: &[(f64, f64, f64)], d1: f64, d2: f64) -> Result<Vec<ComposedT>> {
    let kappa = 1.0;
    if (d1 - d2).abs() < crate::model::DEFAULT_DEGENERACY_TOL {
        return Err(Error::DegenerateDetunings {
            min_gap: (d1 - d2).abs(),
            tol: crate::model::DEFAULT_DEGENERACY_TOL,
        });
    }
    let a1 = Complex64::new(d1, -0.5 * kappa);
    let a2 = Complex64::new(d2, -0.5 * kappa);
    let quad = GaussKronrod::with_tolerance(1e-15, 1e-12);
    samples
        .iter()
        .map(|&(p1, p2, k1)| {
            let e = p1 + p2;
            let k2 = e - k1;
            let t1 = |x: f64| t_one(x, a1);
            let t2 = |x: f64| t_one(x, a2);
            let middle = |q: f64| tau_single(p1, p2, q, e - q, a2, kappa) * tau_single(q, e - q, k1, k2, a1, kappa);
            let loop_term = quad.integrate_real_line(middle)? * Complex64::new(0.0, 0.5);
            let irreducible = t2(p1) * t2(p2) * tau_single(p1, p2, k1, k2, a1, kappa)
                + tau_single(p1, p2, k1, k2, a2, kappa) * t1(k1) * t1(k2)
                + loop_term;
            Ok(ComposedT {
                reducible: t1(p1) * t1(p2) * t2(p1) * t2(p2),
                irreducible,
            })
        })
        .collect()
}
