//! Brute-force evaluators used to cross-check the closed forms.
//!
//! Each one reaches the same physical quantity along a different numerical
//! route: real-space convolution instead of spectral filtering, explicit
//! Fourier integrals instead of pole sums, and direct contour integration of
//! the Bethe-ansatz representation.

mod convolution;
mod momentum;
mod yudson;

pub use convolution::{oracle_single_convolution, oracle_single_convolution_with};
pub use momentum::{oracle_compose_m2, oracle_fourier_t, oracle_tmft, ComposedT, TmftVariant};
pub use yudson::{four_coordinate_t, oracle_mixed_t, oracle_yudson, ContourSpec};

use num_complex::Complex64;

// C_a = Π_{b≠a} (Δ_a − Δ_b − iκ)/(Δ_a − Δ_b), kept local so the oracles do not
// share code with the modules they check.
pub(crate) fn direct_coefficients(detunings: &[f64], kappa: f64) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(detunings.len());
    for (a, &da) in detunings.iter().enumerate() {
        let mut c = Complex64::new(1.0, 0.0);
        for (b, &db) in detunings.iter().enumerate() {
            if a != b {
                c *= Complex64::new(da - db, -kappa) / (da - db);
            }
        }
        out.push(c);
    }
    out
}
