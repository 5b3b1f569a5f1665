//! Evaluation of sums `Σ_a C_a φ(Δ_a)` over the emitter coefficients.
//!
//! For well separated detunings the sum is taken term by term. When all
//! detunings sit in a tight cluster the individual `C_a` blow up as
//! `gap^{-(M-1)}` and cancel catastrophically; there the sum is rewritten as
//! a contour integral of `τ(λ) φ(λ)` around the cluster, with
//! `τ(λ) = Π_b (λ−Δ_b−iκ)/(λ−Δ_b)` whose residue at `Δ_a` is `−iκ C_a`, and
//! discretised with the (exponentially convergent) periodic trapezoid rule.

use num_complex::Complex64;

/// Clusters narrower than this (in units of κ) use the contour form.
pub(crate) const CLUSTER_RADIUS: f64 = 0.1;
const CONTOUR_RADIUS: f64 = 0.35;
const CONTOUR_NODES: usize = 64;

/// Nodes and weights with `Σ_a C_a φ(Δ_a) = Σ_n w_n φ(λ_n)` for any `φ`
/// analytic on the disc of radius `0.35κ` around the cluster centre.
#[derive(Debug, Clone)]
pub(crate) struct SumRule {
    pub nodes: Vec<Complex64>,
    pub weights: Vec<Complex64>,
}

pub(crate) fn coefficients(detunings: &[f64], kappa: f64) -> Vec<Complex64> {
    let ik = Complex64::new(0.0, kappa);
    detunings
        .iter()
        .enumerate()
        .map(|(a, &da)| {
            detunings
                .iter()
                .enumerate()
                .filter(|&(b, _)| b != a)
                .map(|(_, &db)| (da - db - ik) / (da - db))
                .product()
        })
        .collect()
}

impl SumRule {
    pub fn new(detunings: &[f64], kappa: f64) -> Self {
        let m = detunings.len();
        let centre = if m == 0 { 0.0 } else { detunings.iter().sum::<f64>() / m as f64 };
        let spread = detunings.iter().map(|d| (d - centre).abs()).fold(0.0, f64::max);
        if m >= 2 && spread <= CLUSTER_RADIUS * kappa {
            Self::contour(detunings, kappa, centre)
        } else {
            Self {
                nodes: detunings.iter().map(|&d| d.into()).collect(),
                weights: coefficients(detunings, kappa),
            }
        }
    }

    fn contour(detunings: &[f64], kappa: f64, centre: f64) -> Self {
        let rho = CONTOUR_RADIUS * kappa;
        let ik = Complex64::new(0.0, kappa);
        let mut nodes = Vec::with_capacity(CONTOUR_NODES);
        let mut weights = Vec::with_capacity(CONTOUR_NODES);
        for n in 0..CONTOUR_NODES {
            let theta = 2.0 * std::f64::consts::PI * (n as f64 + 0.5) / CONTOUR_NODES as f64;
            let e = Complex64::from_polar(1.0, theta);
            let lambda = centre + rho * e;
            let tau: Complex64 = detunings
                .iter()
                .map(|&d| (lambda - d - ik) / (lambda - d))
                .product();
            nodes.push(lambda);
            weights.push(Complex64::i() * rho * e * tau / (CONTOUR_NODES as f64 * kappa));
        }
        Self { nodes, weights }
    }

    pub fn sum(&self, phi: impl Fn(Complex64) -> Complex64) -> Complex64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&l, &w)| w * phi(l))
            .sum()
    }
}
