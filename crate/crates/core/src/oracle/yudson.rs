use num_complex::Complex64;

use super::direct_coefficients;
use crate::error::{invalid, Error, Result};
use crate::model::{min_pairwise_gap, EmitterArray};
use crate::quad::gauss_legendre;

/// Integration contours for the Bethe-ansatz representation of the
/// outgoing state.
///
/// Contour `j` runs horizontally at `Im λ = offsets[j]` over
/// `|Re λ − Δ̄| ≤ flat_half_width`, then bends away from the real axis with
/// slope `tilt` (down when `y_j < z_j`, up otherwise). The bend leaves the
/// integral unchanged — no singularities lie outside the flat strip — and
/// makes the plane-wave part absolutely convergent. The tails are truncated
/// at `extent` beyond the flat part, doubled until the result settles.
#[derive(Debug, Clone, PartialEq)]
pub struct ContourSpec {
    pub offsets: Vec<f64>,
    /// `None` covers the emitters with a margin of 6κ.
    pub flat_half_width: Option<f64>,
    pub tilt: f64,
    pub points_per_panel: usize,
    pub initial_extent: f64,
    pub max_extent: f64,
    /// Truncation is accepted when doubling changes the result by less than
    /// `tol · max(1, |Φ|)`.
    pub tol: f64,
}

impl ContourSpec {
    pub fn new(offsets: Vec<f64>) -> Self {
        Self {
            offsets,
            flat_half_width: None,
            tilt: 1.0,
            points_per_panel: 16,
            initial_extent: 8.0,
            max_extent: 4096.0,
            tol: 1e-11,
        }
    }

    /// Offsets `−κ/4, −κ/4 + 1.5κ, …` for `n` photons.
    pub fn standard(n: usize, kappa: f64) -> Self {
        Self::new((0..n).map(|j| kappa * (-0.25 + 1.5 * j as f64)).collect())
    }

    /// Every offset raised by `shift`.
    pub fn raised(&self, shift: f64) -> Self {
        let mut s = self.clone();
        s.offsets.iter_mut().for_each(|c| *c += shift);
        s
    }

    fn validate(&self, n: usize, kappa: f64, spread: f64) -> Result<f64> {
        if self.offsets.len() < n {
            return Err(Error::ContourViolation(format!(
                "{} offsets given for {n} photons",
                self.offsets.len()
            )));
        }
        for w in self.offsets[..n].windows(2) {
            if w[1] - w[0] <= kappa {
                return Err(Error::ContourViolation(format!(
                    "Im γ_(j+1) − Im γ_j = {} must exceed κ = {kappa}",
                    w[1] - w[0]
                )));
            }
        }
        if let Some(&c) = self.offsets[..n].iter().find(|&&c| c <= -0.5 * kappa) {
            return Err(Error::ContourViolation(format!(
                "Im γ = {c} passes below the emitter poles at −κ/2"
            )));
        }
        let flat = self.flat_half_width.unwrap_or(spread + 6.0 * kappa);
        if flat < spread + kappa {
            return Err(Error::ContourViolation(format!(
                "flat section half-width {flat} does not clear the emitters (spread {spread})"
            )));
        }
        if !(self.tilt > 0.0) || self.points_per_panel < 2 {
            return Err(invalid("contour", "tilt must be positive and panels need ≥ 2 points"));
        }
        Ok(flat)
    }
}

struct Path {
    lambda: Vec<Complex64>,
    // Quadrature weight times dλ/ds.
    weight: Vec<Complex64>,
}

struct Layout {
    centre: f64,
    flat: f64,
    extent: f64,
    tilt: f64,
    direction: f64,
    // Tail panels no wider than this.
    max_panel: f64,
}

fn build_path(layout: &Layout, offset: f64, u: f64, rule: &(Vec<f64>, Vec<f64>)) -> Path {
    let Layout {
        centre,
        flat,
        extent,
        tilt,
        direction,
        max_panel,
    } = *layout;
    let mut breaks = Vec::new();
    let flat_panel = 0.25;
    let tail_panel = (2.0 / u.abs()).clamp(0.25, 4.0).min(max_panel);
    let nf = (2.0 * flat / flat_panel).ceil() as usize;
    let nt = (extent / tail_panel).ceil() as usize;
    for j in 0..nt {
        breaks.push(-flat - extent + j as f64 * extent / nt as f64);
    }
    for j in 0..nf {
        breaks.push(-flat + j as f64 * 2.0 * flat / nf as f64);
    }
    for j in 0..=nt {
        breaks.push(flat + j as f64 * extent / nt as f64);
    }
    let mut path = Path {
        lambda: Vec::new(),
        weight: Vec::new(),
    };
    for w in breaks.windows(2) {
        let (mid, half) = (0.5 * (w[0] + w[1]), 0.5 * (w[1] - w[0]));
        for (x, wt) in rule.0.iter().zip(&rule.1) {
            let s = mid + half * x;
            let excess = s.abs() - flat;
            let (im, slope) = if excess > 0.0 {
                (offset + direction * tilt * excess, direction * tilt * s.signum())
            } else {
                (offset, 0.0)
            };
            path.lambda.push(Complex64::new(centre + s, im));
            path.weight.push(Complex64::new(1.0, slope) * (wt * half));
        }
    }
    path
}

fn transmission(lambda: Complex64, detunings: &[f64], kappa: f64) -> Complex64 {
    detunings
        .iter()
        .map(|&d| (lambda - d - Complex64::new(0.0, 0.5 * kappa)) / (lambda - d + Complex64::new(0.0, 0.5 * kappa)))
        .product()
}

/// Outgoing amplitude `Φ_N(y; z)` (`N = 1, 2`) evaluated by direct
/// quadrature of the contour integral.
///
/// For `N = 1` and `y ≠ z` this is the regular part of the single-photon
/// response; for `N = 2` the two photons must lie on the same side of their
/// sources (`y_j − z_j` of equal sign) so both contours bend the same way.
pub fn oracle_yudson(emitters: &EmitterArray, z: &[f64], y: &[f64], contour: &ContourSpec) -> Result<Complex64> {
    let n = z.len();
    if n == 0 || n > 2 || y.len() != n {
        return Err(invalid("N", "only one or two photons are supported"));
    }
    let kappa = emitters.uniform_coupling()?;
    let min_gap = min_pairwise_gap(emitters);
    if min_gap < emitters.degeneracy_tol() {
        return Err(Error::DegenerateDetunings {
            min_gap,
            tol: emitters.degeneracy_tol(),
        });
    }
    let flat = contour.validate(n, kappa, emitters.spread())?;
    let u: Vec<f64> = y.iter().zip(z).map(|(a, b)| a - b).collect();
    if u.contains(&0.0) {
        return Err(invalid("y", "coincident y_j = z_j carries a δ-function; not sampled"));
    }
    if n == 2 && u[0].signum() != u[1].signum() {
        return Err(Error::ContourViolation(
            "y_j − z_j of opposite signs would need crossing contour tails".into(),
        ));
    }
    let direction = if u[0] < 0.0 { -1.0 } else { 1.0 };
    let centre = emitters.mean_detuning();
    let rule = gauss_legendre(contour.points_per_panel);
    let umin = u.iter().map(|v| v.abs()).fold(f64::INFINITY, f64::min);
    let mut extent = contour.initial_extent.max(8.0 / (contour.tilt * umin));

    // Parallel tilted tails bring the pole of the Bethe factor within this
    // distance of the path; panels must resolve it.
    let max_panel = if n == 2 {
        (contour.offsets[1] - contour.offsets[0] - kappa) / (1.0 + contour.tilt * contour.tilt).sqrt()
    } else {
        f64::INFINITY
    };
    let evaluate = |extent: f64| -> Complex64 {
        let layout = Layout {
            centre,
            flat,
            extent,
            tilt: contour.tilt,
            direction,
            max_panel,
        };
        let factors: Vec<(Path, Vec<Complex64>)> = (0..n)
            .map(|j| {
                let p = build_path(&layout, contour.offsets[j], u[j], &rule);
                let f = p
                    .lambda
                    .iter()
                    .zip(&p.weight)
                    .map(|(&l, &w)| {
                        w * (Complex64::i() * l * u[j]).exp() * transmission(l, emitters.detunings(), kappa)
                            / (2.0 * std::f64::consts::PI)
                    })
                    .collect();
                (p, f)
            })
            .collect();
        let single: Vec<Complex64> = factors.iter().map(|(_, f)| f.iter().sum()).collect();
        if n == 1 {
            return single[0];
        }
        let sign = (y[0] - y[1]).signum() * if y[0] == y[1] { 0.0 } else { 1.0 };
        let mut value = single[0] * single[1];
        if sign != 1.0 {
            let ik = Complex64::new(0.0, kappa);
            let (p1, f1) = &factors[0];
            let (p2, f2) = &factors[1];
            let mut cross = Complex64::new(0.0, 0.0);
            for (&l1, &a) in p1.lambda.iter().zip(f1) {
                let mut row = Complex64::new(0.0, 0.0);
                for (&l2, &b) in p2.lambda.iter().zip(f2) {
                    row += b / (l1 - l2 + ik);
                }
                cross += a * row;
            }
            value += ik * (sign - 1.0) * cross;
        }
        value
    };

    let mut value = evaluate(extent);
    loop {
        let next_extent = 2.0 * extent;
        if next_extent > contour.max_extent {
            return Err(Error::TruncationNotConverged {
                change: f64::NAN,
            });
        }
        let next = evaluate(next_extent);
        let change = (next - value).norm();
        if change <= contour.tol * next.norm().max(1.0) {
            return Ok(next);
        }
        if 2.0 * next_extent > contour.max_extent {
            return Err(Error::TruncationNotConverged { change });
        }
        value = next;
        extent = next_extent;
    }
}

/// Irreducible two-photon T in four coordinates, nonzero for the orderings
/// `z1 > z2 > y2 > y1` and its photon exchange.
pub fn four_coordinate_t(y: [f64; 2], z: [f64; 2], emitters: &EmitterArray) -> Result<Complex64> {
    let kappa = emitters.uniform_coupling()?;
    let d = emitters.detunings();
    let c = direct_coefficients(d, kappa);
    let ordered = |y1: f64, y2: f64, z1: f64, z2: f64| {
        if !(z1 > z2 && z2 > y2 && y2 > y1) {
            return Complex64::new(0.0, 0.0);
        }
        let mut s = Complex64::new(0.0, 0.0);
        for a in 0..d.len() {
            for b in 0..d.len() {
                let aa = Complex64::new(d[a], -0.5 * kappa);
                let ab = Complex64::new(d[b], -0.5 * kappa);
                let phase = (Complex64::i() * (aa * (y1 - z1) + ab * (y2 - z2))).exp();
                s += c[a] * c[b] / Complex64::new(d[a] - d[b], kappa) * phase;
            }
        }
        s * (-2.0 * kappa.powi(3))
    };
    Ok(ordered(y[0], y[1], z[0], z[1]) + ordered(y[1], y[0], z[1], z[0]))
}

/// Mixed-representation irreducible T at total energy `e_total`, obtained by
/// integrating [`four_coordinate_t`] against `e^{−iER}` over the centre-of-mass
/// offset `R = (y1+y2−z1−z2)/2`; `dy = y2 − y1`, `dz = z1 − z2`.
pub fn oracle_mixed_t(dy: f64, dz: f64, e_total: f64, emitters: &EmitterArray) -> Result<Complex64> {
    if dy < 0.0 || dz < 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let quad = crate::quad::GaussKronrod::with_tolerance(1e-15, 1e-12);
    let failure = std::cell::Cell::new(None);
    let x = dy + dz;
    let integrand = |s: f64| {
        // R = −X/2 − s; s = 0 is where z2 = y2 and the support ends.
        let r = -0.5 * x - s;
        let y = [r - 0.5 * dy, r + 0.5 * dy];
        let z = [0.5 * dz, -0.5 * dz];
        match four_coordinate_t(y, z, emitters) {
            Ok(t) => t * Complex64::from_polar(1.0, -e_total * r),
            Err(e) => {
                failure.set(Some(e));
                Complex64::new(0.0, 0.0)
            }
        }
    };
    let value = quad.integrate_to_inf(integrand, 0.0)?;
    match failure.take() {
        Some(e) => Err(e),
        None => Ok(value),
    }
}
