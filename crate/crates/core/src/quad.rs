//! Globally adaptive Gauss–Kronrod (7/15) quadrature for complex integrands.

use num_complex::Complex64;

use crate::error::{Error, Result};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
// Gauss weights for XGK[1], XGK[3], XGK[5] and the centre.
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Adaptive integrator settings. Subdivision stops once the summed error
/// estimate falls below `max(abs_tol, rel_tol·|I|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussKronrod {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_depth: u32,
    pub max_intervals: usize,
}

impl Default for GaussKronrod {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 0.0,
            max_depth: 30,
            max_intervals: 20_000,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Piece {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
    depth: u32,
}

fn rule<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut fv = [(Complex64::default(), Complex64::default()); 7];
    let mut rk = fc * WGK[7];
    let mut rg = fc * WG[3];
    let mut resabs = fc.norm() * WGK[7];
    for (j, slot) in fv.iter_mut().enumerate() {
        let dx = h * XGK[j];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        *slot = (f1, f2);
        rk += (f1 + f2) * WGK[j];
        resabs += (f1.norm() + f2.norm()) * WGK[j];
        if j % 2 == 1 {
            rg += (f1 + f2) * WG[j / 2];
        }
    }
    let mean = rk * 0.5;
    let mut resasc = WGK[7] * (fc - mean).norm();
    for (j, (f1, f2)) in fv.iter().enumerate() {
        resasc += WGK[j] * ((f1 - mean).norm() + (f2 - mean).norm());
    }
    let habs = h.abs();
    let mut err = ((rk - rg) * h).norm();
    resasc *= habs;
    resabs *= habs;
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    (rk * h, err)
}

impl GaussKronrod {
    pub fn with_tolerance(abs_tol: f64, rel_tol: f64) -> Self {
        Self {
            abs_tol,
            rel_tol,
            ..Self::default()
        }
    }

    pub fn integrate<F: Fn(f64) -> Complex64>(&self, f: F, a: f64, b: f64) -> Result<Complex64> {
        self.integrate_pieces(&f, &[a, b])
    }

    /// Integral over `[breaks[0], breaks[last]]`, with the break points
    /// seeding the initial partition.
    pub fn integrate_pieces<F: Fn(f64) -> Complex64>(&self, f: &F, breaks: &[f64]) -> Result<Complex64> {
        assert!(breaks.len() >= 2);
        let mut pieces: Vec<Piece> = breaks
            .windows(2)
            .filter(|w| w[1] != w[0])
            .map(|w| {
                let (value, error) = rule(f, w[0], w[1]);
                Piece {
                    a: w[0],
                    b: w[1],
                    value,
                    error,
                    depth: 0,
                }
            })
            .collect();
        loop {
            let total: Complex64 = pieces.iter().map(|p| p.value).sum();
            let err: f64 = pieces.iter().map(|p| p.error).sum();
            let target = self.abs_tol.max(self.rel_tol * total.norm());
            if err <= target {
                return Ok(total);
            }
            let (idx, worst) = pieces
                .iter()
                .enumerate()
                .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
                .map(|(i, p)| (i, *p))
                .expect("non-empty partition");
            if worst.depth >= self.max_depth || pieces.len() >= self.max_intervals {
                return Err(Error::QuadratureNotConverged { error: err, target });
            }
            let m = 0.5 * (worst.a + worst.b);
            let (v1, e1) = rule(f, worst.a, m);
            let (v2, e2) = rule(f, m, worst.b);
            pieces[idx] = Piece {
                a: worst.a,
                b: m,
                value: v1,
                error: e1,
                depth: worst.depth + 1,
            };
            pieces.push(Piece {
                a: m,
                b: worst.b,
                value: v2,
                error: e2,
                depth: worst.depth + 1,
            });
        }
    }

    /// `∫_a^∞ f` via `x = a + t/(1−t)`.
    pub fn integrate_to_inf<F: Fn(f64) -> Complex64>(&self, f: F, a: f64) -> Result<Complex64> {
        let g = |t: f64| {
            let u = 1.0 - t;
            f(a + t / u) / (u * u)
        };
        self.integrate(g, 0.0, 1.0)
    }

    /// `∫_{-∞}^{∞} f` via `x = t/(1−t²)`.
    pub fn integrate_real_line<F: Fn(f64) -> Complex64>(&self, f: F) -> Result<Complex64> {
        let g = |t: f64| {
            let u = 1.0 - t * t;
            f(t / u) * ((1.0 + t * t) / (u * u))
        };
        self.integrate(g, -1.0, 1.0)
    }
}

/// `n`-point Gauss–Legendre nodes and weights on `[-1, 1]` (Newton on `P_n`).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_are_exact() {
        let q = GaussKronrod::default();
        let v = q.integrate(|x| Complex64::new(x.powi(5) - 3.0 * x * x, x), 0.0, 2.0).unwrap();
        assert!((v - Complex64::new(64.0 / 6.0 - 8.0, 2.0)).norm() < 1e-13);
    }

    #[test]
    fn oscillatory_and_infinite() {
        let q = GaussKronrod::with_tolerance(1e-13, 0.0);
        // ∫_0^∞ e^{-x} e^{i 5x} dx = 1/(1 - 5i)
        let v = q.integrate_to_inf(|x| Complex64::from_polar((-x).exp(), 5.0 * x), 0.0).unwrap();
        assert!((v - 1.0 / Complex64::new(1.0, -5.0)).norm() < 1e-12);
        let g = q.integrate_real_line(|x| (-x * x).exp().into()).unwrap();
        assert!((g.re - std::f64::consts::PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn legendre_rule_integrates_degree_2n_minus_1() {
        let (x, w) = gauss_legendre(16);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        let v: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(30)).sum();
        assert!((v - 2.0 / 31.0).abs() < 1e-14);
    }

    #[test]
    fn gives_up_on_singularity() {
        let q = GaussKronrod::with_tolerance(1e-12, 0.0);
        let r = q.integrate(|x: f64| (1.0 / x.abs().sqrt() / x.abs().sqrt()).into(), -1.0, 1.0);
        assert!(matches!(r, Err(Error::QuadratureNotConverged { .. })));
    }
}
