use num_complex::Complex64;

use crate::error::{Error, Result};

/// Complex power series `Σ c_k s^k` kept up to order `K`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSeries {
    coeffs: Vec<Complex64>,
}

impl TruncatedSeries {
    /// Series from explicit coefficients; the order is `coeffs.len() - 1`.
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least c_0");
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[f64], order: usize) -> Self {
        let mut c = vec![Complex64::new(0.0, 0.0); order + 1];
        for (dst, &src) in c.iter_mut().zip(coeffs) {
            *dst = src.into();
        }
        Self::new(c)
    }

    pub fn zero(order: usize) -> Self {
        Self::new(vec![Complex64::new(0.0, 0.0); order + 1])
    }

    pub fn constant(c: Complex64, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = c;
        s
    }

    /// `a + b s` truncated at `order`.
    pub fn linear(a: Complex64, b: Complex64, order: usize) -> Self {
        let mut s = Self::constant(a, order);
        if order >= 1 {
            s.coeffs[1] = b;
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs[k]
    }

    /// `l`-th derivative at `s = 0`, i.e. `l! c_l`.
    pub fn derivative_at_zero(&self, l: usize) -> Complex64 {
        let fact: f64 = (1..=l).map(|j| j as f64).product();
        self.coeffs[l] * fact
    }

    pub fn eval(&self, s: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * s + c)
    }

    pub fn scale(&self, k: Complex64) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * k).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.order(), other.order());
        Self::new(self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.order(), other.order());
        Self::new(self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        series_mul(self, other)
    }

    pub fn inv(&self) -> Result<Self> {
        series_inv(self)
    }

    pub fn pow(&self, m: u32) -> Self {
        series_pow(self, m)
    }
}

/// Cauchy product truncated at the common order.
pub fn series_mul(a: &TruncatedSeries, b: &TruncatedSeries) -> TruncatedSeries {
    assert_eq!(a.order(), b.order(), "series orders differ");
    let k = a.order();
    let mut out = vec![Complex64::new(0.0, 0.0); k + 1];
    for (i, &ai) in a.coeffs.iter().enumerate() {
        for (j, &bj) in b.coeffs[..=k - i].iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    TruncatedSeries::new(out)
}

/// Multiplicative inverse; fails with [`Error::SingularSeries`] when the
/// constant term is zero to working precision.
pub fn series_inv(a: &TruncatedSeries) -> Result<TruncatedSeries> {
    let c0 = a.coeffs[0];
    let scale = a.coeffs.iter().map(|c| c.norm()).fold(1.0, f64::max);
    if c0.norm() <= 64.0 * f64::EPSILON * scale {
        return Err(Error::SingularSeries { c0: c0.norm() });
    }
    let k = a.order();
    let inv0 = 1.0 / c0;
    let mut b = vec![Complex64::new(0.0, 0.0); k + 1];
    b[0] = inv0;
    for n in 1..=k {
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 1..=n {
            acc += a.coeffs[j] * b[n - j];
        }
        b[n] = -acc * inv0;
    }
    Ok(TruncatedSeries::new(b))
}

/// `a^m` by binary exponentiation.
pub fn series_pow(a: &TruncatedSeries, mut m: u32) -> TruncatedSeries {
    let mut result = TruncatedSeries::constant(1.0.into(), a.order());
    let mut base = a.clone();
    while m > 0 {
        if m & 1 == 1 {
            result = series_mul(&result, &base);
        }
        m >>= 1;
        if m > 0 {
            base = series_mul(&base, &base);
        }
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(c: &[f64]) -> TruncatedSeries {
        TruncatedSeries::from_real(c, c.len() - 1)
    }

    #[test]
    fn products() {
        assert_eq!(series_mul(&s(&[1.0]), &s(&[1.0])), s(&[1.0]));
        assert_eq!(series_mul(&s(&[0.0, 1.0, 0.0]), &s(&[0.0, 1.0, 0.0])), s(&[0.0, 0.0, 1.0]));
        assert_eq!(series_mul(&s(&[1.0, 1.0]), &s(&[1.0, -1.0])), s(&[1.0, 0.0]));
    }

    #[test]
    fn inverses() {
        assert_eq!(series_inv(&s(&[1.0])).unwrap(), s(&[1.0]));
        assert_eq!(series_inv(&s(&[1.0, 1.0, 0.0])).unwrap(), s(&[1.0, -1.0, 1.0]));
        assert!(matches!(series_inv(&s(&[0.0, 1.0])), Err(Error::SingularSeries { .. })));
    }

    #[test]
    fn powers() {
        assert_eq!(series_pow(&s(&[3.0, 2.0]), 0), s(&[1.0, 0.0]));
        assert_eq!(series_pow(&s(&[0.0, 1.0, 0.0, 0.0]), 3), s(&[0.0, 0.0, 0.0, 1.0]));
        assert_eq!(series_pow(&s(&[1.0, 1.0, 0.0]), 2), s(&[1.0, 2.0, 1.0]));
    }

    #[test]
    fn derivative_extraction() {
        // e^s truncated: l-th derivative at 0 is 1.
        let e = TruncatedSeries::new((0..6).map(|k| (1.0 / (1..=k).product::<usize>() as f64).into()).collect());
        for l in 0..6 {
            assert!((e.derivative_at_zero(l) - 1.0).norm() < 1e-14);
        }
    }
}
