//! Grids, quadrature and Fourier-type sums shared by every other module.
//!
//! Spectral envelopes live on symmetric baseband grids; the absolute
//! carrier is kept separately and enters only through analytic phases.

use ndarray::ArrayView2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest admissible frequency-grid size.
pub const MIN_FREQUENCY_COUNT: usize = 16;
/// Smallest admissible delay-axis size (the Simpson minimum).
pub const MIN_DELAY_COUNT: usize = 3;

/// A uniform, symmetric sampling axis.
pub trait UniformAxis {
    fn count(&self) -> usize;
    fn spacing(&self) -> f64;
    /// Position of sample `n`.
    fn position(&self, n: usize) -> f64;

    fn positions(&self) -> Vec<f64> {
        (0..self.count()).map(|n| self.position(n)).collect()
    }
    fn first(&self) -> f64 {
        self.position(0)
    }
    fn last(&self) -> f64 {
        self.position(self.count() - 1)
    }
    /// Distance between the outermost samples.
    fn span(&self) -> f64 {
        (self.count() - 1) as f64 * self.spacing()
    }
}

fn symmetric_offset(n: usize, count: usize, spacing: f64) -> f64 {
    (n as f64 - (count - 1) as f64 / 2.0) * spacing
}

/// Uniform angular-frequency axis: baseband offsets plus a separate carrier.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrequencyGrid {
    count: usize,
    spacing: f64,
    carrier: f64,
}

impl FrequencyGrid {
    pub fn new(count: usize, spacing: f64, carrier: f64) -> Result<Self> {
        if count < MIN_FREQUENCY_COUNT {
            return Err(Error::InvalidGrid(format!(
                "frequency grid needs at least {MIN_FREQUENCY_COUNT} samples, got {count}"
            )));
        }
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(Error::InvalidGrid(format!("spacing must be positive, got {spacing}")));
        }
        if !(carrier.is_finite() && carrier >= 0.0) {
            return Err(Error::InvalidGrid(format!("carrier must be non-negative, got {carrier}")));
        }
        Ok(Self { count, spacing, carrier })
    }

    /// Grid with `count` samples spanning `[-half_span, half_span]`.
    pub fn with_half_span(count: usize, half_span: f64, carrier: f64) -> Result<Self> {
        if count < 2 {
            return Self::new(count, 1.0, carrier);
        }
        Self::new(count, 2.0 * half_span / (count - 1) as f64, carrier)
    }

    pub fn carrier(&self) -> f64 {
        self.carrier
    }

    /// Baseband offset of sample `n`.
    pub fn offset(&self, n: usize) -> f64 {
        symmetric_offset(n, self.count, self.spacing)
    }

    /// Same sampling with a different carrier.
    pub fn with_carrier(&self, carrier: f64) -> Result<Self> {
        Self::new(self.count, self.spacing, carrier)
    }

    /// Fractional sample index of a baseband offset.
    pub fn fractional_index(&self, offset: f64) -> f64 {
        offset / self.spacing + (self.count - 1) as f64 / 2.0
    }
}

impl UniformAxis for FrequencyGrid {
    fn count(&self) -> usize {
        self.count
    }
    fn spacing(&self) -> f64 {
        self.spacing
    }
    fn position(&self, n: usize) -> f64 {
        self.offset(n)
    }
}

/// Uniform axis symmetric about `center`. Used for delays and for the μ axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DelayGrid {
    count: usize,
    spacing: f64,
    center: f64,
}

impl DelayGrid {
    pub fn new(count: usize, spacing: f64, center: f64) -> Result<Self> {
        if count < MIN_DELAY_COUNT {
            return Err(Error::InvalidGrid(format!(
                "axis needs at least {MIN_DELAY_COUNT} samples, got {count}"
            )));
        }
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(Error::InvalidGrid(format!("spacing must be positive, got {spacing}")));
        }
        if !center.is_finite() {
            return Err(Error::InvalidGrid("center must be finite".into()));
        }
        Ok(Self { count, spacing, center })
    }

    /// Axis centered on zero.
    pub fn centered(count: usize, spacing: f64) -> Result<Self> {
        Self::new(count, spacing, 0.0)
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    /// Offset of sample `n` from the center.
    pub fn offset(&self, n: usize) -> f64 {
        symmetric_offset(n, self.count, self.spacing)
    }

    /// Index of the sample at `value`, if it lies on the axis.
    pub fn index_of(&self, value: f64) -> Option<usize> {
        let q = (value - self.center) / self.spacing + (self.count - 1) as f64 / 2.0;
        let r = q.round();
        if (q - r).abs() <= 1e-9 && r >= 0.0 && (r as usize) < self.count {
            Some(r as usize)
        } else {
            None
        }
    }
}

impl UniformAxis for DelayGrid {
    fn count(&self) -> usize {
        self.count
    }
    fn spacing(&self) -> f64 {
        self.spacing
    }
    fn position(&self, n: usize) -> f64 {
        self.center + self.offset(n)
    }
}

/// Complex samples tied to their axis.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexSamples<A> {
    axis: A,
    values: Vec<Complex64>,
}

impl<A: UniformAxis> ComplexSamples<A> {
    pub fn new(axis: A, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != axis.count() {
            return Err(Error::LengthMismatch { expected: axis.count(), found: values.len() });
        }
        check_finite(&values)?;
        Ok(Self { axis, values })
    }

    pub fn axis(&self) -> &A {
        &self.axis
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn integrate(&self) -> Result<Complex64> {
        integrate_1d(&self.values, self.axis.spacing())
    }

    /// `∫ f(x) e^{-i k x} dx` over the axis positions.
    pub fn fourier_sum(&self, kernel_frequency: f64) -> Result<Complex64> {
        fourier_sum(&self.values, &self.axis, kernel_frequency)
    }
}

pub(crate) fn check_finite(values: &[Complex64]) -> Result<()> {
    match values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
        Some(index) => Err(Error::NonFinite { index }),
        None => Ok(()),
    }
}

/// Composite Simpson weights for odd counts, trapezoid weights for even counts.
pub fn quadrature_weights(count: usize, spacing: f64) -> Vec<f64> {
    let mut w = vec![0.0; count];
    if count == 0 {
        return w;
    }
    if count == 1 {
        w[0] = spacing;
        return w;
    }
    if count % 2 == 1 {
        let third = spacing / 3.0;
        for (n, wn) in w.iter_mut().enumerate() {
            *wn = if n == 0 || n == count - 1 {
                third
            } else if n % 2 == 1 {
                4.0 * third
            } else {
                2.0 * third
            };
        }
    } else {
        w = trapezoid_weights(count, spacing);
    }
    w
}

/// Trapezoid weights. Fourier sums use these: Simpson's alternating weights
/// add a replica of the integrand shifted by `π/h` in kernel frequency.
pub fn trapezoid_weights(count: usize, spacing: f64) -> Vec<f64> {
    let mut w = vec![spacing; count];
    if count >= 2 {
        w[0] = 0.5 * spacing;
        w[count - 1] = 0.5 * spacing;
    }
    w
}

/// Weighted sum in index order.
pub(crate) fn weighted_sum(values: &[Complex64], weights: &[f64]) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (v, w) in values.iter().zip(weights) {
        acc += v * w;
    }
    acc
}

/// Simpson quadrature (trapezoid for even counts) of uniformly spaced samples.
pub fn integrate_1d(values: &[Complex64], spacing: f64) -> Result<Complex64> {
    if values.len() < 3 {
        return Err(Error::TooFewSamples(values.len()));
    }
    check_finite(values)?;
    Ok(weighted_sum(values, &quadrature_weights(values.len(), spacing)))
}

/// Tensor-product Simpson quadrature over a rectangular array.
pub fn integrate_2d(values: ArrayView2<'_, Complex64>, spacing_a: f64, spacing_b: f64) -> Result<Complex64> {
    let (na, nb) = values.dim();
    if na < 3 || nb < 3 {
        return Err(Error::TooFewSamples(na.min(nb)));
    }
    let wa = quadrature_weights(na, spacing_a);
    let wb = quadrature_weights(nb, spacing_b);
    let mut total = Complex64::new(0.0, 0.0);
    for (a, row) in values.outer_iter().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for (b, v) in row.iter().enumerate() {
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::NonFinite { index: a * nb + b });
            }
            acc += v * wb[b];
        }
        total += acc * wa[a];
    }
    Ok(total)
}

/// `∫ f(x) e^{-i k x} dx` by direct quadrature over the axis positions.
pub fn fourier_sum<A: UniformAxis>(values: &[Complex64], axis: &A, kernel_frequency: f64) -> Result<Complex64> {
    if values.len() != axis.count() {
        return Err(Error::LengthMismatch { expected: axis.count(), found: values.len() });
    }
    if values.len() < 3 {
        return Err(Error::TooFewSamples(values.len()));
    }
    check_finite(values)?;
    let weights = quadrature_weights(values.len(), axis.spacing());
    let mut acc = Complex64::new(0.0, 0.0);
    for (n, (v, w)) in values.iter().zip(&weights).enumerate() {
        acc += v * Complex64::cis(-kernel_frequency * axis.position(n)) * *w;
    }
    Ok(acc)
}

/// Normalized sinc, `sin(πx)/(πx)`.
pub fn sinc_pi(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        let px = std::f64::consts::PI * x;
        px.sin() / px
    }
}

/// Samples `g_n = f(x_n + shift)` on the same grid, where `f` is the
/// band-limited interpolant of `values` (spacing `spacing`) and zero
/// outside the sampled interval. Whole-step shifts copy samples exactly.
pub fn shift_samples(values: &[Complex64], spacing: f64, shift: f64) -> Vec<Complex64> {
    let n = values.len();
    let q = shift / spacing;
    let k = q.round();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    if (q - k).abs() <= 1e-9 {
        let k = k as i64;
        for (i, o) in out.iter_mut().enumerate() {
            let j = i as i64 + k;
            if j >= 0 && (j as usize) < n {
                *o = values[j as usize];
            }
        }
        return out;
    }
    // g_i = Σ_j v_j sinc(i + q - j); precompute weights per lag d = i - j.
    let base = q.floor();
    let delta = q - base;
    let s = (std::f64::consts::PI * delta).sin() / std::f64::consts::PI;
    let lags = 2 * n - 1;
    let weights: Vec<f64> = (0..lags)
        .map(|l| {
            let d = l as f64 - (n - 1) as f64 + base;
            let sign = if (d as i64).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            sign * s / (d + delta)
        })
        .collect();
    let last = (n - 1) as f64;
    for (i, o) in out.iter_mut().enumerate() {
        let pos = i as f64 + q;
        if pos < 0.0 || pos > last {
            continue;
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, v) in values.iter().enumerate() {
            acc += v * weights[i + n - 1 - j];
        }
        *o = acc;
    }
    out
}

/// Band-limited interpolation of uniform samples starting at `origin`.
/// Positions outside the sampled interval evaluate to zero.
pub fn interpolate(values: &[Complex64], origin: f64, spacing: f64, x: f64) -> Complex64 {
    let n = values.len();
    let q = (x - origin) / spacing;
    let last = (n - 1) as f64;
    if q < -1e-9 || q > last + 1e-9 {
        return Complex64::new(0.0, 0.0);
    }
    let k = q.round();
    if (q - k).abs() <= 1e-9 {
        return values[(k.max(0.0) as usize).min(n - 1)];
    }
    let base = q.floor();
    let delta = q - base;
    let s = (std::f64::consts::PI * delta).sin() / std::f64::consts::PI;
    let mut acc = Complex64::new(0.0, 0.0);
    for (j, v) in values.iter().enumerate() {
        let d = base - j as f64;
        let sign = if (d as i64).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        acc += v * (sign * s / (d + delta));
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn simpson_weights_sum_to_span() {
        for count in [3usize, 4, 17, 64, 257] {
            let w: f64 = quadrature_weights(count, 0.1).iter().sum();
            assert!((w - 0.1 * (count - 1) as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn integrate_rejects_non_finite() {
        let v = vec![c(1.0), c(f64::NAN), c(1.0)];
        assert!(matches!(integrate_1d(&v, 1.0), Err(Error::NonFinite { index: 1 })));
    }

    #[test]
    fn grid_offsets_are_exactly_symmetric() {
        for count in [16usize, 17, 128, 255] {
            let g = FrequencyGrid::new(count, 0.0731, 3.0).unwrap();
            for n in 0..count {
                assert_eq!(g.offset(n), -g.offset(count - 1 - n));
            }
        }
    }

    #[test]
    fn small_frequency_grid_rejected() {
        assert!(FrequencyGrid::new(15, 0.1, 0.0).is_err());
        assert!(FrequencyGrid::new(16, 0.0, 0.0).is_err());
    }

    #[test]
    fn whole_step_shift_is_exact() {
        let v: Vec<Complex64> = (0..8).map(|n| c(n as f64)).collect();
        let s = shift_samples(&v, 0.5, 1.0);
        assert_eq!(s[0], c(2.0));
        assert_eq!(s[5], c(7.0));
        assert_eq!(s[6], c(0.0));
    }

    #[test]
    fn fractional_shift_of_gaussian_is_spectrally_accurate() {
        let g = FrequencyGrid::with_half_span(129, 10.0, 0.0).unwrap();
        let v: Vec<Complex64> = g.positions().iter().map(|x| c((-x * x / 4.0).exp())).collect();
        let shift = 0.3 * g.spacing();
        let s = shift_samples(&v, g.spacing(), shift);
        for (n, x) in g.positions().iter().enumerate().skip(20).take(80) {
            let exact = (-(x + shift) * (x + shift) / 4.0).exp();
            assert!((s[n].re - exact).abs() < 1e-12, "{n}: {} vs {exact}", s[n].re);
        }
        let y = interpolate(&v, g.first(), g.spacing(), 1.234);
        assert!((y.re - (-1.234f64 * 1.234 / 4.0).exp()).abs() < 1e-12);
    }

    #[test]
    fn delay_index_lookup() {
        let d = DelayGrid::new(11, 0.5, 8.0).unwrap();
        assert_eq!(d.index_of(8.0), Some(5));
        assert_eq!(d.index_of(5.5), Some(0));
        assert_eq!(d.index_of(8.25), None);
        assert_eq!(d.index_of(11.0), None);
    }
}
