//! Time-frequency representations of `f₊` and `f₋`.
//!
//! Conventions (offsets `x` are baseband, `c` is the grid carrier):
//!
//! * `wigner_minus(f, τ, m) = ∫ f(m-ω) f*(m+ω) e^{-2iωτ} dω`
//! * `stft_plus(f, μ, τ)    = ∫ f(ω) f*(ω+μ) e^{i(2ω+μ)τ} dω` with absolute `ω = c + x`
//! * `stft_minus(f, μ, τ)   = ∫ f(x) f*(x+μ) e^{-2ixτ} dx`
//! * `centered_stft_minus(f, μ, τ) = ∫ f(x+μ/2) f*(x-μ/2) e^{-2ixτ} dx`
//! * `p_plus(f, τ₀, μ)      = ∫ f(ω) e^{-i(2ω+2μ)τ₀} dω` with absolute `ω`
//! * `displacement_char(f, μ, τ) = e^{-iμτ/2} ∫ f(x-μ) f*(x) e^{ixτ} dx`
//!
//! Samples outside a grid are zero. A shift is rejected only when it moves
//! the whole grid past itself.

use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jsa::SpectralFunction;
use crate::math::{trapezoid_weights, DelayGrid, UniformAxis};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapKind {
    /// `values[j, k] = W₋(τ_j, μ_k/2)`.
    WignerMinus,
    /// `values[j, k] = stft_plus(f₊, μ_k, τ_j)`.
    StftPlus,
    /// `values[j, k] = stft_minus(f₋, μ_k, τ_j)`.
    StftMinus,
}

impl MapKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::WignerMinus => "wigner_minus",
            Self::StftPlus => "stft_plus",
            Self::StftMinus => "stft_minus",
        }
    }
}

/// A complex time-frequency map over `(τ, μ)`; rows index `τ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectroMap {
    pub kind: MapKind,
    pub tau_axis: DelayGrid,
    pub mu_axis: DelayGrid,
    /// Carrier of the underlying function (analytic phase of `stft_plus`).
    pub carrier: f64,
    pub values: Array2<Complex64>,
}

impl SpectroMap {
    pub fn new(kind: MapKind, tau_axis: DelayGrid, mu_axis: DelayGrid, carrier: f64, values: Array2<Complex64>) -> Result<Self> {
        if values.dim() != (tau_axis.count(), mu_axis.count()) {
            return Err(Error::GridMismatch(format!(
                "map is {:?} but axes are {}x{}",
                values.dim(),
                tau_axis.count(),
                mu_axis.count()
            )));
        }
        if let Some(index) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { kind, tau_axis, mu_axis, carrier, values })
    }

    /// Largest point-wise modulus of the difference to another map.
    pub fn max_abs_diff(&self, other: &SpectroMap) -> f64 {
        self.values
            .iter()
            .zip(other.values.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

fn check_shift(f: &SpectralFunction, shift: f64) -> Result<()> {
    let span = f.grid().span();
    if shift.abs() > span {
        return Err(Error::OffGrid { shift, leakage: 1.0, required_span: shift.abs() });
    }
    Ok(())
}

/// Weighted samples ready for repeated Fourier sums.
#[derive(Clone, Debug)]
pub(crate) struct PhasedSum {
    weighted: Vec<Complex64>,
    positions: Vec<f64>,
}

impl PhasedSum {
    pub(crate) fn new(values: Vec<Complex64>, f: &SpectralFunction) -> Self {
        let g = f.grid();
        let w = trapezoid_weights(g.count(), g.spacing());
        Self {
            weighted: values.iter().zip(&w).map(|(v, w)| v * *w).collect(),
            positions: g.positions(),
        }
    }

    /// `Σ w_n v_n e^{-i k x_n}`.
    pub(crate) fn eval(&self, k: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (v, x) in self.weighted.iter().zip(&self.positions) {
            acc += v * Complex64::cis(-k * x);
        }
        acc
    }
}

/// `W₋(·, m)` for fixed `m`.
#[derive(Clone, Debug)]
pub struct WignerColumn {
    m: f64,
    sum: PhasedSum,
}

impl WignerColumn {
    pub fn new(f: &SpectralFunction, m: f64) -> Result<Self> {
        check_shift(f, 2.0 * m)?;
        // W = e^{2imτ} ∫ f(2m - y) f*(y) e^{-2iyτ} dy; f(2m - y_n) = f(2m + y_{N-1-n}).
        let shifted = f.shifted(2.0 * m);
        let n = shifted.len();
        let product = (0..n).map(|k| shifted[n - 1 - k] * f.values()[k].conj()).collect();
        Ok(Self { m, sum: PhasedSum::new(product, f) })
    }

    pub fn eval(&self, tau: f64) -> Complex64 {
        Complex64::cis(2.0 * self.m * tau) * self.sum.eval(2.0 * tau)
    }
}

/// `∫ f(x) f*(x+μ) e^{∓2ixτ}` for fixed `μ`; shared by both STFTs.
#[derive(Clone, Debug)]
pub struct StftColumn {
    mu: f64,
    carrier: f64,
    sum: PhasedSum,
}

impl StftColumn {
    pub fn new(f: &SpectralFunction, mu: f64) -> Result<Self> {
        check_shift(f, mu)?;
        let shifted = f.shifted(mu);
        let product = f.values().iter().zip(&shifted).map(|(a, b)| a * b.conj()).collect();
        Ok(Self { mu, carrier: f.grid().carrier(), sum: PhasedSum::new(product, f) })
    }

    /// `stft_plus(f, μ, τ)`.
    pub fn plus(&self, tau: f64) -> Complex64 {
        Complex64::cis((2.0 * self.carrier + self.mu) * tau) * self.sum.eval(-2.0 * tau)
    }

    /// `stft_minus(f, μ, τ)`.
    pub fn minus(&self, tau: f64) -> Complex64 {
        self.sum.eval(2.0 * tau)
    }

    /// `centered_stft_minus(f, μ, τ) = e^{-iμτ} · conj(stft_minus(f, μ, -τ))`.
    pub fn centered_minus(&self, tau: f64) -> Complex64 {
        Complex64::cis(-self.mu * tau) * self.sum.eval(-2.0 * tau).conj()
    }

    /// `e^{iμτ} · stft_plus(f, μ, τ)`, the form in which `f₊` enters the
    /// N00N and combination interferograms.
    pub fn phased_plus(&self, tau: f64) -> Complex64 {
        Complex64::cis(self.mu * tau) * self.plus(tau)
    }
}

pub fn wigner_minus(f: &SpectralFunction, tau: f64, m: f64) -> Result<Complex64> {
    Ok(WignerColumn::new(f, m)?.eval(tau))
}

pub fn stft_plus(f: &SpectralFunction, mu: f64, tau: f64) -> Result<Complex64> {
    Ok(StftColumn::new(f, mu)?.plus(tau))
}

pub fn stft_minus(f: &SpectralFunction, mu: f64, tau: f64) -> Result<Complex64> {
    Ok(StftColumn::new(f, mu)?.minus(tau))
}

/// `∫ f(x+μ/2) f*(x-μ/2) e^{-2ixτ} dx`; real for any definite-parity `f`.
pub fn centered_stft_minus(f: &SpectralFunction, mu: f64, tau: f64) -> Result<Complex64> {
    Ok(StftColumn::new(f, mu)?.centered_minus(tau))
}

pub fn p_plus(f: &SpectralFunction, tau0: f64, mu: f64) -> Complex64 {
    let c = f.grid().carrier();
    let sum = PhasedSum::new(f.values().to_vec(), f);
    Complex64::cis(-(2.0 * c + 2.0 * mu) * tau0) * sum.eval(2.0 * tau0)
}

pub fn p_minus(f: &SpectralFunction, tau0: f64, mu: f64) -> Complex64 {
    p_plus(f, tau0, mu)
}

pub fn displacement_char(f: &SpectralFunction, mu: f64, tau: f64) -> Result<Complex64> {
    check_shift(f, mu)?;
    let shifted = f.shifted(-mu);
    let product = shifted.iter().zip(f.values()).map(|(a, b)| a * b.conj()).collect();
    let sum = PhasedSum::new(product, f);
    Ok(Complex64::cis(-0.5 * mu * tau) * sum.eval(-tau))
}

/// Evaluates a map kind over the `(τ, μ)` lattice.
pub fn map_over_grid(kind: MapKind, f: &SpectralFunction, tau_axis: DelayGrid, mu_axis: DelayGrid) -> Result<SpectroMap> {
    let taus = tau_axis.positions();
    let column = |mu: f64| -> Result<Vec<Complex64>> {
        Ok(match kind {
            MapKind::WignerMinus => {
                let c = WignerColumn::new(f, 0.5 * mu)?;
                taus.iter().map(|&t| c.eval(t)).collect()
            }
            MapKind::StftPlus => {
                let c = StftColumn::new(f, mu)?;
                taus.iter().map(|&t| c.plus(t)).collect()
            }
            MapKind::StftMinus => {
                let c = StftColumn::new(f, mu)?;
                taus.iter().map(|&t| c.minus(t)).collect()
            }
        })
    };
    let columns = crate::exec::map_collect(mu_axis.positions(), crate::exec::Execution::default(), column)?;
    let values = Array2::from_shape_fn((tau_axis.count(), mu_axis.count()), |(j, k)| columns[k][j]);
    SpectroMap::new(kind, tau_axis, mu_axis, f.grid().carrier(), values)
}
