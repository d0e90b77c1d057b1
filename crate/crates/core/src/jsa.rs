//! Joint spectral amplitudes: separable `f₊(ω₊)·f₋(ω₋)` products, full 2D
//! grids, canonical shapes and exchange symmetry.
//!
//! Each of `f₊`, `f₋` and `f` carries unit L2 norm. With `ω± = (ω_s ± ω_i)/2`
//! the Jacobian is `dω_s dω_i = 2 dω₊ dω₋`, so `f = f₊·f₋/√2`.

use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::{interpolate, shift_samples, FrequencyGrid, UniformAxis};

/// Largest parity deviation still counted as a definite parity.
pub const PARITY_TOLERANCE: f64 = 1e-9;
/// Largest norm fraction `to_general` may lose to truncation.
pub const LEAKAGE_TOLERANCE: f64 = 1e-6;
/// Distance from exactly ±1 at which a symmetry score still classifies.
pub const SYMMETRY_SCORE_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SymmetryClass {
    Symmetric,
    Antisymmetric,
    Anyonic,
}

impl SymmetryClass {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Symmetric => "symmetric",
            Self::Antisymmetric => "antisymmetric",
            Self::Anyonic => "anyonic",
        }
    }
}

/// A unit-norm complex function sampled on a frequency grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralFunction {
    grid: FrequencyGrid,
    values: Vec<Complex64>,
}

impl SpectralFunction {
    /// Normalizes `values` to unit norm.
    pub fn normalized(grid: FrequencyGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.count() {
            return Err(Error::LengthMismatch { expected: grid.count(), found: values.len() });
        }
        crate::math::check_finite(&values)?;
        let norm_sq: f64 = values.iter().map(|v| v.norm_sqr()).sum::<f64>() * grid.spacing();
        if !(norm_sq.is_finite() && norm_sq > 0.0) {
            return Err(Error::ZeroNorm);
        }
        let scale = 1.0 / norm_sq.sqrt();
        Ok(Self { grid, values: values.into_iter().map(|v| v * scale).collect() })
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.spacing()
    }

    /// `⟨self, other⟩ = ∫ self* · other`. Grids must match.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch("inner product needs identical grids".into()));
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (a, b) in self.values.iter().zip(&other.values) {
            acc += a.conj() * b;
        }
        Ok(acc * self.grid.spacing())
    }

    /// Value at a baseband offset (band-limited interpolation, zero off-grid).
    pub fn value_at(&self, offset: f64) -> Complex64 {
        interpolate(&self.values, self.grid.first(), self.grid.spacing(), offset)
    }

    /// Samples `f(x_n + shift)` on this function's grid.
    pub fn shifted(&self, shift: f64) -> Vec<Complex64> {
        shift_samples(&self.values, self.grid.spacing(), shift)
    }

    /// Multiplies by a global phase.
    pub fn with_phase(&self, theta: f64) -> Self {
        let p = Complex64::cis(theta);
        Self { grid: self.grid, values: self.values.iter().map(|v| v * p).collect() }
    }

    /// Complex conjugate.
    pub fn conj(&self) -> Self {
        Self { grid: self.grid, values: self.values.iter().map(|v| v.conj()).collect() }
    }

    /// `f(-ω)`: the sample order reversed on the symmetric grid.
    pub fn reflected(&self) -> Self {
        Self { grid: self.grid, values: self.values.iter().rev().copied().collect() }
    }

    /// `max_n |f(-x_n) - sign·f(x_n)|`.
    pub fn parity_deviation(&self, sign: f64) -> f64 {
        let n = self.values.len();
        (0..n)
            .map(|k| (self.values[n - 1 - k] - self.values[k] * sign).norm())
            .fold(0.0, f64::max)
    }

    /// RMS width of `|f|²` about its mean offset.
    pub fn rms_width(&self) -> f64 {
        let (mut m0, mut m1, mut m2) = (0.0, 0.0, 0.0);
        for (n, v) in self.values.iter().enumerate() {
            let x = self.grid.offset(n);
            let p = v.norm_sqr();
            m0 += p;
            m1 += p * x;
            m2 += p * x * x;
        }
        let mean = m1 / m0;
        (m2 / m0 - mean * mean).max(0.0).sqrt()
    }

    /// Band-limited resampling onto another grid, renormalized.
    pub fn resampled(&self, grid: FrequencyGrid) -> Result<Self> {
        let shift = grid.carrier() - self.grid.carrier();
        let values = (0..grid.count()).map(|n| self.value_at(shift + grid.offset(n))).collect();
        Self::normalized(grid, values)
    }

    /// Maximum modulus over the samples.
    pub fn peak(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

fn check_width(grid: &FrequencyGrid, center: f64, width: f64, what: &str) -> Result<()> {
    if !(width.is_finite() && width > 0.0) {
        return Err(Error::InvalidParameter(format!("{what} must be positive, got {width}")));
    }
    let reach = (center - grid.first()).min(grid.last() - center);
    if reach < 3.0 * width {
        return Err(Error::GridTooNarrow(format!(
            "grid reaches {reach} from the center but needs at least {} (3x {what})",
            3.0 * width
        )));
    }
    Ok(())
}

/// `exp(-(ω-c)²/4σ²)·exp(i·chirp·(ω-c)²)`, normalized.
pub fn make_gaussian(grid: FrequencyGrid, center_offset: f64, sigma: f64, chirp: f64) -> Result<SpectralFunction> {
    check_width(&grid, center_offset, sigma, "sigma")?;
    if !chirp.is_finite() {
        return Err(Error::InvalidParameter("chirp must be finite".into()));
    }
    let values = grid
        .positions()
        .iter()
        .map(|&w| {
            let d = w - center_offset;
            Complex64::from_polar((-d * d / (4.0 * sigma * sigma)).exp(), chirp * d * d)
        })
        .collect();
    SpectralFunction::normalized(grid, values)
}

/// Hermite-Gauss order 0 (even Gaussian) or 1 (`ω`·Gaussian, odd), normalized.
pub fn make_hermite_gauss(grid: FrequencyGrid, order: u32, sigma: f64) -> Result<SpectralFunction> {
    check_width(&grid, 0.0, sigma, "sigma")?;
    let values = match order {
        0 => grid.positions().iter().map(|&w| Complex64::new((-w * w / (4.0 * sigma * sigma)).exp(), 0.0)).collect(),
        1 => grid
            .positions()
            .iter()
            .map(|&w| Complex64::new(w / sigma * (-w * w / (4.0 * sigma * sigma)).exp(), 0.0))
            .collect(),
        _ => return Err(Error::InvalidParameter(format!("Hermite-Gauss order must be 0 or 1, got {order}"))),
    };
    SpectralFunction::normalized(grid, values)
}

/// `sin(ω/b)/(ω/b)`, normalized.
pub fn make_sinc(grid: FrequencyGrid, bandwidth: f64) -> Result<SpectralFunction> {
    check_width(&grid, 0.0, bandwidth, "bandwidth")?;
    let values = grid
        .positions()
        .iter()
        .map(|&w| {
            let x = w / bandwidth;
            Complex64::new(if x == 0.0 { 1.0 } else { x.sin() / x }, 0.0)
        })
        .collect();
    SpectralFunction::normalized(grid, values)
}

/// `f(ω_s, ω_i) = f₊(ω₊)·f₋(ω₋)/√2` with a definite-parity `f₋`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparableJsa {
    pump: SpectralFunction,
    phasematch: SpectralFunction,
    symmetry: SymmetryClass,
}

impl SeparableJsa {
    /// Classifies the parity of `phasematch`; anyonic products are rejected.
    pub fn new(pump: SpectralFunction, phasematch: SpectralFunction) -> Result<Self> {
        if phasematch.grid().carrier() != 0.0 {
            return Err(Error::InvalidGrid("the phase-matching axis is baseband; its carrier must be 0".into()));
        }
        let even = phasematch.parity_deviation(1.0);
        let odd = phasematch.parity_deviation(-1.0);
        let symmetry = if even <= PARITY_TOLERANCE {
            SymmetryClass::Symmetric
        } else if odd <= PARITY_TOLERANCE {
            SymmetryClass::Antisymmetric
        } else {
            return Err(Error::NoDefiniteParity { deviation: even.min(odd) });
        };
        Ok(Self { pump, phasematch, symmetry })
    }

    pub fn pump(&self) -> &SpectralFunction {
        &self.pump
    }

    pub fn phasematch(&self) -> &SpectralFunction {
        &self.phasematch
    }

    pub fn symmetry(&self) -> SymmetryClass {
        self.symmetry
    }

    /// +1 for symmetric, -1 for antisymmetric.
    pub fn parity(&self) -> f64 {
        match self.symmetry {
            SymmetryClass::Antisymmetric => -1.0,
            _ => 1.0,
        }
    }

    /// Multiplies the pump by a global phase.
    pub fn with_phase(&self, theta: f64) -> Self {
        Self { pump: self.pump.with_phase(theta), ..self.clone() }
    }
}

/// Full complex JSA on an `(ω_s, ω_i)` grid; rows index `ω_s`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneralJsa {
    grid_s: FrequencyGrid,
    grid_i: FrequencyGrid,
    values: Array2<Complex64>,
}

impl GeneralJsa {
    /// Normalizes `values` to unit 2D norm.
    pub fn normalized(grid_s: FrequencyGrid, grid_i: FrequencyGrid, values: Array2<Complex64>) -> Result<Self> {
        if values.dim() != (grid_s.count(), grid_i.count()) {
            return Err(Error::GridMismatch(format!(
                "array is {:?} but grids are {}x{}",
                values.dim(),
                grid_s.count(),
                grid_i.count()
            )));
        }
        if let Some(index) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NonFinite { index });
        }
        let mut jsa = Self { grid_s, grid_i, values };
        let n = jsa.norm_sqr();
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::ZeroNorm);
        }
        let scale = 1.0 / n.sqrt();
        jsa.values.mapv_inplace(|v| v * scale);
        Ok(jsa)
    }

    pub fn grid_s(&self) -> &FrequencyGrid {
        &self.grid_s
    }

    pub fn grid_i(&self) -> &FrequencyGrid {
        &self.grid_i
    }

    pub fn values(&self) -> &Array2<Complex64> {
        &self.values
    }

    pub fn is_square(&self) -> bool {
        self.grid_s == self.grid_i
    }

    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid_s.spacing() * self.grid_i.spacing()
    }

    /// `⟨self, other⟩` over the common grid.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.grid_s != other.grid_s || self.grid_i != other.grid_i {
            return Err(Error::GridMismatch("inner product needs identical grids".into()));
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (a, b) in self.values.iter().zip(other.values.iter()) {
            acc += a.conj() * b;
        }
        Ok(acc * self.grid_s.spacing() * self.grid_i.spacing())
    }

    /// `|⟨self, other⟩|²`.
    pub fn fidelity(&self, other: &Self) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// Normalized `Σ c_k·f_k` over JSAs sharing one grid.
    pub fn superpose(parts: &[(Complex64, &GeneralJsa)]) -> Result<Self> {
        let (_, first) = parts.first().ok_or(Error::ZeroNorm)?;
        let mut values = Array2::zeros(first.values.dim());
        for (c, part) in parts {
            if part.grid_s != first.grid_s || part.grid_i != first.grid_i {
                return Err(Error::GridMismatch("superposed JSAs need identical grids".into()));
            }
            values.zip_mut_with(&part.values, |acc: &mut Complex64, v| *acc += c * v);
        }
        Self::normalized(first.grid_s, first.grid_i, values)
    }

    /// Multiplies by a global phase.
    pub fn with_phase(&self, theta: f64) -> Self {
        let p = Complex64::cis(theta);
        Self { values: self.values.mapv(|v| v * p), ..self.clone() }
    }

    fn require_square(&self) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(Error::GridMismatch("exchange needs identical signal and idler grids".into()))
        }
    }
}

/// Samples a separable JSA on the given grids.
///
/// Returns the JSA and the factor applied to restore unit norm.
pub fn to_general(jsa: &SeparableJsa, grid_s: FrequencyGrid, grid_i: FrequencyGrid) -> Result<(GeneralJsa, f64)> {
    product_to_general(jsa.pump(), jsa.phasematch(), grid_s, grid_i)
}

/// [`to_general`] for any product, including an indefinite-parity `f₋`.
pub fn product_to_general(
    pump: &SpectralFunction,
    pm: &SpectralFunction,
    grid_s: FrequencyGrid,
    grid_i: FrequencyGrid,
) -> Result<(GeneralJsa, f64)> {
    let plus_origin = 0.5 * (grid_s.carrier() + grid_i.carrier()) - pump.grid().carrier();
    let minus_origin = 0.5 * (grid_s.carrier() - grid_i.carrier());
    let (ns, ni) = (grid_s.count(), grid_i.count());
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let values = if grid_s == grid_i {
        // (x_j ± x_k)/2 takes only 2N-1 distinct values on a shared grid.
        let n = ns;
        let half = 0.5 * grid_s.spacing();
        let at = |m: usize| (m as f64 - (n - 1) as f64) * half;
        let plus: Vec<Complex64> = (0..2 * n - 1).map(|m| pump.value_at(plus_origin + at(m))).collect();
        let minus: Vec<Complex64> = (0..2 * n - 1).map(|m| pm.value_at(minus_origin + at(m))).collect();
        Array2::from_shape_fn((n, n), |(j, k)| plus[j + k] * minus[j + n - 1 - k] * scale)
    } else {
        Array2::from_shape_fn((ns, ni), |(j, k)| {
            let (s, i) = (grid_s.offset(j), grid_i.offset(k));
            pump.value_at(plus_origin + 0.5 * (s + i)) * pm.value_at(minus_origin + 0.5 * (s - i)) * scale
        })
    };
    let raw = GeneralJsa { grid_s, grid_i, values };
    let norm_sq = raw.norm_sqr();
    let leakage = 1.0 - norm_sq;
    if leakage > LEAKAGE_TOLERANCE {
        return Err(Error::SupportLeakage { leakage });
    }
    let factor = 1.0 / norm_sq.sqrt();
    let general = GeneralJsa::normalized(grid_s, grid_i, raw.values)?;
    Ok((general, factor))
}

/// Largest relative rank-1 residual accepted by [`factorize_separable`].
pub const FACTORIZATION_TOLERANCE: f64 = 1e-10;

/// Rank-1 split of a square JSA into `f₊` and `f₋`.
#[derive(Clone, Debug, PartialEq)]
pub struct Factorization {
    pub pump: SpectralFunction,
    pub phasematch: SpectralFunction,
    /// `1 − σ₁²/‖G‖²` of the rotated sample matrix `G`.
    pub residual: f64,
}

/// Splits `f(ω_s, ω_i)` into `f₊(ω₊)·f₋(ω₋)/√2`.
///
/// The samples with `j + k` even lie on an `(ω₊, ω₋)` lattice with the grid
/// spacing; the leading singular pair of that matrix gives `f₊` and `f₋`.
/// The largest-modulus sample of `f₋` is made real and positive.
pub fn factorize(jsa: &GeneralJsa) -> Result<Factorization> {
    jsa.require_square()?;
    let grid = jsa.grid_s;
    let n = grid.count();
    if n.is_multiple_of(2) {
        return Err(Error::InvalidGrid("factorization needs an odd sample count".into()));
    }
    let m = (n - 1) / 2;
    let g = Array2::from_shape_fn((n, n), |(p, q)| {
        let j = (p + q).checked_sub(m).filter(|&j| j < n);
        let k = (p + m).checked_sub(q).filter(|&k| k < n);
        match (j, k) {
            (Some(j), Some(k)) => jsa.values[(j, k)],
            _ => Complex64::new(0.0, 0.0),
        }
    });
    let total: f64 = g.iter().map(|v| v.norm_sqr()).sum();
    if !(total.is_finite() && total > 0.0) {
        return Err(Error::ZeroNorm);
    }
    let start = (0..n)
        .max_by(|&a, &b| {
            let ra: f64 = g.row(a).iter().map(|v| v.norm_sqr()).sum();
            let rb: f64 = g.row(b).iter().map(|v| v.norm_sqr()).sum();
            ra.total_cmp(&rb)
        })
        .expect("non-empty grid");
    let mut v: Vec<Complex64> = g.row(start).to_vec();
    let unit = |x: &mut Vec<Complex64>| {
        let norm = x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        x.iter_mut().for_each(|v| *v /= norm);
        norm
    };
    unit(&mut v);
    let mut u = vec![Complex64::new(0.0, 0.0); n];
    let mut sigma = 0.0;
    for _ in 0..500 {
        for (p, up) in u.iter_mut().enumerate() {
            *up = g.row(p).iter().zip(&v).map(|(a, b)| a * b.conj()).sum();
        }
        unit(&mut u);
        for (q, vq) in v.iter_mut().enumerate() {
            *vq = g.column(q).iter().zip(&u).map(|(a, b)| a * b.conj()).sum();
        }
        let next = unit(&mut v);
        let converged = (next - sigma).abs() <= 1e-15 * next;
        sigma = next;
        if converged {
            break;
        }
    }
    let residual = (1.0 - sigma * sigma / total).max(0.0);
    let minus = v;
    let anchor = minus.iter().copied().max_by(|a, b| a.norm().total_cmp(&b.norm())).expect("non-empty grid");
    let phase = Complex64::cis(-anchor.arg());
    let pump_grid = FrequencyGrid::new(n, grid.spacing(), grid.carrier())?;
    let pm_grid = FrequencyGrid::new(n, grid.spacing(), 0.0)?;
    Ok(Factorization {
        pump: SpectralFunction::normalized(pump_grid, u.iter().map(|x| x / phase).collect())?,
        phasematch: SpectralFunction::normalized(pm_grid, minus.iter().map(|x| x * phase).collect())?,
        residual,
    })
}

/// [`factorize`] followed by the separability and parity checks.
pub fn factorize_separable(jsa: &GeneralJsa) -> Result<(SeparableJsa, f64)> {
    let f = factorize(jsa)?;
    if f.residual > FACTORIZATION_TOLERANCE {
        return Err(Error::NotSeparable { residual: f.residual });
    }
    Ok((SeparableJsa::new(f.pump, f.phasematch)?, f.residual))
}

/// Swaps signal and idler: `f(ω_s, ω_i) -> f(ω_i, ω_s)`.
pub fn exchange(jsa: &GeneralJsa) -> Result<GeneralJsa> {
    jsa.require_square()?;
    Ok(GeneralJsa { grid_s: jsa.grid_s, grid_i: jsa.grid_i, values: jsa.values.t().to_owned() })
}

/// Normalized `f + sign·exchange(f)` with `sign = ±1`.
pub fn symmetrize(jsa: &GeneralJsa, sign: f64) -> Result<GeneralJsa> {
    if sign != 1.0 && sign != -1.0 {
        return Err(Error::InvalidParameter(format!("symmetrization sign must be +1 or -1, got {sign}")));
    }
    let swapped = exchange(jsa)?;
    let values = &jsa.values + &swapped.values.mapv(|v| v * sign);
    let out = GeneralJsa { grid_s: jsa.grid_s, grid_i: jsa.grid_i, values };
    if out.norm_sqr() < 1e-12 * jsa.norm_sqr() {
        return Err(Error::DegenerateSymmetrization { sign: if sign > 0.0 { '+' } else { '-' } });
    }
    GeneralJsa::normalized(out.grid_s, out.grid_i, out.values)
}

/// Exchange-symmetry class with score `Re⟨f, exchange(f)⟩`.
pub fn classify_symmetry(jsa: &GeneralJsa) -> Result<(SymmetryClass, f64)> {
    let swapped = exchange(jsa)?;
    let score = jsa.inner(&swapped)?.re / jsa.norm_sqr();
    let class = if score > 1.0 - SYMMETRY_SCORE_TOLERANCE {
        SymmetryClass::Symmetric
    } else if score < -1.0 + SYMMETRY_SCORE_TOLERANCE {
        SymmetryClass::Antisymmetric
    } else {
        SymmetryClass::Anyonic
    };
    Ok((class, score))
}
