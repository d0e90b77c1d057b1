//! Inversion of quadrature scan pairs back to the complex `f₊` and `f₋`.
//!
//! Each transform collapses onto a product `π·f(a)·f*(x)` under one `τ`
//! integral:
//!
//! * `∫ W₋(τ, (a+x)/2) e^{i(x−a)τ} dτ`, column `μ = a + x`
//! * `∫ stft_plus(f, x−a, τ) e^{-i(2c+a+x)τ} dτ`, column `μ = x − a`
//! * `∫ stft_minus(f, x−a, τ) e^{2iaτ} dτ`, column `μ = x − a`
//!
//! The same integral at `x = a` gives `π|f(a)|²`. The anchor `a` is either
//! the origin or the lattice point of largest `|f(a)|`. Its phase is set to
//! zero, so estimates are defined up to a global phase.

use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::distributions::{map_over_grid, MapKind, SpectroMap};
use crate::error::{Error, Result};
use crate::exec::{map_collect, Execution};
use crate::interferometers::{CoincidenceScan, InterferometerKind, NoiseSpec};
use crate::jsa::{SpectralFunction, SymmetryClass};
use crate::math::{trapezoid_weights, DelayGrid, FrequencyGrid, UniformAxis};

/// Smallest `|f(0)|/peak` accepted by the origin anchor.
pub const ANCHOR_FLOOR: f64 = 1e-3;
/// Largest noiseless `|M|` at a lobe-window boundary relative to the peak.
pub const LOBE_OVERLAP_LIMIT: f64 = 1e-6;
/// Fraction of the lobe window given to the linear taper.
pub const TAPER_FRACTION: f64 = 0.1;

const PHASE_TOLERANCE: f64 = 1e-12;

/// Scans at `φ = 0` and `φ = π/2` that agree in everything else.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadraturePair {
    scan_re: CoincidenceScan,
    scan_im: CoincidenceScan,
}

impl QuadraturePair {
    pub fn new(scan_re: CoincidenceScan, scan_im: CoincidenceScan) -> Result<Self> {
        let (a, b) = (&scan_re.config, &scan_im.config);
        let mismatch = |what: &str| Err(Error::ScanMismatch(what.to_string()));
        if a.arm_phase.abs() > PHASE_TOLERANCE {
            return mismatch(&format!("in-phase scan must have φ = 0, got {}", a.arm_phase));
        }
        if (b.arm_phase - std::f64::consts::FRAC_PI_2).abs() > PHASE_TOLERANCE {
            return mismatch(&format!("quadrature scan must have φ = π/2, got {}", b.arm_phase));
        }
        if a.kind != b.kind {
            return mismatch("interferometers differ");
        }
        if a.tau_grid != b.tau_grid || a.mu_grid != b.mu_grid {
            return mismatch("scan grids differ");
        }
        if scan_re.values.dim() != scan_im.values.dim() {
            return mismatch("scan shapes differ");
        }
        match (a.noise, b.noise) {
            (NoiseSpec::None, NoiseSpec::None) => {}
            (NoiseSpec::Poisson { pairs: p, .. }, NoiseSpec::Poisson { pairs: q, .. }) if p == q => {}
            _ => return mismatch("noise settings differ"),
        }
        if scan_re.symmetry != scan_im.symmetry {
            return mismatch("source symmetry differs");
        }
        if scan_re.carrier != scan_im.carrier {
            return mismatch("carriers differ");
        }
        Ok(Self { scan_re, scan_im })
    }

    pub fn scan_re(&self) -> &CoincidenceScan {
        &self.scan_re
    }

    pub fn scan_im(&self) -> &CoincidenceScan {
        &self.scan_im
    }

    fn kind(&self) -> InterferometerKind {
        self.scan_re.config.kind
    }

    fn mus(&self) -> Vec<f64> {
        self.scan_re.config.mu_grid.positions()
    }

    fn taus(&self) -> Vec<f64> {
        self.scan_re.config.tau_grid.positions()
    }

    /// `(R₀ − ½) + i(R_{π/2} − ½)`.
    fn centered(&self) -> Array2<Complex64> {
        let (re, im) = (&self.scan_re.values, &self.scan_im.values);
        Array2::from_shape_fn(re.dim(), |idx| Complex64::new(re[idx] - 0.5, im[idx] - 0.5))
    }
}

fn require_centered(axis: &DelayGrid, what: &str) -> Result<()> {
    if axis.center() != 0.0 {
        return Err(Error::InvalidGrid(format!("the {what} axis must be centered on zero")));
    }
    Ok(())
}

/// Index of `-τ_j` on a zero-centered axis.
fn mirror(j: usize, count: usize) -> usize {
    count - 1 - j
}

/// Complex map read out from a HOM or N00N quadrature pair.
pub fn assemble_complex_map(pair: &QuadraturePair) -> Result<SpectroMap> {
    let m = pair.centered();
    let taus = pair.taus();
    let mus = pair.mus();
    let cfg = &pair.scan_re.config;
    let (n_tau, n_mu) = m.dim();
    match pair.kind() {
        InterferometerKind::Hom => {
            let values = m.mapv(|z| -2.0 * z);
            SpectroMap::new(MapKind::WignerMinus, cfg.tau_grid, cfg.mu_grid, 0.0, values)
        }
        InterferometerKind::Noon => match pair.scan_re.symmetry {
            SymmetryClass::Symmetric => {
                let values = Array2::from_shape_fn((n_tau, n_mu), |(j, k)| {
                    Complex64::cis(-mus[k] * taus[j]) * 2.0 * m[(j, k)]
                });
                SpectroMap::new(MapKind::StftPlus, cfg.tau_grid, cfg.mu_grid, pair.scan_re.carrier, values)
            }
            SymmetryClass::Antisymmetric => {
                require_centered(&cfg.tau_grid, "τ")?;
                let values = Array2::from_shape_fn((n_tau, n_mu), |(j, k)| {
                    Complex64::cis(mus[k] * taus[j]) * (2.0 * m[(mirror(j, n_tau), k)]).conj()
                });
                SpectroMap::new(MapKind::StftMinus, cfg.tau_grid, cfg.mu_grid, 0.0, values)
            }
            SymmetryClass::Anyonic => Err(Error::NoClosedForm),
        },
        InterferometerKind::Combo { .. } => Err(Error::InvalidParameter(
            "combination scans carry two transforms; use combo_postprocess".into(),
        )),
    }
}

/// The two transforms separated from one combination quadrature pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComboMaps {
    pub map_plus: SpectroMap,
    pub map_minus: SpectroMap,
    /// Largest `|late − early|` between the recentered lobes.
    pub lobe_mismatch: f64,
    /// Largest boundary `|M|` over the peak `|M|`.
    pub overlap_ratio: f64,
}

fn taper(offset: usize, half: usize) -> f64 {
    let t = offset as f64 / half as f64;
    let inner = 1.0 - TAPER_FRACTION;
    if t <= inner {
        1.0
    } else {
        ((1.0 - t) / TAPER_FRACTION).max(0.0)
    }
}

/// `(n0, half, mid)`: `τ₀` in steps, lobe half-width in steps, center row.
fn combo_geometry(tau0: f64, axis: &DelayGrid) -> Result<(usize, usize, usize)> {
    require_centered(axis, "τ")?;
    let dt = axis.spacing();
    let steps = tau0 / dt;
    let n0 = steps.round();
    if (steps - n0).abs() > 1e-9 || n0 < 2.0 {
        return Err(Error::InvalidGrid(format!("τ₀ = {tau0} must be at least two whole τ steps of {dt}")));
    }
    let n0 = n0 as usize;
    let half = n0 / 2;
    let mid = (axis.count() - 1) / 2;
    if axis.count().is_multiple_of(2) || mid < n0 + half {
        return Err(Error::InvalidGrid(format!(
            "the τ axis must be odd and reach ±{} to hold both lobe windows",
            (n0 + half) as f64 * dt
        )));
    }
    Ok((n0, half, mid))
}

/// Checks that a scan lattice can be inverted, before any scan is run.
pub fn check_lattice(kind: InterferometerKind, symmetry: SymmetryClass, tau_axis: &DelayGrid, mu_axis: &DelayGrid) -> Result<()> {
    require_centered(mu_axis, "μ")?;
    if mu_axis.count().is_multiple_of(2) {
        return Err(Error::InvalidGrid("the μ axis needs an odd count so that μ = 0 is sampled".into()));
    }
    match (kind, symmetry) {
        (InterferometerKind::Hom, _) => Ok(()),
        (_, SymmetryClass::Anyonic) => Err(Error::NoClosedForm),
        (InterferometerKind::Noon, SymmetryClass::Symmetric) => Ok(()),
        (InterferometerKind::Noon, _) => require_centered(tau_axis, "τ"),
        (InterferometerKind::Combo { tau0 }, _) => combo_geometry(tau0, tau_axis).map(|_| ()),
    }
}

/// Splits a combination pair into `stft_plus(f₊)` and `stft_minus(f₋)` maps.
///
/// The lobes at `τ = ±τ₀` are cut with half-width `τ₀/2`, recentered and
/// averaged. That transform is then substituted into the central cluster to
/// isolate the other one.
pub fn combo_postprocess(pair: &QuadraturePair) -> Result<ComboMaps> {
    let tau0 = match pair.kind() {
        InterferometerKind::Combo { tau0 } => tau0,
        _ => return Err(Error::InvalidParameter("postprocessing needs a combination scan".into())),
    };
    let symmetric = match pair.scan_re.symmetry {
        SymmetryClass::Symmetric => true,
        SymmetryClass::Antisymmetric => false,
        SymmetryClass::Anyonic => return Err(Error::NoClosedForm),
    };
    let cfg = &pair.scan_re.config;
    let axis = cfg.tau_grid;
    let dt = axis.spacing();
    let (n0, half, mid) = combo_geometry(tau0, &axis)?;
    let m = pair.centered();
    let mus = pair.mus();
    let n_mu = mus.len();

    let peak = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut boundary: f64 = 0.0;
    for row in [mid - half, mid + half, mid - n0 - half, mid - n0 + half, mid + n0 - half, mid + n0 + half] {
        for k in 0..n_mu {
            boundary = boundary.max(m[(row, k)].norm());
        }
    }
    let noise_floor = match cfg.noise {
        NoiseSpec::Poisson { pairs, .. } => 0.5 * std::f64::consts::SQRT_2 / (pairs as f64).sqrt(),
        NoiseSpec::None => 0.0,
    };
    let overlap_ratio = boundary / peak;
    if boundary > LOBE_OVERLAP_LIMIT * peak + 5.0 * noise_floor {
        return Err(Error::LobeOverlap { ratio: overlap_ratio });
    }

    let count = 2 * half + 1;
    let out_axis = DelayGrid::centered(count, dt)?;
    let ts = out_axis.positions();
    let mut lobe = Array2::<Complex64>::zeros((count, n_mu));
    let mut center = Array2::<Complex64>::zeros((count, n_mu));
    let mut lobe_mismatch: f64 = 0.0;
    for (i, t_idx) in (0..count).enumerate() {
        let late = mid + n0 + t_idx - half;
        let early = mid - n0 + t_idx - half;
        let here = mid + t_idx - half;
        for (k, &mu) in mus.iter().enumerate() {
            let (a, b) = if symmetric {
                (
                    8.0 * Complex64::cis(-2.0 * mu * tau0) * m[(late, k)],
                    8.0 * Complex64::cis(2.0 * mu * tau0) * m[(early, k)],
                )
            } else {
                (8.0 * m[(late, k)], 8.0 * m[(early, k)])
            };
            lobe_mismatch = lobe_mismatch.max((a - b).norm());
            let avg = 0.5 * (a + b);
            lobe[(i, k)] = avg;
            center[(i, k)] = if symmetric { -4.0 * m[(here, k)] - avg } else { 4.0 * m[(here, k)] - avg };
        }
    }
    let weight: Vec<f64> = (0..count).map(|i| taper(i.abs_diff(half), half)).collect();
    let (phi_plus, kay) = if symmetric { (&lobe, &center) } else { (&center, &lobe) };
    let plus = Array2::from_shape_fn((count, n_mu), |(i, k)| {
        weight[i] * Complex64::cis(-mus[k] * ts[i]) * phi_plus[(i, k)]
    });
    let minus = Array2::from_shape_fn((count, n_mu), |(i, k)| {
        weight[i] * Complex64::cis(mus[k] * ts[i]) * kay[(mirror(i, count), k)].conj()
    });
    Ok(ComboMaps {
        map_plus: SpectroMap::new(MapKind::StftPlus, out_axis, cfg.mu_grid, pair.scan_re.carrier, plus)?,
        map_minus: SpectroMap::new(MapKind::StftMinus, out_axis, cfg.mu_grid, 0.0, minus)?,
        lobe_mismatch,
        overlap_ratio,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    FPlus,
    FMinus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Hom,
    Noon,
    Combo,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnchorPolicy {
    /// `a = 0`; rejected when `|f(0)|` is below [`ANCHOR_FLOOR`] of the peak.
    Origin,
    /// The lattice point of largest estimated `|f(a)|`.
    #[default]
    MaxModulus,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Anchor {
    pub policy: AnchorPolicy,
    /// Baseband offset `a`.
    pub offset: f64,
    /// `|f(a)|` from the map's own marginal.
    pub modulus: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReconstructionReport {
    pub target: Target,
    pub estimate: SpectralFunction,
    pub fidelity: Option<f64>,
    /// `|map − transform(estimate)|` on the map lattice.
    pub residual_map: Array2<f64>,
    pub method: Method,
    pub anchor: Anchor,
}

impl ReconstructionReport {
    /// Resamples `truth` onto the estimate grid, aligns the estimate's global
    /// phase to it and records the fidelity.
    pub fn with_truth(mut self, truth: &SpectralFunction) -> Result<Self> {
        let reference = truth.resampled(*self.estimate.grid())?;
        self.estimate = align_global_phase(&self.estimate, &reference)?;
        self.fidelity = Some(fidelity(&self.estimate, &reference)?);
        Ok(self)
    }
}

/// Per-kind geometry of the collapsing integral.
struct Inversion<'a> {
    map: &'a SpectroMap,
    taus: Vec<f64>,
    weights: Vec<f64>,
    mid: usize,
}

impl<'a> Inversion<'a> {
    fn new(map: &'a SpectroMap) -> Result<Self> {
        require_centered(&map.mu_axis, "μ")?;
        if map.mu_axis.count().is_multiple_of(2) {
            return Err(Error::InvalidGrid("the μ axis needs an odd count so that μ = 0 is sampled".into()));
        }
        let tau = map.tau_axis;
        Ok(Self {
            map,
            taus: tau.positions(),
            weights: trapezoid_weights(tau.count(), tau.spacing()),
            mid: (map.mu_axis.count() - 1) / 2,
        })
    }

    fn step(&self) -> f64 {
        self.map.mu_axis.spacing()
    }

    /// Column index holding `(a, x)` for lattice indices `a = na·Δμ`, `x = nx·Δμ`.
    fn column(&self, na: i64, nx: i64) -> Option<usize> {
        let offset = match self.map.kind {
            MapKind::WignerMinus => na + nx,
            MapKind::StftPlus | MapKind::StftMinus => nx - na,
        };
        let k = self.mid as i64 + offset;
        (0..self.map.mu_axis.count() as i64).contains(&k).then_some(k as usize)
    }

    /// `π·f(a)·f*(x)`.
    fn collapse(&self, na: i64, nx: i64) -> Option<Complex64> {
        let k = self.column(na, nx)?;
        let h = self.step();
        let (a, x) = (na as f64 * h, nx as f64 * h);
        let mu = self.map.mu_axis.position(k);
        let freq = match self.map.kind {
            MapKind::WignerMinus => x - a,
            MapKind::StftPlus => -(2.0 * self.map.carrier + a + x),
            MapKind::StftMinus => 2.0 * a,
        };
        debug_assert!(match self.map.kind {
            MapKind::WignerMinus => (mu - (a + x)).abs() < 1e-9 * (1.0 + mu.abs()),
            _ => (mu - (x - a)).abs() < 1e-9 * (1.0 + mu.abs()),
        });
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, (t, w)) in self.taus.iter().zip(&self.weights).enumerate() {
            acc += self.map.values[(j, k)] * Complex64::cis(freq * t) * *w;
        }
        Some(acc)
    }

    /// Lattice indices at which `|f(a)|²` can be read from the map.
    fn anchor_candidates(&self) -> Vec<i64> {
        let m = self.mid as i64;
        let limit = match self.map.kind {
            MapKind::WignerMinus => m / 2,
            _ => m,
        };
        (-limit..=limit).collect()
    }

    /// `|f(a)|²` estimate, clamped at zero.
    fn modulus_sqr(&self, na: i64) -> f64 {
        self.collapse(na, na).map_or(0.0, |z| (z.re / std::f64::consts::PI).max(0.0))
    }
}

fn target_of(kind: MapKind) -> Target {
    match kind {
        MapKind::StftPlus => Target::FPlus,
        _ => Target::FMinus,
    }
}

fn method_of(kind: MapKind) -> Method {
    match kind {
        MapKind::WignerMinus => Method::Hom,
        _ => Method::Noon,
    }
}

fn reconstruct(map: &SpectroMap, policy: AnchorPolicy, execution: Execution) -> Result<ReconstructionReport> {
    let inv = Inversion::new(map)?;
    let candidates = inv.anchor_candidates();
    let moduli: Vec<f64> = candidates.iter().map(|&n| inv.modulus_sqr(n).sqrt()).collect();
    let (best, peak) = moduli
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
    if !(peak.is_finite() && peak > 0.0) {
        return Err(Error::ZeroNorm);
    }
    let na = match policy {
        AnchorPolicy::MaxModulus => candidates[best],
        AnchorPolicy::Origin => {
            let value = inv.modulus_sqr(0).sqrt();
            if value < ANCHOR_FLOOR * peak {
                return Err(Error::WeakAnchor { value, peak });
            }
            0
        }
    };
    let modulus = inv.modulus_sqr(na).sqrt();
    let count = map.mu_axis.count();
    let carrier = match map.kind {
        MapKind::StftPlus => map.carrier,
        _ => 0.0,
    };
    let grid = FrequencyGrid::new(count, inv.step(), carrier)?;
    let mid = inv.mid as i64;
    let scale = std::f64::consts::PI * modulus;
    let values = map_collect((0..count as i64).collect(), execution, |n| {
        Ok(inv.collapse(na, n - mid).map_or(Complex64::new(0.0, 0.0), |z| z.conj() / scale))
    })?;
    let estimate = SpectralFunction::normalized(grid, values)?;
    let forward = map_over_grid(map.kind, &estimate, map.tau_axis, map.mu_axis)?;
    let residual_map = Array2::from_shape_fn(map.values.dim(), |idx| (map.values[idx] - forward.values[idx]).norm());
    Ok(ReconstructionReport {
        target: target_of(map.kind),
        estimate,
        fidelity: None,
        residual_map,
        method: method_of(map.kind),
        anchor: Anchor { policy, offset: na as f64 * inv.step(), modulus },
    })
}

/// `f₊` or `f₋` from an STFT map.
pub fn reconstruct_from_stft(map: &SpectroMap, policy: AnchorPolicy) -> Result<ReconstructionReport> {
    if map.kind == MapKind::WignerMinus {
        return Err(Error::InvalidParameter("expected an STFT map".into()));
    }
    reconstruct(map, policy, Execution::default())
}

/// `f₋` from a `W₋(τ, μ/2)` map.
pub fn reconstruct_from_wigner(map: &SpectroMap, policy: AnchorPolicy) -> Result<ReconstructionReport> {
    if map.kind != MapKind::WignerMinus {
        return Err(Error::InvalidParameter("expected a Wigner map".into()));
    }
    reconstruct(map, policy, Execution::default())
}

/// Both reconstructions of a combination pair, `(f₊, f₋)`.
pub fn reconstruct_combo(pair: &QuadraturePair, policy: AnchorPolicy) -> Result<(ReconstructionReport, ReconstructionReport, ComboMaps)> {
    let maps = combo_postprocess(pair)?;
    let mut plus = reconstruct_from_stft(&maps.map_plus, policy)?;
    let mut minus = reconstruct_from_stft(&maps.map_minus, policy)?;
    plus.method = Method::Combo;
    minus.method = Method::Combo;
    Ok((plus, minus, maps))
}

/// `|⟨a, b⟩|²` of two unit-norm functions on one grid.
pub fn fidelity(a: &SpectralFunction, b: &SpectralFunction) -> Result<f64> {
    let overlap = a.inner(b)?.norm_sqr() / (a.norm_sqr() * b.norm_sqr());
    Ok(overlap.min(1.0))
}

/// `estimate` times the unit phase maximizing `Re⟨reference, estimate⟩`.
pub fn align_global_phase(estimate: &SpectralFunction, reference: &SpectralFunction) -> Result<SpectralFunction> {
    let z = reference.inner(estimate)?;
    if z.norm() <= 1e-12 {
        return Err(Error::ZeroOverlap);
    }
    Ok(estimate.with_phase(-z.arg()))
}

/// Quadratic spectral phase `c₀ + c₁x + c₂x²` fitted to the unwrapped phase.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChirpFit {
    pub constant: f64,
    pub linear: f64,
    pub quadratic: f64,
}

/// Weighted (`|f|²`) least-squares phase fit over samples above `floor·peak`.
pub fn fit_chirp(f: &SpectralFunction, floor: f64) -> Result<ChirpFit> {
    let values = f.values();
    let peak_idx = (0..values.len())
        .max_by(|&a, &b| values[a].norm().total_cmp(&values[b].norm()))
        .ok_or(Error::ZeroNorm)?;
    let limit = floor * values[peak_idx].norm();
    let mut lo = peak_idx;
    while lo > 0 && values[lo - 1].norm() >= limit {
        lo -= 1;
    }
    let mut hi = peak_idx;
    while hi + 1 < values.len() && values[hi + 1].norm() >= limit {
        hi += 1;
    }
    if hi - lo < 2 {
        return Err(Error::TooFewSamples(hi - lo + 1));
    }
    let mut phase = vec![0.0; values.len()];
    phase[peak_idx] = values[peak_idx].arg();
    for n in peak_idx + 1..=hi {
        phase[n] = phase[n - 1] + (values[n] * values[n - 1].conj()).arg();
    }
    for n in (lo..peak_idx).rev() {
        phase[n] = phase[n + 1] + (values[n] * values[n + 1].conj()).arg();
    }
    let mut ata = [[0.0; 3]; 3];
    let mut atb = [0.0; 3];
    for n in lo..=hi {
        let x = f.grid().offset(n);
        let w = values[n].norm_sqr();
        let basis = [1.0, x, x * x];
        for r in 0..3 {
            atb[r] += w * basis[r] * phase[n];
            for c in 0..3 {
                ata[r][c] += w * basis[r] * basis[c];
            }
        }
    }
    let [constant, linear, quadratic] = solve3(ata, atb).ok_or(Error::TooFewSamples(hi - lo + 1))?;
    Ok(ChirpFit { constant, linear, quadratic })
}

fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let pivot = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..3 {
            let factor = a[row][col] / a[col][col];
            let pivot_row = a[col];
            for (x, p) in a[row][col..].iter_mut().zip(&pivot_row[col..]) {
                *x -= factor * p;
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let tail: f64 = (row + 1..3).map(|c| a[row][c] * x[c]).sum();
        x[row] = (b[row] - tail) / a[row][row];
    }
    Some(x)
}
