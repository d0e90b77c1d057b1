//! Coincidence probabilities of the generalized HOM, N00N and combination
//! interferometers.
//!
//! Each interferometer is written as a sum of amplitude terms. A term is
//! `c · f(ω_s + μa, ω_i + μb)` (or the exchanged `f(ω_i + μb, ω_s + μa)`)
//! times delay phases. A shifted photon picks up `e^{-i(ω+μ)τ}`, an
//! unshifted delayed photon `e^{-iωτ}`, and a photon through the fixed
//! delay `e^{-iωτ₀}`, with absolute frequencies. The arm phase `e^{iφ}`
//! rides on every term whose signal photon was frequency shifted.
//!
//! The oracle integrates `prefactor · |Σ terms|²` on the 2D grid. The exact
//! closed form expands the same modulus into term pairs, each reducing to
//! one `f₊` and one `f₋` integral for a separable JSA. The named closed
//! forms are the reduced expressions in terms of `W₋`, `F₊` and `F₋`:
//!
//! * HOM: `½(1 − Re[e^{-iφ} W₋(τ, μ/2)])`
//! * N00N symmetric: `½(1 + Re[e^{-iφ} Φ₊(τ)])` with `Φ₊(t) = e^{iμt} F₊(μ, 2t)`
//! * N00N antisymmetric: `½(1 + Re[e^{-iφ} K(τ)])` with
//!   `K(t) = ∫ f₋(x+μ/2) f₋*(x−μ/2) e^{-2ixt} dx`
//! * combination, far delay, symmetric:
//!   `½(1 − ½Re[e^{-iφ}Φ₊(τ)] − ½Re[e^{-iφ}K(τ)]
//!      + ¼Re[e^{-iφ}e^{2iμτ₀}Φ₊(τ−τ₀)] + ¼Re[e^{-iφ}e^{-2iμτ₀}Φ₊(τ+τ₀)])`
//! * combination, far delay, antisymmetric:
//!   `½(1 + ½Re[e^{-iφ}Φ₊(τ)] + ½Re[e^{-iφ}K(τ)]
//!      + ¼Re[e^{-iφ}K(τ−τ₀)] + ¼Re[e^{-iφ}K(τ+τ₀)])`

use ndarray::Array2;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::distributions::{PhasedSum, StftColumn, WignerColumn};
use crate::error::{Error, Result};
use crate::exec::{map_collect, Execution};
use crate::jsa::{classify_symmetry, GeneralJsa, SeparableJsa, SpectralFunction, SymmetryClass};
use crate::math::{quadrature_weights, shift_samples, DelayGrid, UniformAxis};

/// Minimum `σ·τ₀` for the far-delay combination form.
pub const FAR_REGIME_PRODUCT: f64 = 8.0;
/// Largest norm fraction a shifted oracle array may lose off the grid.
pub const SHIFT_LEAKAGE_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum InterferometerKind {
    Hom,
    Noon,
    Combo { tau0: f64 },
}

impl InterferometerKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Hom => "hom",
            Self::Noon => "noon",
            Self::Combo { .. } => "combo",
        }
    }

    pub fn tau0(&self) -> f64 {
        match self {
            Self::Combo { tau0 } => *tau0,
            _ => 0.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Oracle,
    ClosedExact,
    ClosedFar,
}

impl Provenance {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Oracle => "oracle",
            Self::ClosedExact => "closed-exact",
            Self::ClosedFar => "closed-far",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum NoiseSpec {
    None,
    Poisson { pairs: u64, seed: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    pub kind: InterferometerKind,
    pub tau_grid: DelayGrid,
    pub mu_grid: DelayGrid,
    pub arm_phase: f64,
    pub noise: NoiseSpec,
}

impl ScanConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.arm_phase.is_finite() && (0.0..std::f64::consts::TAU).contains(&self.arm_phase)) {
            return Err(Error::InvalidParameter(format!("arm phase must lie in [0, 2π), got {}", self.arm_phase)));
        }
        if let InterferometerKind::Combo { tau0 } = self.kind {
            if !(tau0.is_finite() && tau0 >= 0.0) {
                return Err(Error::InvalidParameter(format!("tau0 must be non-negative, got {tau0}")));
            }
        }
        if let NoiseSpec::Poisson { pairs, .. } = self.noise {
            if pairs == 0 {
                return Err(Error::InvalidParameter("pairs per setting must be at least 1".into()));
            }
        }
        Ok(())
    }
}

/// `R(τ_j, μ_k)`; rows index `τ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoincidenceScan {
    pub config: ScanConfig,
    pub values: Array2<f64>,
    pub provenance: Provenance,
    pub symmetry: SymmetryClass,
    /// Carrier of `ω₊`, the reference for demodulating sum-frequency fringes.
    pub carrier: f64,
}

#[derive(Clone, Copy, Debug)]
pub enum JsaRef<'a> {
    Separable(&'a SeparableJsa),
    General(&'a GeneralJsa),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Ops {
    shift: bool,
    delay: bool,
    tau0: bool,
}

const BARE: Ops = Ops { shift: false, delay: false, tau0: false };
const SHIFTED: Ops = Ops { shift: true, delay: true, tau0: false };
const FIXED: Ops = Ops { shift: false, delay: false, tau0: true };
const BOTH: Ops = Ops { shift: true, delay: true, tau0: true };

#[derive(Clone, Copy, Debug, PartialEq)]
struct Term {
    coeff: f64,
    exchanged: bool,
    s: Ops,
    i: Ops,
}

impl Term {
    fn quadrature(&self) -> bool {
        self.s.shift
    }

    /// `(α_s, α_i, β)` of the phase `α_s ω_s + α_i ω_i + β`.
    fn phase(&self, tau: f64, tau0: f64, mu: f64) -> (f64, f64, f64) {
        let alpha = |o: Ops| if o.delay { tau } else { 0.0 } + if o.tau0 { tau0 } else { 0.0 };
        let beta = |o: Ops| if o.delay && o.shift { mu * tau } else { 0.0 };
        (alpha(self.s), alpha(self.i), beta(self.s) + beta(self.i))
    }
}

/// Amplitude terms grouped as `Σ_s c_s·Σ_i c_i` products of per-photon operations.
#[derive(Clone, Debug)]
struct Group {
    exchanged: bool,
    s: Vec<(f64, Ops)>,
    i: Vec<(f64, Ops)>,
}

/// Groups and the modulus prefactor of an interferometer.
fn groups(kind: InterferometerKind) -> (Vec<Group>, f64) {
    let g = |exchanged, s: &[(f64, Ops)], i: &[(f64, Ops)]| Group { exchanged, s: s.to_vec(), i: i.to_vec() };
    match kind {
        InterferometerKind::Hom => {
            let delayed = Ops { shift: false, delay: true, tau0: false };
            let shifted = Ops { shift: true, delay: false, tau0: false };
            (vec![g(true, &[(1.0, delayed)], &[(1.0, shifted)]), g(false, &[(-1.0, shifted)], &[(1.0, delayed)])], 0.25)
        }
        InterferometerKind::Noon => (
            vec![
                g(false, &[(1.0, SHIFTED), (1.0, BARE)], &[(1.0, SHIFTED), (1.0, BARE)]),
                g(true, &[(1.0, SHIFTED), (-1.0, BARE)], &[(1.0, SHIFTED), (-1.0, BARE)]),
            ],
            1.0 / 16.0,
        ),
        InterferometerKind::Combo { .. } => (
            vec![
                g(
                    false,
                    &[(1.0, BOTH), (1.0, FIXED), (1.0, SHIFTED), (-1.0, BARE)],
                    &[(1.0, BOTH), (-1.0, FIXED), (-1.0, SHIFTED), (-1.0, BARE)],
                ),
                g(
                    true,
                    &[(1.0, BOTH), (-1.0, SHIFTED), (1.0, FIXED), (1.0, BARE)],
                    &[(1.0, BOTH), (1.0, SHIFTED), (-1.0, FIXED), (1.0, BARE)],
                ),
            ],
            1.0 / 64.0,
        ),
    }
}

/// Fully expanded amplitude terms.
fn terms(kind: InterferometerKind) -> (Vec<Term>, f64) {
    let (groups, prefactor) = groups(kind);
    let mut out = Vec::new();
    for g in groups {
        for &(cs, os) in &g.s {
            for &(ci, oi) in &g.i {
                out.push(Term { coeff: cs * ci, exchanged: g.exchanged, s: os, i: oi });
            }
        }
    }
    (out, prefactor)
}

fn shift_axis0(a: &Array2<Complex64>, spacing: f64, shift: f64) -> Array2<Complex64> {
    let mut out = Array2::zeros(a.dim());
    for (k, col) in a.columns().into_iter().enumerate() {
        let v: Vec<Complex64> = col.iter().copied().collect();
        for (j, x) in shift_samples(&v, spacing, shift).into_iter().enumerate() {
            out[(j, k)] = x;
        }
    }
    out
}

fn shift_axis1(a: &Array2<Complex64>, spacing: f64, shift: f64) -> Array2<Complex64> {
    let mut out = Array2::zeros(a.dim());
    for (j, row) in a.rows().into_iter().enumerate() {
        let v: Vec<Complex64> = row.iter().copied().collect();
        for (k, x) in shift_samples(&v, spacing, shift).into_iter().enumerate() {
            out[(j, k)] = x;
        }
    }
    out
}

/// One shift pattern of a group: `U(ω_s)·V(ω_i)·f_shifted(ω_s, ω_i)`.
struct Block {
    key: usize,
    exchanged: bool,
    s: Vec<(f64, Ops)>,
    i: Vec<(f64, Ops)>,
}

fn blocks(groups: &[Group]) -> Vec<Block> {
    let mut out = Vec::new();
    for g in groups {
        for a in [false, true] {
            for b in [false, true] {
                let s: Vec<_> = g.s.iter().copied().filter(|(_, o)| o.shift == a).collect();
                let i: Vec<_> = g.i.iter().copied().filter(|(_, o)| o.shift == b).collect();
                if !s.is_empty() && !i.is_empty() {
                    let key = (g.exchanged as usize) * 4 + (a as usize) * 2 + b as usize;
                    out.push(Block { key, exchanged: g.exchanged, s, i });
                }
            }
        }
    }
    out
}

/// Brute-force double integral for one `μ`; evaluates any `(τ, τ₀, φ)`.
pub struct OracleColumn {
    blocks: Vec<Block>,
    prefactor: f64,
    mu: f64,
    carrier: f64,
    offsets: Vec<f64>,
    weights: Vec<f64>,
    /// Shifted arrays indexed by `exchanged·4 + a·2 + b`.
    arrays: Vec<Option<Array2<Complex64>>>,
}

impl OracleColumn {
    pub fn new(jsa: &GeneralJsa, kind: InterferometerKind, mu: f64) -> Result<Self> {
        if !jsa.is_square() {
            return Err(Error::GridMismatch("oracles need identical signal and idler grids".into()));
        }
        let (groups, prefactor) = groups(kind);
        let blocks = blocks(&groups);
        let grid = *jsa.grid_s();
        let h = grid.spacing();
        let base = jsa.values();
        let transposed = base.t().to_owned();
        let mut arrays: Vec<Option<Array2<Complex64>>> = vec![None; 8];
        for blk in &blocks {
            let key = blk.key;
            let mut a = if blk.exchanged { transposed.clone() } else { base.clone() };
            if key & 2 != 0 {
                a = shift_axis0(&a, h, mu);
            }
            if key & 1 != 0 {
                a = shift_axis1(&a, h, mu);
            }
            let kept = a.iter().map(|v| v.norm_sqr()).sum::<f64>() * h * h;
            let leakage = 1.0 - kept / jsa.norm_sqr();
            if leakage > SHIFT_LEAKAGE_TOLERANCE {
                return Err(Error::OffGrid { shift: mu, leakage, required_span: grid.span() + 2.0 * mu.abs() });
            }
            arrays[key] = Some(a);
        }
        Ok(Self {
            blocks,
            prefactor,
            mu,
            carrier: grid.carrier(),
            offsets: grid.positions(),
            weights: quadrature_weights(grid.count(), h),
            arrays,
        })
    }

    /// `Σ c·e^{iq}·e^{-i(αω + β)}` over one photon's operations.
    fn photon_factor(&self, ops: &[(f64, Ops)], tau: f64, tau0: f64, phi: Option<f64>) -> Vec<Complex64> {
        let prepared: Vec<(Complex64, f64)> = ops
            .iter()
            .map(|&(c, o)| {
                let alpha = if o.delay { tau } else { 0.0 } + if o.tau0 { tau0 } else { 0.0 };
                let beta = if o.delay && o.shift { self.mu * tau } else { 0.0 };
                let q = match phi {
                    Some(p) if o.shift => p,
                    _ => 0.0,
                };
                (Complex64::from_polar(c, q - beta - alpha * self.carrier), alpha)
            })
            .collect();
        self.offsets
            .iter()
            .map(|x| prepared.iter().map(|(c, alpha)| c * Complex64::cis(-alpha * x)).sum())
            .collect()
    }

    pub fn eval(&self, tau: f64, tau0: f64, phi: f64) -> f64 {
        let n = self.offsets.len();
        let mut amp = vec![Complex64::new(0.0, 0.0); n * n];
        for blk in &self.blocks {
            let u = self.photon_factor(&blk.s, tau, tau0, Some(phi));
            let v = self.photon_factor(&blk.i, tau, tau0, None);
            let a = self.arrays[blk.key].as_ref().expect("array prepared for every block");
            for (j, row) in a.rows().into_iter().enumerate() {
                let out = &mut amp[j * n..(j + 1) * n];
                let uj = u[j];
                for ((o, x), vk) in out.iter_mut().zip(row.iter()).zip(&v) {
                    *o += uj * vk * x;
                }
            }
        }
        let mut total = 0.0;
        for (j, wj) in self.weights.iter().enumerate() {
            let row = &amp[j * n..(j + 1) * n];
            let mut acc = 0.0;
            for (x, wk) in row.iter().zip(&self.weights) {
                acc += x.norm_sqr() * wk;
            }
            total += acc * wj;
        }
        self.prefactor * total
    }
}

/// Sums the coefficients of terms with identical operations.
fn merge(terms: Vec<Term>) -> Vec<Term> {
    let mut out: Vec<Term> = Vec::new();
    for t in terms {
        match out.iter_mut().find(|o| o.exchanged == t.exchanged && o.s == t.s && o.i == t.i) {
            Some(o) => o.coeff += t.coeff,
            None => out.push(t),
        }
    }
    out.retain(|t| t.coeff != 0.0);
    out
}

/// `∫ f*(x) f(x + d) e^{-ikx} dx` for `d = idx·μ/2`, `idx ∈ -2..=2`.
struct PairSums {
    sums: Vec<PhasedSum>,
}

impl PairSums {
    fn new(f: &SpectralFunction, mu: f64) -> Self {
        let sums = (-2..=2)
            .map(|idx| {
                let shifted = f.shifted(0.5 * mu * idx as f64);
                let product = f.values().iter().zip(&shifted).map(|(a, b)| a.conj() * b).collect();
                PhasedSum::new(product, f)
            })
            .collect();
        Self { sums }
    }

    fn eval(&self, idx: i32, k: f64) -> Complex64 {
        self.sums[(idx + 2) as usize].eval(k)
    }
}

/// Exact separable reduction of the oracle for one `μ`.
pub struct ExactColumn {
    terms: Vec<Term>,
    prefactor: f64,
    parity: f64,
    mu: f64,
    carrier: f64,
    plus: PairSums,
    minus: PairSums,
}

impl ExactColumn {
    pub fn new(jsa: &SeparableJsa, kind: InterferometerKind, mu: f64) -> Result<Self> {
        let (terms, prefactor) = terms(kind);
        let check = |f: &SpectralFunction| {
            if mu.abs() > f.grid().span() {
                Err(Error::OffGrid { shift: mu, leakage: 1.0, required_span: mu.abs() })
            } else {
                Ok(())
            }
        };
        check(jsa.pump())?;
        check(jsa.phasematch())?;
        Ok(Self {
            terms: merge(terms),
            prefactor,
            parity: jsa.parity(),
            mu,
            carrier: jsa.pump().grid().carrier(),
            plus: PairSums::new(jsa.pump(), mu),
            minus: PairSums::new(jsa.phasematch(), mu),
        })
    }

    pub fn eval(&self, tau: f64, tau0: f64, phi: f64) -> f64 {
        struct Prepared {
            c: Complex64,
            a: f64,
            b: f64,
            u: i32,
            v: i32,
        }
        let prepared: Vec<Prepared> = self
            .terms
            .iter()
            .map(|t| {
                let (alpha_s, alpha_i, beta) = t.phase(tau, tau0, self.mu);
                let q = if t.quadrature() { phi } else { 0.0 };
                let sign = if t.exchanged { self.parity } else { 1.0 };
                Prepared {
                    c: Complex64::from_polar(t.coeff * sign, q - beta),
                    a: alpha_s + alpha_i,
                    b: alpha_s - alpha_i,
                    u: t.s.shift as i32 + t.i.shift as i32,
                    v: t.s.shift as i32 - t.i.shift as i32,
                }
            })
            .collect();
        let half_mu = 0.5 * self.mu;
        let overlap = |j: &Prepared, k: &Prepared| -> Complex64 {
            let da = k.a - j.a;
            let db = k.b - j.b;
            let ip = Complex64::cis(-da * self.carrier + da * half_mu * j.u as f64) * self.plus.eval(k.u - j.u, da);
            let im = Complex64::cis(db * half_mu * j.v as f64) * self.minus.eval(k.v - j.v, db);
            j.c.conj() * k.c * ip * im
        };
        let mut total = 0.0;
        for (n, j) in prepared.iter().enumerate() {
            total += overlap(j, j).re;
            for k in &prepared[n + 1..] {
                total += 2.0 * overlap(j, k).re;
            }
        }
        self.prefactor * total
    }
}

fn lobe_sigma(jsa: &SeparableJsa) -> f64 {
    match jsa.symmetry() {
        SymmetryClass::Antisymmetric => jsa.phasematch().rms_width(),
        _ => jsa.pump().rms_width(),
    }
}

fn check_far(jsa: &SeparableJsa, tau0: f64) -> Result<()> {
    let sigma = lobe_sigma(jsa);
    if sigma * tau0.abs() < FAR_REGIME_PRODUCT * (1.0 - 1e-9) {
        return Err(Error::FarRegime { required_tau0: FAR_REGIME_PRODUCT / sigma });
    }
    Ok(())
}

/// The four complex interference terms of the far-delay combination form.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FarComponents {
    /// `Φ₊(τ)`.
    pub center_plus: Complex64,
    /// `K(τ)`.
    pub center_minus: Complex64,
    /// Lobe around `τ = +τ₀`.
    pub lobe_late: Complex64,
    /// Lobe around `τ = −τ₀`.
    pub lobe_early: Complex64,
}

/// Closed forms for one `μ`.
enum ClosedColumn {
    Hom(WignerColumn),
    NoonSymmetric(StftColumn),
    NoonAntisymmetric(StftColumn),
    ComboFar { plus: StftColumn, minus: StftColumn, symmetric: bool, mu: f64 },
    Exact(ExactColumn),
}

fn far_components(plus: &StftColumn, minus: &StftColumn, symmetric: bool, mu: f64, tau0: f64, tau: f64) -> FarComponents {
    let center_plus = plus.phased_plus(tau);
    let center_minus = minus.centered_minus(tau);
    if symmetric {
        FarComponents {
            center_plus,
            center_minus,
            lobe_late: Complex64::cis(2.0 * mu * tau0) * plus.phased_plus(tau - tau0),
            lobe_early: Complex64::cis(-2.0 * mu * tau0) * plus.phased_plus(tau + tau0),
        }
    } else {
        FarComponents {
            center_plus,
            center_minus,
            lobe_late: minus.centered_minus(tau - tau0),
            lobe_early: minus.centered_minus(tau + tau0),
        }
    }
}

fn quad(phi: f64, z: Complex64) -> f64 {
    (Complex64::cis(-phi) * z).re
}

impl ClosedColumn {
    fn eval(&self, tau: f64, tau0: f64, phi: f64) -> f64 {
        match self {
            Self::Hom(w) => 0.5 * (1.0 - quad(phi, w.eval(tau))),
            Self::NoonSymmetric(s) => 0.5 * (1.0 + quad(phi, s.phased_plus(tau))),
            Self::NoonAntisymmetric(s) => 0.5 * (1.0 + quad(phi, s.centered_minus(tau))),
            Self::ComboFar { plus, minus, symmetric, mu } => {
                let c = far_components(plus, minus, *symmetric, *mu, tau0, tau);
                let sign = if *symmetric { -1.0 } else { 1.0 };
                0.5 * (1.0
                    + sign * 0.5 * (quad(phi, c.center_plus) + quad(phi, c.center_minus))
                    + 0.25 * (quad(phi, c.lobe_late) + quad(phi, c.lobe_early)))
            }
            Self::Exact(e) => e.eval(tau, tau0, phi),
        }
    }
}

fn closed_column(jsa: &SeparableJsa, kind: InterferometerKind, provenance: Provenance, mu: f64) -> Result<ClosedColumn> {
    Ok(match (kind, provenance) {
        (InterferometerKind::Hom, _) => ClosedColumn::Hom(WignerColumn::new(jsa.phasematch(), 0.5 * mu)?),
        (InterferometerKind::Noon, _) => match jsa.symmetry() {
            SymmetryClass::Symmetric => ClosedColumn::NoonSymmetric(StftColumn::new(jsa.pump(), mu)?),
            SymmetryClass::Antisymmetric => ClosedColumn::NoonAntisymmetric(StftColumn::new(jsa.phasematch(), mu)?),
            SymmetryClass::Anyonic => return Err(Error::NoClosedForm),
        },
        (InterferometerKind::Combo { tau0 }, Provenance::ClosedFar) => {
            check_far(jsa, tau0)?;
            ClosedColumn::ComboFar {
                plus: StftColumn::new(jsa.pump(), mu)?,
                minus: StftColumn::new(jsa.phasematch(), mu)?,
                symmetric: jsa.symmetry() == SymmetryClass::Symmetric,
                mu,
            }
        }
        (InterferometerKind::Combo { .. }, _) => ClosedColumn::Exact(ExactColumn::new(jsa, kind, mu)?),
    })
}

pub fn hom_oracle(jsa: &GeneralJsa, tau: f64, mu: f64, phi: f64) -> Result<f64> {
    Ok(OracleColumn::new(jsa, InterferometerKind::Hom, mu)?.eval(tau, 0.0, phi))
}

pub fn noon_oracle(jsa: &GeneralJsa, tau: f64, mu: f64, phi: f64) -> Result<f64> {
    Ok(OracleColumn::new(jsa, InterferometerKind::Noon, mu)?.eval(tau, 0.0, phi))
}

pub fn combo_oracle(jsa: &GeneralJsa, tau0: f64, tau: f64, mu: f64, phi: f64) -> Result<f64> {
    Ok(OracleColumn::new(jsa, InterferometerKind::Combo { tau0 }, mu)?.eval(tau, tau0, phi))
}

pub fn hom_closed(jsa: &SeparableJsa, tau: f64, mu: f64, phi: f64) -> Result<f64> {
    Ok(closed_column(jsa, InterferometerKind::Hom, Provenance::ClosedExact, mu)?.eval(tau, 0.0, phi))
}

pub fn noon_closed(jsa: &SeparableJsa, tau: f64, mu: f64, phi: f64) -> Result<f64> {
    Ok(closed_column(jsa, InterferometerKind::Noon, Provenance::ClosedExact, mu)?.eval(tau, 0.0, phi))
}

pub fn combo_closed_exact(jsa: &SeparableJsa, tau0: f64, tau: f64, mu: f64, phi: f64) -> Result<f64> {
    Ok(ExactColumn::new(jsa, InterferometerKind::Combo { tau0 }, mu)?.eval(tau, tau0, phi))
}

pub fn combo_closed_far(jsa: &SeparableJsa, tau0: f64, tau: f64, mu: f64, phi: f64) -> Result<f64> {
    let kind = InterferometerKind::Combo { tau0 };
    Ok(closed_column(jsa, kind, Provenance::ClosedFar, mu)?.eval(tau, tau0, phi))
}

/// The far-form interference terms without the far-regime precondition.
pub fn combo_far_components(jsa: &SeparableJsa, tau0: f64, tau: f64, mu: f64) -> Result<FarComponents> {
    let plus = StftColumn::new(jsa.pump(), mu)?;
    let minus = StftColumn::new(jsa.phasematch(), mu)?;
    Ok(far_components(&plus, &minus, jsa.symmetry() == SymmetryClass::Symmetric, mu, tau0, tau))
}

/// Exact separable reduction of any interferometer, for cross-checks.
pub fn exact_closed(jsa: &SeparableJsa, kind: InterferometerKind, tau: f64, mu: f64, phi: f64) -> Result<f64> {
    Ok(ExactColumn::new(jsa, kind, mu)?.eval(tau, kind.tau0(), phi))
}

enum Column {
    Oracle(OracleColumn),
    Closed(ClosedColumn),
}

impl Column {
    fn eval(&self, tau: f64, tau0: f64, phi: f64) -> f64 {
        match self {
            Self::Oracle(o) => o.eval(tau, tau0, phi),
            Self::Closed(c) => c.eval(tau, tau0, phi),
        }
    }
}

/// Seed of the noise stream at lattice point `(j, k)`.
pub fn point_seed(seed: u64, j: usize, k: usize) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    mix(mix(mix(seed) ^ j as u64) ^ k as u64)
}

/// Two-detector Poisson estimate of `r` from `pairs` emitted pairs.
pub fn poisson_estimate(r: f64, pairs: u64, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r = r.clamp(0.0, 1.0);
    let mut draw = |mean: f64| -> f64 {
        if mean > 0.0 {
            Poisson::new(mean).expect("positive finite mean").sample(&mut rng)
        } else {
            0.0
        }
    };
    let c1 = draw(pairs as f64 * r);
    let c2 = draw(pairs as f64 * (1.0 - r));
    if c1 + c2 > 0.0 {
        c1 / (c1 + c2)
    } else {
        0.5
    }
}

pub fn run_scan(config: &ScanConfig, jsa: JsaRef<'_>, provenance: Provenance) -> Result<CoincidenceScan> {
    run_scan_with(config, jsa, provenance, Execution::default())
}

/// [`run_scan`] with an explicit execution strategy.
pub fn run_scan_with(config: &ScanConfig, jsa: JsaRef<'_>, provenance: Provenance, execution: Execution) -> Result<CoincidenceScan> {
    config.validate()?;
    let kind = config.kind;
    if provenance == Provenance::ClosedFar && !matches!(kind, InterferometerKind::Combo { .. }) {
        return Err(Error::InvalidParameter("the far-delay form exists only for the combination interferometer".into()));
    }
    let (symmetry, general, separable, carrier) = match jsa {
        JsaRef::Separable(s) => (s.symmetry(), None, Some(s), s.pump().grid().carrier()),
        JsaRef::General(g) => (classify_symmetry(g)?.0, Some(g), None, 0.5 * (g.grid_s().carrier() + g.grid_i().carrier())),
    };
    match (provenance, separable) {
        (Provenance::Oracle, _) if general.is_none() => return Err(Error::WrongJsaForm("the oracle", "general")),
        (Provenance::ClosedExact | Provenance::ClosedFar, None) => {
            return Err(if symmetry == SymmetryClass::Anyonic {
                Error::NoClosedForm
            } else {
                Error::WrongJsaForm("closed forms", "separable")
            })
        }
        (Provenance::ClosedFar, Some(s)) => check_far(s, kind.tau0())?,
        _ => {}
    }
    let taus = config.tau_grid.positions();
    let tau0 = kind.tau0();
    let phi = config.arm_phase;
    let columns = map_collect(config.mu_grid.positions(), execution, |mu| {
        let column = match (general, separable) {
            (Some(g), _) if provenance == Provenance::Oracle => Column::Oracle(OracleColumn::new(g, kind, mu)?),
            (_, Some(s)) => Column::Closed(closed_column(s, kind, provenance, mu)?),
            _ => unreachable!("jsa form validated above"),
        };
        Ok(taus.iter().map(|&t| column.eval(t, tau0, phi)).collect::<Vec<f64>>())
    })?;
    let mut values = Array2::from_shape_fn((taus.len(), columns.len()), |(j, k)| columns[k][j]);
    if let NoiseSpec::Poisson { pairs, seed } = config.noise {
        for ((j, k), r) in values.indexed_iter_mut() {
            *r = poisson_estimate(*r, pairs, point_seed(seed, j, k));
        }
    }
    Ok(CoincidenceScan { config: *config, values, provenance, symmetry, carrier })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn term_counts_and_prefactors_balance() {
        for kind in [InterferometerKind::Hom, InterferometerKind::Noon, InterferometerKind::Combo { tau0: 1.0 }] {
            let (t, p) = terms(kind);
            let sq: f64 = t.iter().map(|t| t.coeff * t.coeff).sum();
            assert_eq!(p * sq, 0.5, "{kind:?}");
        }
    }

    #[test]
    fn poisson_estimate_is_seeded() {
        let a = poisson_estimate(0.3, 1000, 7);
        assert_eq!(a, poisson_estimate(0.3, 1000, 7));
        assert_ne!(point_seed(1, 2, 3), point_seed(1, 3, 2));
        assert_eq!(poisson_estimate(0.0, 10, 1), 0.0);
        assert_eq!(poisson_estimate(1.0, 10, 1), 1.0);
    }

    #[test]
    fn arm_phase_range_is_validated() {
        let g = DelayGrid::centered(3, 1.0).unwrap();
        let cfg = ScanConfig { kind: InterferometerKind::Hom, tau_grid: g, mu_grid: g, arm_phase: 7.0, noise: NoiseSpec::None };
        assert!(cfg.validate().is_err());
    }
}
