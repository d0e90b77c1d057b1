//! TOML run configuration and source resolution.

use std::path::{Path, PathBuf};

use biphoton_core::interferometers::{InterferometerKind, NoiseSpec, Provenance, ScanConfig};
use biphoton_core::jsa::{
    factorize_separable, make_gaussian, make_hermite_gauss, make_sinc, product_to_general, symmetrize, to_general,
    GeneralJsa, SeparableJsa, SpectralFunction, SymmetryClass,
};
use biphoton_core::math::{DelayGrid, FrequencyGrid};
use biphoton_core::tomography::AnchorPolicy;
use biphoton_core::{Complex64, Error as CoreError};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Base seed of the noise streams.
    #[serde(default)]
    pub seed: u64,
    pub source: SourceConfig,
    pub interferometer: InterferometerConfig,
    pub grids: GridsConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<NoiseConfig>,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub reconstruct: ReconstructConfig,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pump: Option<SpectrumConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phasematch: Option<SpectrumConfig>,
    /// JSON-encoded general JSA, relative to the config file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symmetrize: Option<Exchange>,
    /// Square `(ω_s, ω_i)` grid for oracles and non-separable sources.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle_grid: Option<SquareGridConfig>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Exchange {
    Symmetric,
    Antisymmetric,
}

impl Exchange {
    pub fn sign(&self) -> f64 {
        match self {
            Self::Symmetric => 1.0,
            Self::Antisymmetric => -1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumConfig {
    pub count: usize,
    pub half_span: f64,
    #[serde(default)]
    pub carrier: f64,
    pub shape: Shape,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Shape {
    Gaussian {
        sigma: f64,
        #[serde(default)]
        chirp: f64,
        #[serde(default)]
        center: f64,
    },
    HermiteGauss {
        order: u32,
        sigma: f64,
    },
    Sinc {
        bandwidth: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SquareGridConfig {
    pub count: usize,
    pub half_span: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KindName {
    Hom,
    Noon,
    Combo,
}

fn default_phases() -> Vec<f64> {
    vec![0.0, std::f64::consts::FRAC_PI_2]
}

fn default_provenance() -> Provenance {
    Provenance::ClosedExact
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterferometerConfig {
    pub kind: KindName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau0: Option<f64>,
    #[serde(default = "default_phases")]
    pub phases: Vec<f64>,
    #[serde(default = "default_provenance")]
    pub provenance: Provenance,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridsConfig {
    pub tau: AxisConfig,
    pub mu: AxisConfig,
}

/// A zero-centered delay or shift axis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisConfig {
    pub count: usize,
    pub spacing: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    pub pairs: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReconstructConfig {
    #[serde(default)]
    pub anchor: AnchorPolicy,
}

/// Command-line values that take precedence over the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub provenance: Option<Provenance>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Reads a config and resolves `source.file` against the config's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let mut config = Self::from_toml(&text)?;
        if let Some(file) = &config.source.file {
            if file.is_relative() {
                let base = path.parent().unwrap_or(Path::new("."));
                config.source.file = Some(base.join(file));
            }
        }
        Ok(config)
    }

    pub fn apply(&mut self, overrides: &Overrides) {
        if let Some(out) = &overrides.out {
            self.output.dir = Some(out.clone());
        }
        if let Some(p) = overrides.provenance {
            self.interferometer.provenance = p;
        }
        if let Some(seed) = overrides.seed {
            self.seed = seed;
        }
    }

    pub fn kind(&self) -> Result<InterferometerKind> {
        let i = &self.interferometer;
        match (i.kind, i.tau0) {
            (KindName::Hom, None) => Ok(InterferometerKind::Hom),
            (KindName::Noon, None) => Ok(InterferometerKind::Noon),
            (KindName::Combo, Some(tau0)) => Ok(InterferometerKind::Combo { tau0 }),
            (KindName::Combo, None) => Err(CliError::Config("interferometer.tau0 is required for the combination interferometer".into())),
            (_, Some(_)) => Err(CliError::Config("interferometer.tau0 applies only to kind = \"combo\"".into())),
        }
    }

    pub fn tau_axis(&self) -> Result<DelayGrid> {
        axis(&self.grids.tau, "grids.tau")
    }

    pub fn mu_axis(&self) -> Result<DelayGrid> {
        axis(&self.grids.mu, "grids.mu")
    }

    /// One scan configuration per entry of `interferometer.phases`.
    pub fn scan_configs(&self) -> Result<Vec<ScanConfig>> {
        let kind = self.kind()?;
        let (tau_grid, mu_grid) = (self.tau_axis()?, self.mu_axis()?);
        if self.interferometer.phases.is_empty() {
            return Err(CliError::Config("interferometer.phases must list at least one arm phase".into()));
        }
        self.interferometer
            .phases
            .iter()
            .enumerate()
            .map(|(i, &arm_phase)| {
                let noise = match &self.noise {
                    Some(n) => NoiseSpec::Poisson { pairs: n.pairs, seed: phase_seed(self.seed, i) },
                    None => NoiseSpec::None,
                };
                let cfg = ScanConfig { kind, tau_grid, mu_grid, arm_phase, noise };
                cfg.validate().map_err(|e| CliError::Config(format!("interferometer.phases[{i}]: {e}")))?;
                Ok(cfg)
            })
            .collect()
    }
}

/// Seed of the scan at position `index` of the phase list.
pub fn phase_seed(seed: u64, index: usize) -> u64 {
    biphoton_core::interferometers::point_seed(seed, index, usize::MAX)
}

fn axis(a: &AxisConfig, name: &str) -> Result<DelayGrid> {
    DelayGrid::centered(a.count, a.spacing).map_err(|e| CliError::Config(format!("{name}: {e}")))
}

fn spectrum(c: &SpectrumConfig, name: &str) -> Result<SpectralFunction> {
    let tag = |e: CoreError| CliError::Config(format!("source.{name}: {e}"));
    let grid = FrequencyGrid::with_half_span(c.count, c.half_span, c.carrier).map_err(tag)?;
    match c.shape {
        Shape::Gaussian { sigma, chirp, center } => make_gaussian(grid, center, sigma, chirp),
        Shape::HermiteGauss { order, sigma } => make_hermite_gauss(grid, order, sigma),
        Shape::Sinc { bandwidth } => make_sinc(grid, bandwidth),
    }
    .map_err(tag)
}

/// A resolved source in the form the requested provenance needs.
#[derive(Clone, Debug)]
pub enum SourceJsa {
    Separable(SeparableJsa),
    General(GeneralJsa),
}

#[derive(Clone, Debug)]
pub struct Source {
    pub jsa: SourceJsa,
    pub symmetry: SymmetryClass,
    pub truth_plus: Option<SpectralFunction>,
    pub truth_minus: Option<SpectralFunction>,
    /// Steps applied to the configured source, in order.
    pub route: Vec<String>,
}

impl Source {
    pub fn as_ref(&self) -> biphoton_core::interferometers::JsaRef<'_> {
        match &self.jsa {
            SourceJsa::Separable(s) => biphoton_core::interferometers::JsaRef::Separable(s),
            SourceJsa::General(g) => biphoton_core::interferometers::JsaRef::General(g),
        }
    }
}

fn square_grid(cfg: &SourceConfig, carrier: f64, why: &str) -> Result<FrequencyGrid> {
    let g = cfg
        .oracle_grid
        .as_ref()
        .ok_or_else(|| CliError::Config(format!("source.oracle_grid is required {why}")))?;
    FrequencyGrid::with_half_span(g.count, g.half_span, carrier).map_err(|e| CliError::Config(format!("source.oracle_grid: {e}")))
}

fn reflected_mix(f: &SpectralFunction, sign: f64) -> Result<SpectralFunction> {
    let r = f.reflected();
    let values: Vec<Complex64> = f.values().iter().zip(r.values()).map(|(a, b)| a + sign * b).collect();
    Ok(SpectralFunction::normalized(*f.grid(), values)?)
}

/// Builds the source and converts it to what `provenance` evaluates.
///
/// Oracles take the JSA sampled on `source.oracle_grid`. Closed forms take a
/// separable JSA, obtained by rank-1 factorization when the source is only
/// available as a 2D array.
pub fn resolve_source(cfg: &SourceConfig, provenance: Provenance) -> Result<Source> {
    let mut route = Vec::new();
    let mut truth_plus = None;
    let mut truth_minus = None;
    let mut jsa = match (&cfg.file, &cfg.pump, &cfg.phasematch) {
        (Some(path), None, None) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            let g: GeneralJsa = serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            let g = GeneralJsa::normalized(*g.grid_s(), *g.grid_i(), g.values().clone())?;
            route.push(format!("read {}", path.display()));
            SourceJsa::General(g)
        }
        (None, Some(p), Some(m)) => {
            let pump = spectrum(p, "pump")?;
            let pm = spectrum(m, "phasematch")?;
            truth_plus = Some(pump.clone());
            truth_minus = Some(pm.clone());
            match SeparableJsa::new(pump.clone(), pm.clone()) {
                Ok(s) => SourceJsa::Separable(s),
                Err(CoreError::NoDefiniteParity { .. }) => {
                    let grid = square_grid(cfg, pump.grid().carrier(), "for a phase-matching function without definite parity")?;
                    route.push("sampled product on the oracle grid".into());
                    SourceJsa::General(product_to_general(&pump, &pm, grid, grid)?.0)
                }
                Err(e) => return Err(CliError::Config(format!("source: {e}"))),
            }
        }
        _ => return Err(CliError::Config("source needs either `file` or both `pump` and `phasematch`".into())),
    };
    let to_grid = |s: &SeparableJsa, why: &str| -> Result<GeneralJsa> {
        let grid = square_grid(cfg, s.pump().grid().carrier(), why)?;
        Ok(to_general(s, grid, grid)?.0)
    };
    if let Some(exchange) = cfg.symmetrize {
        let general = match &jsa {
            SourceJsa::Separable(s) => to_grid(s, "to symmetrize the source")?,
            SourceJsa::General(g) => g.clone(),
        };
        route.push(format!("symmetrize({})", if exchange.sign() > 0.0 { '+' } else { '-' }));
        truth_minus = truth_minus.map(|m| reflected_mix(&m, exchange.sign())).transpose()?;
        jsa = SourceJsa::General(symmetrize(&general, exchange.sign())?);
    }
    jsa = match (jsa, provenance) {
        (SourceJsa::Separable(s), Provenance::Oracle) => {
            route.push("sampled on the oracle grid".into());
            SourceJsa::General(to_grid(&s, "for oracle provenance")?)
        }
        (SourceJsa::General(g), Provenance::ClosedExact | Provenance::ClosedFar) => {
            let (class, _) = biphoton_core::jsa::classify_symmetry(&g)?;
            if class == SymmetryClass::Anyonic {
                return Err(CliError::Core(CoreError::NoClosedForm));
            }
            let (s, residual) = factorize_separable(&g)?;
            route.push(format!("rank-1 factorization (residual {residual:.3e})"));
            if truth_plus.is_none() {
                truth_plus = Some(s.pump().clone());
                truth_minus = Some(s.phasematch().clone());
            }
            SourceJsa::Separable(s)
        }
        (other, _) => other,
    };
    let symmetry = match &jsa {
        SourceJsa::Separable(s) => s.symmetry(),
        SourceJsa::General(g) => biphoton_core::jsa::classify_symmetry(g)?.0,
    };
    Ok(Source { jsa, symmetry, truth_plus, truth_minus, route })
}
