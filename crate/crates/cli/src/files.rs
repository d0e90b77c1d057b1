//! Scan, report and plot-data files.
//!
//! Scan files are CSV with a `#` header. Numbers in CSV bodies use 17
//! significant digits, so every finite `f64` reads back bit for bit.
//!
//! ```text
//! # format: biphoton-scan/1
//! # header: {...}          producing command, seed, config echo
//! # scan: {...}            interferometer, grids, noise, provenance
//! tau_index,mu_index,tau,mu,r
//! ```

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use biphoton_core::interferometers::{CoincidenceScan, Provenance, ScanConfig};
use biphoton_core::jsa::{SpectralFunction, SymmetryClass};
use biphoton_core::math::UniformAxis;
use biphoton_core::tomography::{Anchor, ChirpFit, Method, Target};
use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::{CliError, Result};

pub const SCAN_FORMAT: &str = "biphoton-scan/1";
pub const REPORT_FORMAT: &str = "biphoton-report/1";
pub const SPECTRUM_COLUMNS: &str = "omega,re,im,abs,arg";
const SCAN_COLUMNS: &str = "tau_index,mu_index,tau,mu,r";

/// Everything needed to re-run the command that wrote a scan.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanHeader {
    pub command: String,
    pub seed: u64,
    pub phase_index: usize,
    /// The closed form or oracle that produced the values.
    pub form: String,
    pub route: Vec<String>,
    pub config: Option<RunConfig>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct ScanMeta {
    config: ScanConfig,
    provenance: Provenance,
    symmetry: SymmetryClass,
    carrier: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanFile {
    pub header: ScanHeader,
    pub scan: CoincidenceScan,
}

fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("plain data serializes")
}

impl ScanFile {
    pub fn to_text(&self) -> String {
        let s = &self.scan;
        let meta = ScanMeta { config: s.config, provenance: s.provenance, symmetry: s.symmetry, carrier: s.carrier };
        let mut out = String::new();
        writeln!(out, "# format: {SCAN_FORMAT}").unwrap();
        writeln!(out, "# provenance: {}", s.provenance.name()).unwrap();
        writeln!(out, "# form: {}", self.header.form).unwrap();
        writeln!(out, "# arm_phase: {:.16e}", s.config.arm_phase).unwrap();
        writeln!(out, "# seed: {}", self.header.seed).unwrap();
        writeln!(out, "# header: {}", json(&self.header)).unwrap();
        writeln!(out, "# scan: {}", json(&meta)).unwrap();
        writeln!(out, "{SCAN_COLUMNS}").unwrap();
        let (taus, mus) = (s.config.tau_grid.positions(), s.config.mu_grid.positions());
        for ((j, k), r) in s.values.indexed_iter() {
            writeln!(out, "{j},{k},{:.16e},{:.16e},{:.16e}", taus[j], mus[k], r).unwrap();
        }
        out
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let err = |line: usize, message: String| CliError::Format { path: path.to_path_buf(), line, message };
        let mut format = None;
        let mut header: Option<ScanHeader> = None;
        let mut meta: Option<ScanMeta> = None;
        let mut lines = text.lines().enumerate();
        for (n, line) in lines.by_ref() {
            let Some(rest) = line.strip_prefix("# ") else {
                if line != SCAN_COLUMNS {
                    return Err(err(n + 1, format!("expected column header `{SCAN_COLUMNS}`")));
                }
                break;
            };
            let (key, value) = rest.split_once(": ").ok_or_else(|| err(n + 1, "header lines are `# key: value`".into()))?;
            match key {
                "format" => format = Some(value.to_string()),
                "header" => header = Some(serde_json::from_str(value).map_err(|e| err(n + 1, e.to_string()))?),
                "scan" => meta = Some(serde_json::from_str(value).map_err(|e| err(n + 1, e.to_string()))?),
                _ => {}
            }
        }
        if format.as_deref() != Some(SCAN_FORMAT) {
            return Err(err(1, format!("not a {SCAN_FORMAT} file")));
        }
        let header = header.ok_or_else(|| err(0, "missing `header` line".into()))?;
        let meta = meta.ok_or_else(|| err(0, "missing `scan` line".into()))?;
        let dim = (meta.config.tau_grid.count(), meta.config.mu_grid.count());
        let mut values = Array2::from_elem(dim, f64::NAN);
        let mut seen = 0usize;
        for (n, line) in lines {
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 5 {
                return Err(err(n + 1, format!("expected 5 fields, found {}", fields.len())));
            }
            let index = |i: usize| fields[i].parse::<usize>().map_err(|e| err(n + 1, e.to_string()));
            let (j, k) = (index(0)?, index(1)?);
            let r: f64 = fields[4].parse().map_err(|e: std::num::ParseFloatError| err(n + 1, e.to_string()))?;
            let slot = values.get_mut((j, k)).ok_or_else(|| err(n + 1, format!("index ({j}, {k}) outside {dim:?}")))?;
            *slot = r;
            seen += 1;
        }
        if seen != dim.0 * dim.1 || values.iter().any(|v| v.is_nan()) {
            return Err(err(0, format!("expected {} samples, found {seen}", dim.0 * dim.1)));
        }
        let scan = CoincidenceScan { config: meta.config, values, provenance: meta.provenance, symmetry: meta.symmetry, carrier: meta.carrier };
        Ok(Self { header, scan })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text()).map_err(|e| CliError::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text, path)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComboDiagnostics {
    pub lobe_mismatch: f64,
    pub overlap_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportEntry {
    pub target: Target,
    pub method: Method,
    pub anchor: Anchor,
    pub fidelity: Option<f64>,
    /// Largest `|map − transform(estimate)|`.
    pub residual_max: f64,
    pub chirp: Option<ChirpFit>,
    pub estimate: SpectralFunction,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub format: String,
    pub command: String,
    pub seed: u64,
    pub provenance: Provenance,
    pub form: String,
    pub scans: Vec<PathBuf>,
    pub route: Vec<String>,
    pub config: Option<RunConfig>,
    pub combo: Option<ComboDiagnostics>,
    pub entries: Vec<ReportEntry>,
}

impl ReportFile {
    pub fn to_text(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain data serializes");
        s.push('\n');
        s
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text()).map_err(|e| CliError::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let report: Self = serde_json::from_str(&text).map_err(|e| CliError::Format { path: path.to_path_buf(), line: e.line(), message: e.to_string() })?;
        if report.format != REPORT_FORMAT {
            return Err(CliError::Format { path: path.to_path_buf(), line: 0, message: format!("not a {REPORT_FORMAT} file") });
        }
        Ok(report)
    }

    pub fn entry(&self, target: Target) -> Option<&ReportEntry> {
        self.entries.iter().find(|e| e.target == target)
    }
}

/// Plot columns `ω, Re f̂, Im f̂, |f̂|, arg f̂` with absolute `ω`.
pub fn spectrum_csv(entry: &ReportEntry) -> String {
    let f = &entry.estimate;
    let mut out = String::new();
    writeln!(out, "# target: {}", json(&entry.target).trim_matches('"')).unwrap();
    writeln!(out, "# method: {}", json(&entry.method).trim_matches('"')).unwrap();
    writeln!(out, "# anchor: {:.16e}", entry.anchor.offset).unwrap();
    if let Some(fid) = entry.fidelity {
        writeln!(out, "# fidelity: {fid:.16e}").unwrap();
    }
    writeln!(out, "{SPECTRUM_COLUMNS}").unwrap();
    for (w, v) in f.grid().positions().iter().zip(f.values()) {
        let omega = f.grid().carrier() + w;
        writeln!(out, "{omega:.16e},{:.16e},{:.16e},{:.16e},{:.16e}", v.re, v.im, v.norm(), v.arg()).unwrap();
    }
    out
}
