//! `simulate`, `reconstruct` and `pipeline`.

use std::path::{Path, PathBuf};

use biphoton_core::exec::Execution;
use biphoton_core::interferometers::{run_scan_with, InterferometerKind, NoiseSpec, Provenance, ScanConfig};
use biphoton_core::jsa::{SpectralFunction, SymmetryClass};
use biphoton_core::math::{DelayGrid, UniformAxis};
use biphoton_core::tomography::{
    assemble_complex_map, check_lattice, fit_chirp, reconstruct_combo, reconstruct_from_stft, reconstruct_from_wigner,
    AnchorPolicy, QuadraturePair, ReconstructionReport, Target,
};
use std::f64::consts::FRAC_PI_2;

use crate::config::{resolve_source, RunConfig, Source};
use crate::error::{CliError, Result};
use crate::files::{spectrum_csv, ComboDiagnostics, ReportEntry, ReportFile, ScanFile, ScanHeader, REPORT_FORMAT};

const PHASE_MATCH: f64 = 1e-12;
const CHIRP_FLOOR: f64 = 1e-3;

/// Name of the expression behind a scan, recorded in file headers.
pub fn form_name(kind: InterferometerKind, symmetry: SymmetryClass, provenance: Provenance) -> &'static str {
    use InterferometerKind::*;
    use SymmetryClass::*;
    match (provenance, kind, symmetry) {
        (Provenance::Oracle, Hom, _) => "HOM double integral over (ω_s, ω_i)",
        (Provenance::Oracle, Noon, _) => "N00N double integral over (ω_s, ω_i)",
        (Provenance::Oracle, Combo { .. }, _) => "combination double integral over (ω_s, ω_i)",
        (_, Hom, _) => "HOM: ½(1 − Re[e^{-iφ} W₋(τ, μ/2)])",
        (_, Noon, Symmetric) => "N00N symmetric: ½(1 + Re[e^{-iφ} e^{iμτ} stft_plus(f₊, μ, τ)])",
        (_, Noon, _) => "N00N antisymmetric: ½(1 + Re[e^{-iφ} K(τ)]), K(t) = ∫f₋(x+μ/2)f₋*(x−μ/2)e^{-2ixt}dx",
        (Provenance::ClosedFar, Combo { .. }, Symmetric) => "combination far-delay form, symmetric lobes in f₊",
        (Provenance::ClosedFar, Combo { .. }, _) => "combination far-delay form, antisymmetric lobes in f₋",
        (_, Combo { .. }, _) => "combination exact separable reduction (term-pair sum)",
    }
}

/// A validated run: the source is built and every scan is known to succeed.
#[derive(Clone, Debug)]
pub struct Plan {
    pub config: RunConfig,
    pub source: Source,
    pub scans: Vec<ScanConfig>,
    pub out: PathBuf,
}

fn probe(scan: &ScanConfig) -> Result<ScanConfig> {
    let reach = |g: &DelayGrid| g.offset(g.count() - 1).max(g.offset(0).abs()).max(f64::MIN_POSITIVE);
    Ok(ScanConfig {
        tau_grid: DelayGrid::new(3, reach(&scan.tau_grid), scan.tau_grid.center())?,
        mu_grid: DelayGrid::new(3, reach(&scan.mu_grid), scan.mu_grid.center())?,
        noise: NoiseSpec::None,
        ..*scan
    })
}

fn quadrature_indices(config: &RunConfig) -> Result<(usize, usize)> {
    let phases = &config.interferometer.phases;
    let find = |target: f64| phases.iter().position(|p| (p - target).abs() <= PHASE_MATCH);
    match (find(0.0), find(FRAC_PI_2)) {
        (Some(a), Some(b)) => Ok((a, b)),
        _ => Err(CliError::Config("reconstruction needs interferometer.phases to contain 0 and π/2 (1.5707963267948966)".into())),
    }
}

/// Validates a config completely before any file is written.
pub fn plan(config: &RunConfig, reconstruct: bool) -> Result<Plan> {
    let provenance = config.interferometer.provenance;
    let scans = config.scan_configs()?;
    let source = resolve_source(&config.source, provenance)?;
    let kind = config.kind()?;
    if reconstruct {
        quadrature_indices(config)?;
        check_lattice(kind, source.symmetry, &scans[0].tau_grid, &scans[0].mu_grid)?;
    }
    run_scan_with(&probe(&scans[0])?, source.as_ref(), provenance, Execution::Serial)?;
    let out = config.output.dir.clone().unwrap_or_else(|| PathBuf::from("out"));
    Ok(Plan { config: config.clone(), source, scans, out })
}

pub fn scan_file_name(kind: InterferometerKind, index: usize) -> String {
    format!("scan_{}_{index}.csv", kind.name())
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

/// Runs every scan of a plan and writes one file per arm phase.
pub fn simulate_plan(plan: &Plan, command: &str, execution: Execution) -> Result<Vec<(PathBuf, ScanFile)>> {
    let provenance = plan.config.interferometer.provenance;
    let kind = plan.config.kind()?;
    let mut files = Vec::new();
    for (i, cfg) in plan.scans.iter().enumerate() {
        let scan = run_scan_with(cfg, plan.source.as_ref(), provenance, execution)?;
        let header = ScanHeader {
            command: command.to_string(),
            seed: plan.config.seed,
            phase_index: i,
            form: form_name(kind, scan.symmetry, provenance).to_string(),
            route: plan.source.route.clone(),
            config: Some(plan.config.clone()),
        };
        files.push((plan.out.join(scan_file_name(kind, i)), ScanFile { header, scan }));
    }
    create_dir(&plan.out)?;
    for (path, file) in &files {
        file.write(path)?;
    }
    Ok(files)
}

pub fn simulate(config: &RunConfig) -> Result<Vec<(PathBuf, ScanFile)>> {
    let plan = plan(config, false)?;
    simulate_plan(&plan, "simulate", Execution::default())
}

fn entry(report: ReconstructionReport, truth: Option<&SpectralFunction>) -> Result<ReportEntry> {
    let report = match truth {
        Some(t) => report.with_truth(t)?,
        None => report,
    };
    Ok(ReportEntry {
        target: report.target,
        method: report.method,
        anchor: report.anchor,
        fidelity: report.fidelity,
        residual_max: report.residual_map.iter().copied().fold(0.0, f64::max),
        chirp: fit_chirp(&report.estimate, CHIRP_FLOOR).ok(),
        estimate: report.estimate,
    })
}

/// Reconstructions of one quadrature pair, with fidelities when truths are given.
pub fn reconstruct_pair(
    pair: &QuadraturePair,
    policy: AnchorPolicy,
    truth_plus: Option<&SpectralFunction>,
    truth_minus: Option<&SpectralFunction>,
) -> Result<(Vec<ReportEntry>, Option<ComboDiagnostics>)> {
    let truth = |t: Target| match t {
        Target::FPlus => truth_plus,
        Target::FMinus => truth_minus,
    };
    match pair.scan_re().config.kind {
        InterferometerKind::Hom => {
            let r = reconstruct_from_wigner(&assemble_complex_map(pair)?, policy)?;
            let t = truth(r.target);
            Ok((vec![entry(r, t)?], None))
        }
        InterferometerKind::Noon => {
            let r = reconstruct_from_stft(&assemble_complex_map(pair)?, policy)?;
            let t = truth(r.target);
            Ok((vec![entry(r, t)?], None))
        }
        InterferometerKind::Combo { .. } => {
            let (plus, minus, maps) = reconstruct_combo(pair, policy)?;
            let diag = ComboDiagnostics { lobe_mismatch: maps.lobe_mismatch, overlap_ratio: maps.overlap_ratio };
            Ok((vec![entry(plus, truth_plus)?, entry(minus, truth_minus)?], Some(diag)))
        }
    }
}

fn target_file(target: Target) -> &'static str {
    match target {
        Target::FPlus => "f_plus.csv",
        Target::FMinus => "f_minus.csv",
    }
}

fn write_report(report: &ReportFile, out: &Path) -> Result<Vec<PathBuf>> {
    create_dir(out)?;
    let path = out.join("report.json");
    report.write(&path)?;
    let mut written = vec![path];
    for e in &report.entries {
        let path = out.join(target_file(e.target));
        std::fs::write(&path, spectrum_csv(e)).map_err(|err| CliError::io(&path, err))?;
        written.push(path);
    }
    Ok(written)
}

#[derive(Clone, Debug)]
pub struct PipelineOutput {
    pub scans: Vec<PathBuf>,
    pub report: ReportFile,
    pub written: Vec<PathBuf>,
}

pub fn pipeline(config: &RunConfig) -> Result<PipelineOutput> {
    let plan = plan(config, true)?;
    let (a, b) = quadrature_indices(config)?;
    let files = simulate_plan(&plan, "pipeline", Execution::default())?;
    let pair = QuadraturePair::new(files[a].1.scan.clone(), files[b].1.scan.clone())?;
    let (entries, combo) =
        reconstruct_pair(&pair, config.reconstruct.anchor, plan.source.truth_plus.as_ref(), plan.source.truth_minus.as_ref())?;
    let provenance = config.interferometer.provenance;
    let report = ReportFile {
        format: REPORT_FORMAT.to_string(),
        command: "pipeline".into(),
        seed: config.seed,
        provenance,
        form: form_name(config.kind()?, plan.source.symmetry, provenance).to_string(),
        scans: files.iter().map(|(p, _)| p.clone()).collect(),
        route: plan.source.route.clone(),
        config: Some(config.clone()),
        combo,
        entries,
    };
    let written = write_report(&report, &plan.out)?;
    Ok(PipelineOutput { scans: files.into_iter().map(|(p, _)| p).collect(), report, written })
}

/// Reconstructs from scan files; `truth` supplies the source for fidelities.
pub fn reconstruct(scans: &[PathBuf], truth: Option<&RunConfig>, out: &Path, policy: AnchorPolicy) -> Result<ReportFile> {
    let files = scans.iter().map(|p| ScanFile::read(p)).collect::<Result<Vec<_>>>()?;
    let pick = |target: f64| files.iter().find(|f| (f.scan.config.arm_phase - target).abs() <= PHASE_MATCH);
    let (re, im) = match (pick(0.0), pick(FRAC_PI_2)) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(CliError::Usage("reconstruction needs one scan at φ = 0 and one at φ = π/2".into())),
    };
    let pair = QuadraturePair::new(re.scan.clone(), im.scan.clone())?;
    let source = truth.map(|c| resolve_source(&c.source, c.interferometer.provenance)).transpose()?;
    let (plus, minus) = match &source {
        Some(s) => (s.truth_plus.as_ref(), s.truth_minus.as_ref()),
        None => (None, None),
    };
    let (entries, combo) = reconstruct_pair(&pair, policy, plus, minus)?;
    let report = ReportFile {
        format: REPORT_FORMAT.to_string(),
        command: "reconstruct".into(),
        seed: re.header.seed,
        provenance: re.scan.provenance,
        form: re.header.form.clone(),
        scans: scans.to_vec(),
        route: re.header.route.clone(),
        config: truth.cloned(),
        combo,
        entries,
    };
    write_report(&report, out)?;
    Ok(report)
}
