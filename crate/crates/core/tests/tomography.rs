use biphoton_core::distributions::*;
use biphoton_core::interferometers::*;
use biphoton_core::jsa::*;
use biphoton_core::math::*;
use biphoton_core::tomography::*;
use biphoton_core::Error;
use std::f64::consts::FRAC_PI_2;

const CARRIER: f64 = 10.0;

fn pump(chirp: f64) -> SpectralFunction {
    make_gaussian(FrequencyGrid::with_half_span(201, 10.0, CARRIER).unwrap(), 0.0, 1.0, chirp).unwrap()
}

fn pm_grid() -> FrequencyGrid {
    FrequencyGrid::with_half_span(201, 10.0, 0.0).unwrap()
}

fn gauss_pm(chirp: f64) -> SpectralFunction {
    make_gaussian(pm_grid(), 0.0, 1.0, chirp).unwrap()
}

fn hg1() -> SpectralFunction {
    make_hermite_gauss(pm_grid(), 1, 1.0).unwrap()
}

fn tau_axis() -> DelayGrid {
    DelayGrid::centered(601, 0.05).unwrap()
}

fn mu_axis() -> DelayGrid {
    DelayGrid::centered(161, 0.1).unwrap()
}

fn scan_pair(kind: InterferometerKind, jsa: &SeparableJsa, provenance: Provenance) -> QuadraturePair {
    let scan = |phi| {
        let cfg = ScanConfig { kind, tau_grid: tau_axis(), mu_grid: mu_axis(), arm_phase: phi, noise: NoiseSpec::None };
        run_scan(&cfg, JsaRef::Separable(jsa), provenance).unwrap()
    };
    QuadraturePair::new(scan(0.0), scan(FRAC_PI_2)).unwrap()
}

fn separable(pump: SpectralFunction, pm: SpectralFunction) -> SeparableJsa {
    SeparableJsa::new(pump, pm).unwrap()
}

fn parity_score(f: &SpectralFunction) -> f64 {
    f.inner(&f.reflected()).unwrap().re
}

#[test]
fn assembled_maps_match_direct_transforms() {
    let cases = [
        (InterferometerKind::Hom, separable(pump(0.0), gauss_pm(0.3)), MapKind::WignerMinus),
        (InterferometerKind::Noon, separable(pump(0.2), gauss_pm(0.0)), MapKind::StftPlus),
        (InterferometerKind::Noon, separable(pump(0.0), hg1()), MapKind::StftMinus),
    ];
    for (kind, jsa, map_kind) in cases {
        let map = assemble_complex_map(&scan_pair(kind, &jsa, Provenance::ClosedExact)).unwrap();
        assert_eq!(map.kind, map_kind);
        let f = if map_kind == MapKind::StftPlus { jsa.pump() } else { jsa.phasematch() };
        let direct = map_over_grid(map_kind, f, tau_axis(), mu_axis()).unwrap();
        assert!(map.max_abs_diff(&direct) < 1e-8, "{map_kind:?}");
    }
}

#[test]
fn hom_round_trip_recovers_gaussian_and_chirp() {
    for chirp in [0.0, 0.3] {
        let jsa = separable(pump(0.0), gauss_pm(chirp));
        let map = assemble_complex_map(&scan_pair(InterferometerKind::Hom, &jsa, Provenance::ClosedExact)).unwrap();
        let report = reconstruct_from_wigner(&map, AnchorPolicy::MaxModulus).unwrap().with_truth(jsa.phasematch()).unwrap();
        assert_eq!((report.target, report.method), (Target::FMinus, Method::Hom));
        assert!(report.fidelity.unwrap() >= 0.999);
        assert!(report.residual_map.iter().all(|r| *r < 1e-6));
        let fit = fit_chirp(&report.estimate, 1e-3).unwrap();
        if chirp == 0.0 {
            assert!(fit.quadratic.abs() < 1e-6);
            let im = report.estimate.values().iter().map(|v| v.im.abs()).fold(0.0, f64::max);
            assert!(im <= 1e-6);
        } else {
            assert!((fit.quadratic - chirp).abs() <= 0.01 * chirp);
        }
    }
}

#[test]
fn noon_round_trips() {
    let sym = separable(pump(0.2), gauss_pm(0.0));
    let map = assemble_complex_map(&scan_pair(InterferometerKind::Noon, &sym, Provenance::ClosedExact)).unwrap();
    let report = reconstruct_from_stft(&map, AnchorPolicy::MaxModulus).unwrap().with_truth(sym.pump()).unwrap();
    assert_eq!(report.target, Target::FPlus);
    assert!(report.fidelity.unwrap() >= 0.999);
    assert!((fit_chirp(&report.estimate, 1e-3).unwrap().quadratic - 0.2).abs() <= 0.002);
    assert_eq!(report.estimate.grid().carrier(), CARRIER);

    let anti = separable(pump(0.0), hg1());
    let map = assemble_complex_map(&scan_pair(InterferometerKind::Noon, &anti, Provenance::ClosedExact)).unwrap();
    let report = reconstruct_from_stft(&map, AnchorPolicy::MaxModulus).unwrap().with_truth(anti.phasematch()).unwrap();
    assert_eq!(report.target, Target::FMinus);
    assert!(report.fidelity.unwrap() >= 0.999);
    assert!(parity_score(&report.estimate) <= -1.0 + 1e-4);
}

#[test]
fn hg1_via_hom_keeps_odd_parity() {
    let jsa = separable(pump(0.0), hg1());
    let map = assemble_complex_map(&scan_pair(InterferometerKind::Hom, &jsa, Provenance::ClosedExact)).unwrap();
    let report = reconstruct_from_wigner(&map, AnchorPolicy::MaxModulus).unwrap().with_truth(jsa.phasematch()).unwrap();
    assert!(report.fidelity.unwrap() >= 0.999);
    assert!(parity_score(&report.estimate) <= -1.0 + 1e-4);
    assert!(report.anchor.offset.abs() > 0.5);
    assert!(matches!(reconstruct_from_wigner(&map, AnchorPolicy::Origin), Err(Error::WeakAnchor { .. })));
}

#[test]
fn anchor_choice_does_not_change_the_estimate() {
    let jsa = separable(pump(0.0), gauss_pm(0.3));
    let map = assemble_complex_map(&scan_pair(InterferometerKind::Hom, &jsa, Provenance::ClosedExact)).unwrap();
    let a = reconstruct_from_wigner(&map, AnchorPolicy::Origin).unwrap().with_truth(jsa.phasematch()).unwrap();
    let b = reconstruct_from_wigner(&map, AnchorPolicy::MaxModulus).unwrap().with_truth(jsa.phasematch()).unwrap();
    assert_eq!(a.anchor.offset, 0.0);
    let gap = a.estimate.values().iter().zip(b.estimate.values()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    assert!(gap < 1e-4);
}

#[test]
fn combo_round_trips_both_symmetries() {
    let cases = [separable(pump(0.2), gauss_pm(0.3)), separable(pump(0.2), hg1())];
    for jsa in cases {
        let pair = scan_pair(InterferometerKind::Combo { tau0: 10.0 }, &jsa, Provenance::ClosedFar);
        let (plus, minus, maps) = reconstruct_combo(&pair, AnchorPolicy::MaxModulus).unwrap();
        assert!(maps.lobe_mismatch < 1e-8);
        assert!(maps.overlap_ratio < LOBE_OVERLAP_LIMIT);
        let axis = maps.map_plus.tau_axis;
        assert!(maps.map_plus.max_abs_diff(&map_over_grid(MapKind::StftPlus, jsa.pump(), axis, mu_axis()).unwrap()) < 1e-6);
        assert!(maps.map_minus.max_abs_diff(&map_over_grid(MapKind::StftMinus, jsa.phasematch(), axis, mu_axis()).unwrap()) < 1e-5);
        let plus = plus.with_truth(jsa.pump()).unwrap();
        let minus = minus.with_truth(jsa.phasematch()).unwrap();
        assert_eq!((plus.method, minus.method), (Method::Combo, Method::Combo));
        assert!(plus.fidelity.unwrap() >= 0.999 && minus.fidelity.unwrap() >= 0.999);
    }
}

#[test]
fn combo_rejects_unsuitable_axes() {
    let jsa = separable(pump(0.0), gauss_pm(0.0));
    let scan = |tau_grid, tau0| {
        let cfg = ScanConfig { kind: InterferometerKind::Combo { tau0 }, tau_grid, mu_grid: DelayGrid::centered(5, 0.1).unwrap(), arm_phase: 0.0, noise: NoiseSpec::None };
        let re = run_scan(&cfg, JsaRef::Separable(&jsa), Provenance::ClosedFar).unwrap();
        let im = run_scan(&ScanConfig { arm_phase: FRAC_PI_2, ..cfg }, JsaRef::Separable(&jsa), Provenance::ClosedFar).unwrap();
        QuadraturePair::new(re, im).unwrap()
    };
    let short = scan(DelayGrid::centered(201, 0.05).unwrap(), 10.0);
    assert!(matches!(combo_postprocess(&short), Err(Error::InvalidGrid(_))));
    let off_lattice = scan(DelayGrid::centered(601, 0.05).unwrap(), 10.01);
    assert!(matches!(combo_postprocess(&off_lattice), Err(Error::InvalidGrid(_))));
}

#[test]
fn combo_reports_overlapping_lobes() {
    let jsa = separable(pump(0.0), gauss_pm(0.0));
    let cfg = ScanConfig {
        kind: InterferometerKind::Combo { tau0: 4.0 },
        tau_grid: DelayGrid::centered(401, 0.05).unwrap(),
        mu_grid: DelayGrid::centered(5, 0.1).unwrap(),
        arm_phase: 0.0,
        noise: NoiseSpec::None,
    };
    let re = run_scan(&cfg, JsaRef::Separable(&jsa), Provenance::ClosedExact).unwrap();
    let im = run_scan(&ScanConfig { arm_phase: FRAC_PI_2, ..cfg }, JsaRef::Separable(&jsa), Provenance::ClosedExact).unwrap();
    let pair = QuadraturePair::new(re, im).unwrap();
    assert!(matches!(combo_postprocess(&pair), Err(Error::LobeOverlap { .. })));
}

#[test]
fn global_phase_of_the_source_is_invisible() {
    let jsa = separable(pump(0.2), gauss_pm(0.3));
    let a = assemble_complex_map(&scan_pair(InterferometerKind::Noon, &jsa, Provenance::ClosedExact)).unwrap();
    let b = assemble_complex_map(&scan_pair(InterferometerKind::Noon, &jsa.with_phase(1.1), Provenance::ClosedExact)).unwrap();
    assert!(a.max_abs_diff(&b) < 1e-10);
}

#[test]
fn mismatched_pairs_are_rejected() {
    let jsa = separable(pump(0.0), gauss_pm(0.0));
    let base = ScanConfig {
        kind: InterferometerKind::Hom,
        tau_grid: DelayGrid::centered(5, 0.1).unwrap(),
        mu_grid: DelayGrid::centered(3, 0.1).unwrap(),
        arm_phase: 0.0,
        noise: NoiseSpec::None,
    };
    let run = |cfg: ScanConfig| run_scan(&cfg, JsaRef::Separable(&jsa), Provenance::ClosedExact).unwrap();
    let re = run(base);
    let im = run(ScanConfig { arm_phase: FRAC_PI_2, ..base });
    assert!(QuadraturePair::new(re.clone(), im.clone()).is_ok());
    assert!(matches!(QuadraturePair::new(im.clone(), re.clone()), Err(Error::ScanMismatch(_))));
    let other_grid = run(ScanConfig { arm_phase: FRAC_PI_2, tau_grid: DelayGrid::centered(5, 0.2).unwrap(), ..base });
    assert!(matches!(QuadraturePair::new(re.clone(), other_grid), Err(Error::ScanMismatch(_))));
    let other_kind = run(ScanConfig { arm_phase: FRAC_PI_2, kind: InterferometerKind::Noon, ..base });
    assert!(matches!(QuadraturePair::new(re.clone(), other_kind), Err(Error::ScanMismatch(_))));
    let noisy = run(ScanConfig { arm_phase: FRAC_PI_2, noise: NoiseSpec::Poisson { pairs: 100, seed: 1 }, ..base });
    assert!(matches!(QuadraturePair::new(re, noisy), Err(Error::ScanMismatch(_))));
}

#[test]
fn anyonic_noon_pair_has_no_inversion() {
    let pm = make_gaussian(pm_grid(), 0.7, 0.8, 0.0).unwrap();
    let grid = FrequencyGrid::with_half_span(96, 12.0, CARRIER).unwrap();
    let (g, _) = product_to_general(&pump(0.0), &pm, grid, grid).unwrap();
    let small = DelayGrid::centered(3, 0.2).unwrap();
    let scan = |phi| {
        let cfg = ScanConfig { kind: InterferometerKind::Noon, tau_grid: small, mu_grid: small, arm_phase: phi, noise: NoiseSpec::None };
        run_scan(&cfg, JsaRef::General(&g), Provenance::Oracle).unwrap()
    };
    let pair = QuadraturePair::new(scan(0.0), scan(FRAC_PI_2)).unwrap();
    assert!(matches!(assemble_complex_map(&pair), Err(Error::NoClosedForm)));
}

#[test]
fn fidelity_examples() {
    let h0 = make_hermite_gauss(pm_grid(), 0, 1.0).unwrap();
    assert!((fidelity(&h0, &h0).unwrap() - 1.0).abs() < 1e-12);
    assert!((fidelity(&h0, &h0.with_phase(2.3)).unwrap() - 1.0).abs() < 1e-12);
    assert!(fidelity(&h0, &hg1()).unwrap() < 1e-10);
    let aligned = align_global_phase(&h0.with_phase(0.9), &h0).unwrap();
    assert!(aligned.values().iter().zip(h0.values()).all(|(a, b)| (a - b).norm() < 1e-12));
    assert!(matches!(align_global_phase(&h0, &hg1()), Err(Error::ZeroOverlap)));
}
