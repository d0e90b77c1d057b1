use biphoton_core::jsa::*;
use biphoton_core::math::*;
use biphoton_core::{Complex64, Error};
use proptest::prelude::*;

fn base(count: usize, half: f64) -> FrequencyGrid {
    FrequencyGrid::with_half_span(count, half, 0.0).unwrap()
}

fn square() -> FrequencyGrid {
    FrequencyGrid::with_half_span(121, 12.0, 5.0).unwrap()
}

fn pump() -> SpectralFunction {
    make_gaussian(FrequencyGrid::with_half_span(161, 10.0, 5.0).unwrap(), 0.0, 1.0, 0.25).unwrap()
}

fn transpose_deviation(jsa: &GeneralJsa, sign: f64) -> f64 {
    let v = jsa.values();
    let t = v.t();
    v.iter().zip(t.iter()).map(|(a, b)| (a - b * sign).norm()).fold(0.0, f64::max)
}

#[test]
fn gaussian_examples() {
    let g = base(161, 10.0);
    let f = make_gaussian(g, 0.0, 1.0, 0.0).unwrap();
    assert!(f.values().iter().all(|v| v.im == 0.0));
    assert_eq!(f.parity_deviation(1.0), 0.0);
    assert!((f.norm_sqr() - 1.0).abs() < 1e-9);
    let chirped = make_gaussian(g, 0.0, 1.0, 0.3).unwrap();
    let n = g.fractional_index(2.0).round() as usize;
    assert!((chirped.values()[n].arg() - 1.2).abs() < 1e-12);
    let off = make_gaussian(g, 1.5, 0.8, 0.0).unwrap();
    let peak = (0..161).max_by(|&a, &b| off.values()[a].norm().total_cmp(&off.values()[b].norm())).unwrap();
    assert!((g.offset(peak) - 1.5).abs() < 1e-12);
}

#[test]
fn hermite_gauss_examples() {
    let g = base(161, 10.0);
    let h1 = make_hermite_gauss(g, 1, 1.0).unwrap();
    assert_eq!(h1.values()[80], Complex64::new(0.0, 0.0));
    assert_eq!(h1.parity_deviation(-1.0), 0.0);
    assert_eq!(make_hermite_gauss(g, 0, 0.9).unwrap(), make_gaussian(g, 0.0, 0.9, 0.0).unwrap());
}

#[test]
fn sinc_examples() {
    let f = make_sinc(base(401, 40.0), 0.5).unwrap();
    let peak = f.values()[200].norm();
    assert!(f.values().iter().all(|v| v.norm() <= peak));
    assert_eq!(f.parity_deviation(1.0), 0.0);
    assert!((f.norm_sqr() - 1.0).abs() < 1e-9);
}

#[test]
fn narrow_grids_and_bad_parameters_rejected() {
    let g = base(32, 2.5);
    assert!(matches!(make_gaussian(g, 0.0, 1.0, 0.0), Err(Error::GridTooNarrow(_))));
    assert!(matches!(make_gaussian(base(64, 10.0), 0.0, -1.0, 0.0), Err(Error::InvalidParameter(_))));
    assert!(matches!(make_gaussian(base(64, 10.0), 0.0, 1.0, f64::NAN), Err(Error::InvalidParameter(_))));
    assert!(matches!(make_hermite_gauss(base(64, 10.0), 3, 1.0), Err(Error::InvalidParameter(_))));
}

#[test]
fn to_general_symmetry_and_norm() {
    let g0 = base(161, 10.0);
    let even = SeparableJsa::new(pump(), make_gaussian(g0, 0.0, 1.0, 0.2).unwrap()).unwrap();
    let odd = SeparableJsa::new(pump(), make_hermite_gauss(g0, 1, 1.0).unwrap()).unwrap();
    let (sym, factor) = to_general(&even, square(), square()).unwrap();
    assert!(transpose_deviation(&sym, 1.0) < 1e-9);
    assert!((factor - 1.0).abs() < 1e-6);
    let (anti, _) = to_general(&odd, square(), square()).unwrap();
    assert!(transpose_deviation(&anti, -1.0) < 1e-9);
    let h = square().spacing();
    let density = sym.values().mapv(|v| Complex64::new(v.norm_sqr(), 0.0));
    assert!((integrate_2d(density.view(), h, h).unwrap().re - 1.0).abs() < 1e-8);
    assert_eq!(classify_symmetry(&sym).unwrap().0, SymmetryClass::Symmetric);
    assert_eq!(classify_symmetry(&anti).unwrap().0, SymmetryClass::Antisymmetric);
}

#[test]
fn to_general_on_distinct_grids_matches_shared_path() {
    let g0 = base(161, 10.0);
    let sep = SeparableJsa::new(pump(), make_gaussian(g0, 0.0, 1.0, 0.2).unwrap()).unwrap();
    let (a, _) = to_general(&sep, square(), square()).unwrap();
    let other = FrequencyGrid::with_half_span(121, 12.0, 5.0 + 1e-12).unwrap();
    let (b, _) = to_general(&sep, square(), other).unwrap();
    let worst = a.values().iter().zip(b.values().iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    assert!(worst < 1e-9);
}

#[test]
fn exchange_examples() {
    let g0 = base(161, 10.0);
    let even = SeparableJsa::new(pump(), make_gaussian(g0, 0.0, 1.0, 0.0).unwrap()).unwrap();
    let (sym, _) = to_general(&even, square(), square()).unwrap();
    assert!(exchange(&sym).unwrap().values().iter().zip(sym.values().iter()).all(|(a, b)| (a - b).norm() < 1e-12));
    let anyonic_pm = make_gaussian(g0, 0.8, 1.0, 0.0).unwrap();
    let (any, _) = product_to_general(&pump(), &anyonic_pm, square(), square()).unwrap();
    assert_eq!(exchange(&exchange(&any).unwrap()).unwrap(), any);
    assert!(any.fidelity(&exchange(&any).unwrap()).unwrap() < 1.0 - 1e-3);
    let skew = GeneralJsa::normalized(square(), base(121, 12.0), any.values().clone()).unwrap();
    assert!(matches!(exchange(&skew), Err(Error::GridMismatch(_))));
}

#[test]
fn symmetrize_examples() {
    let g0 = base(161, 10.0);
    let even = SeparableJsa::new(pump(), make_gaussian(g0, 0.0, 1.0, 0.0).unwrap()).unwrap();
    let (sym, _) = to_general(&even, square(), square()).unwrap();
    assert!((symmetrize(&sym, 1.0).unwrap().fidelity(&sym).unwrap() - 1.0).abs() < 1e-12);
    assert!(matches!(symmetrize(&sym, -1.0), Err(Error::DegenerateSymmetrization { sign: '-' })));
    assert!(symmetrize(&sym, 0.5).is_err());
    let (any, _) = product_to_general(&pump(), &make_gaussian(g0, 0.8, 1.0, 0.1).unwrap(), square(), square()).unwrap();
    let (class, score) = classify_symmetry(&any).unwrap();
    assert_eq!(class, SymmetryClass::Anyonic);
    assert!(score.abs() < 1.0 - 1e-3);
    let (class, score) = classify_symmetry(&symmetrize(&any, -1.0).unwrap()).unwrap();
    assert_eq!(class, SymmetryClass::Antisymmetric);
    assert!((score + 1.0).abs() < 1e-6);
    let (class, score) = classify_symmetry(&symmetrize(&any, 1.0).unwrap()).unwrap();
    assert_eq!(class, SymmetryClass::Symmetric);
    assert!((score - 1.0).abs() < 1e-6);
}

#[test]
fn classification_scores() {
    let g0 = base(161, 10.0);
    let even = SeparableJsa::new(pump(), make_gaussian(g0, 0.0, 1.0, 0.0).unwrap()).unwrap();
    let odd = SeparableJsa::new(pump(), make_hermite_gauss(g0, 1, 1.0).unwrap()).unwrap();
    let (a, _) = to_general(&even, square(), square()).unwrap();
    let (b, _) = to_general(&odd, square(), square()).unwrap();
    assert!((classify_symmetry(&a).unwrap().1 - 1.0).abs() < 1e-9);
    assert!((classify_symmetry(&b).unwrap().1 + 1.0).abs() < 1e-9);
    let mix = GeneralJsa::superpose(&[(Complex64::new(1.0, 0.0), &a), (Complex64::new(1.0, 0.0), &b)]).unwrap();
    let (class, score) = classify_symmetry(&mix).unwrap();
    assert_eq!(class, SymmetryClass::Anyonic);
    assert!(score.abs() < 1e-6);
}

#[test]
fn to_general_commutes_with_parity() {
    let g0 = base(161, 10.0);
    let pm = make_gaussian(g0, 0.6, 0.9, 0.3).unwrap();
    let (f, _) = product_to_general(&pump(), &pm, square(), square()).unwrap();
    let (r, _) = product_to_general(&pump(), &pm.reflected(), square(), square()).unwrap();
    let swapped = exchange(&f).unwrap();
    let worst = swapped.values().iter().zip(r.values().iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    assert!(worst < 1e-8);
}

#[test]
fn leakage_rejected_and_reported() {
    let g0 = base(161, 10.0);
    let sep = SeparableJsa::new(pump(), make_gaussian(g0, 0.0, 1.0, 0.0).unwrap()).unwrap();
    let small = FrequencyGrid::with_half_span(41, 3.0, 5.0).unwrap();
    match to_general(&sep, small, small) {
        Err(Error::SupportLeakage { leakage }) => assert!(leakage > 1e-6),
        other => panic!("expected leakage error, got {other:?}"),
    }
}

#[test]
fn separable_requires_baseband_phasematch() {
    let g = FrequencyGrid::with_half_span(161, 10.0, 3.0).unwrap();
    let pm = make_gaussian(g, 0.0, 1.0, 0.0).unwrap();
    assert!(matches!(SeparableJsa::new(pump(), pm), Err(Error::InvalidGrid(_))));
}

#[test]
fn factorization_of_symmetrized_anyonic_state() {
    let g0 = base(161, 10.0);
    let pm = make_gaussian(g0, 0.7, 0.8, 0.0).unwrap();
    let (any, _) = product_to_general(&pump(), &pm, square(), square()).unwrap();
    assert!(matches!(factorize_separable(&any), Err(Error::NoDefiniteParity { .. })));
    for (sign, class) in [(1.0, SymmetryClass::Symmetric), (-1.0, SymmetryClass::Antisymmetric)] {
        let sym = symmetrize(&any, sign).unwrap();
        let (sep, residual) = factorize_separable(&sym).unwrap();
        assert_eq!(sep.symmetry(), class);
        assert!(residual < 1e-12);
        let (back, _) = to_general(&sep, square(), square()).unwrap();
        assert!((back.fidelity(&sym).unwrap() - 1.0).abs() < 1e-9);
    }
    let even_grid = FrequencyGrid::with_half_span(120, 12.0, 5.0).unwrap();
    let (g, _) = product_to_general(&pump(), &pm, even_grid, even_grid).unwrap();
    assert!(matches!(factorize(&g), Err(Error::InvalidGrid(_))));
}

#[test]
fn non_product_state_is_not_separable() {
    let g0 = base(161, 10.0);
    let (a, _) = product_to_general(&pump(), &make_gaussian(g0, 1.5, 0.7, 0.0).unwrap(), square(), square()).unwrap();
    let narrow = make_gaussian(FrequencyGrid::with_half_span(161, 10.0, 5.0).unwrap(), 0.0, 0.5, 0.0).unwrap();
    let (b, _) = product_to_general(&narrow, &make_gaussian(g0, -1.5, 0.7, 0.0).unwrap(), square(), square()).unwrap();
    let mix = GeneralJsa::superpose(&[(Complex64::new(1.0, 0.0), &a), (Complex64::new(0.0, 1.0), &b)]).unwrap();
    assert!(matches!(factorize_separable(&mix), Err(Error::NotSeparable { .. })));
}

#[test]
fn resampling_preserves_shape() {
    let f = make_gaussian(base(161, 10.0), 0.3, 1.0, 0.2).unwrap();
    let coarse = FrequencyGrid::with_half_span(97, 8.0, 0.0).unwrap();
    let r = f.resampled(coarse).unwrap();
    let direct = make_gaussian(coarse, 0.3, 1.0, 0.2).unwrap();
    assert!((r.inner(&direct).unwrap().norm_sqr() - 1.0).abs() < 1e-10);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn constructors_are_unit_norm(sigma in 0.3f64..1.5, chirp in -1.0f64..1.0, center in -1.0f64..1.0, order in 0u32..2) {
        let g = base(241, 12.0);
        let f = make_gaussian(g, center, sigma, chirp).unwrap();
        prop_assert!((f.norm_sqr() - 1.0).abs() < 1e-9);
        let h = make_hermite_gauss(g, order, sigma).unwrap();
        prop_assert!((h.norm_sqr() - 1.0).abs() < 1e-9);
        let s = make_sinc(base(241, 60.0), sigma).unwrap();
        prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn classification_agrees_with_declared_parity(sigma in 0.6f64..1.2, chirp in -0.4f64..0.4, odd in any::<bool>()) {
        let g0 = base(161, 10.0);
        let pm = if odd { make_hermite_gauss(g0, 1, sigma).unwrap() } else { make_gaussian(g0, 0.0, sigma, chirp).unwrap() };
        let sep = SeparableJsa::new(pump(), pm).unwrap();
        let (jsa, _) = to_general(&sep, square(), square()).unwrap();
        prop_assert_eq!(classify_symmetry(&jsa).unwrap().0, sep.symmetry());
    }

    #[test]
    fn global_phase_leaves_classification(theta in 0.0f64..std::f64::consts::TAU) {
        let g0 = base(161, 10.0);
        let sep = SeparableJsa::new(pump(), make_hermite_gauss(g0, 1, 1.0).unwrap()).unwrap();
        let (jsa, _) = to_general(&sep, square(), square()).unwrap();
        let turned = jsa.with_phase(theta);
        prop_assert!((classify_symmetry(&turned).unwrap().1 - classify_symmetry(&jsa).unwrap().1).abs() < 1e-12);
        prop_assert!((turned.fidelity(&jsa).unwrap() - 1.0).abs() < 1e-12);
    }
}
