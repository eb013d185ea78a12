use std::f64::consts::{LN_2, PI, TAU};

use central_spin::analysis::{compare_series, detect_peaks, TimeSeries};
use central_spin::closed_form::{mode_frequencies, EquatorialPhase, HomogeneousDynamics, ModelParams, QubitState};
use central_spin::dicke::{coherent_weights, ladder_coefficient, BathSize, CoherentAngle};
use central_spin::ed::{
    build_hamiltonian, conserved_checks, diagonalize, initial_state, CouplingProfile, SectorBasis, SpectrumSet,
};
use central_spin::analysis::TimeGrid;
use central_spin::jc::{binomial_poisson_distance, poisson_weights, JcInversion, JcParams};
use central_spin::C64;
use proptest::prelude::*;

const PURE_CASES: u32 = 1000;
const ED_CASES: u32 = 48;

fn coupling() -> impl Strategy<Value = f64> {
    prop_oneof![-3.0..3.0f64, Just(0.0), Just(1.0)]
}

fn model() -> impl Strategy<Value = ModelParams> {
    (1usize..=200, coupling(), coupling(), coupling())
        .prop_map(|(n, b, a, d)| ModelParams::new(n, b, a, d).unwrap())
}

fn theta() -> impl Strategy<Value = CoherentAngle> {
    prop_oneof![0.0..=PI, Just(0.0), Just(PI)].prop_map(|t| CoherentAngle::new(t).unwrap())
}

fn qubit() -> impl Strategy<Value = QubitState> {
    // a valid density matrix: |b|² ≤ a(1 − a)
    (0.0..=1.0f64, 0.0..=1.0f64, 0.0..TAU).prop_map(|(a, r, phase)| {
        let rmax = (a * (1.0 - a)).sqrt();
        QubitState::new(a, C64::from_polar(r * rmax, phase))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(PURE_CASES))]

    #[test]
    fn weights_are_a_distribution(n in 1usize..=1000, theta in theta()) {
        let w = coherent_weights(BathSize::new(n).unwrap(), theta);
        prop_assert!(w.weights().iter().all(|&x| x >= 0.0));
        let total: f64 = w.weights().iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        for (c, x) in w.amplitudes().iter().zip(w.weights()) {
            prop_assert!(*c >= 0.0 && (c * c - x).abs() < 1e-15);
        }
    }

    #[test]
    fn ladder_is_symmetric(n in 1usize..=2000, k in 0usize..=2001) {
        let bn = BathSize::new(n).unwrap();
        let k = k.min(n + 1);
        prop_assert!(ladder_coefficient(k, bn) >= 0.0);
        prop_assert_eq!(ladder_coefficient(k, bn), ladder_coefficient(n + 1 - k, bn));
    }

    #[test]
    fn rabi_frequencies_dominate_detunings(p in model()) {
        let f = mode_frequencies(&p);
        for (d, o) in f.detuning.iter().zip(&f.rabi) {
            prop_assert!(*o >= 0.0 && *o >= d.abs());
        }
    }

    #[test]
    fn resonance_identity(n in 1usize..=1000, a in 0.01..5.0f64) {
        let p = ModelParams::resonant(n, a).unwrap();
        let f = mode_frequencies(&p);
        for (k, o) in f.rabi.iter().enumerate() {
            let want = a * ((n * n + 4 * k) as f64).sqrt();
            prop_assert!((o - want).abs() <= 1e-12 * want.max(1.0));
        }
    }

    #[test]
    fn evolution_is_unitary(p in model(), theta in theta(), t in 0.0..1000.0f64) {
        let table = HomogeneousDynamics::new(p, theta).amplitudes(t);
        for (u, d) in table.up.iter().zip(&table.down) {
            prop_assert!((u.norm_sqr() + d.norm_sqr() - 1.0).abs() < 1e-12);
        }
        prop_assert!((table.norm_sqr() - 1.0).abs() < 1e-12);
        prop_assert!((table.global_phase().norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn polarization_and_reduced_state_are_physical(p in model(), theta in theta(), t in 0.0..1000.0f64) {
        let dynamics = HomogeneousDynamics::new(p, theta);
        let s = dynamics.polarization(t);
        prop_assert!(s.abs() <= 0.5 + 1e-12);
        let rho = dynamics.density_matrix(t);
        prop_assert!((rho.a - 0.5 - s).abs() < 1e-10);
        let gamma = rho.purity();
        prop_assert!((0.5 - 1e-12..=1.0 + 1e-12).contains(&gamma));
        let (hi, lo) = rho.eigenvalues();
        prop_assert!((0.0..=1.0).contains(&hi) && (0.0..=1.0).contains(&lo));
    }

    #[test]
    fn entropy_and_purity_agree(rho in qubit()) {
        let s = rho.von_neumann_entropy();
        let gamma = rho.purity();
        prop_assert!(s >= 0.0 && s <= LN_2 + 1e-12);
        prop_assert!((0.5 - 1e-12..=1.0 + 1e-12).contains(&gamma));
        if s < 1e-12 {
            prop_assert!((gamma - 1.0).abs() < 1e-9);
        }
        if (gamma - 1.0).abs() < 1e-15 {
            prop_assert!(s < 1e-9);
        }
    }

    #[test]
    fn fidelity_rotates_with_the_coherence(rho in qubit(), phi in -10.0..10.0f64, chi in -10.0..10.0f64) {
        let rotated = QubitState::new(rho.a, rho.b * C64::from_polar(1.0, chi));
        let f1 = rotated.fidelity(EquatorialPhase::new(phi).unwrap());
        let f2 = rho.fidelity(EquatorialPhase::new(phi - chi).unwrap());
        prop_assert!((f1 - f2).abs() < 1e-12);
        // only Re(b e^{−iφ}) matters: the population is irrelevant
        let other = QubitState::new(1.0 - rho.a, rho.b);
        prop_assert_eq!(other.fidelity(EquatorialPhase::new(phi).unwrap()), rho.fidelity(EquatorialPhase::new(phi).unwrap()));
    }

    #[test]
    fn phase_wraps_into_one_turn(phi in -1e6..1e6f64) {
        let p = EquatorialPhase::new(phi).unwrap().radians();
        prop_assert!((0.0..TAU).contains(&p));
    }

    #[test]
    fn jc_inversion_is_bounded(
        detuning in -3.0..3.0f64,
        g in 0.0..3.0f64,
        lambda in 0.0..60.0f64,
        t in 0.0..200.0f64,
    ) {
        let params = JcParams { detuning, coupling: g, mean_photons: lambda, longitudinal: 0.0, bath: 1000 };
        let w = JcInversion::new(params, 1e-12).unwrap().at(t);
        prop_assert!(w.abs() <= 1.0 + 1e-12);
    }

    #[test]
    fn poisson_tail_is_respected(lambda in 0.0..400.0f64) {
        let w = poisson_weights(lambda, 1e-12).unwrap();
        prop_assert!(w.probs.iter().all(|&p| p >= 0.0));
        prop_assert!(w.mass() >= 1.0 - 1e-12);
    }

    #[test]
    fn peaks_ignore_vertical_shifts(
        y in prop::collection::vec(-1.0..1.0f64, 20..200),
        shift in -5.0..5.0f64,
        window in 1usize..6,
    ) {
        let t: Vec<f64> = (0..y.len()).map(|i| i as f64 * 0.1).collect();
        let a = TimeSeries::new(t.clone(), y.clone(), "a").unwrap();
        let b = TimeSeries::new(t, y.iter().map(|v| v + shift).collect(), "b").unwrap();
        let pa = detect_peaks(&a, 0.05, window).unwrap();
        let pb = detect_peaks(&b, 0.05, window).unwrap();
        let ia: Vec<usize> = pa.peaks.iter().map(|p| p.index).collect();
        let ib: Vec<usize> = pb.peaks.iter().map(|p| p.index).collect();
        prop_assert_eq!(ia, ib);
        // determinism
        prop_assert_eq!(detect_peaks(&a, 0.05, window).unwrap(), pa);
    }

    #[test]
    fn compare_is_symmetric(
        y in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1..100),
    ) {
        let t: Vec<f64> = (0..y.len()).map(|i| i as f64).collect();
        let a = TimeSeries::new(t.clone(), y.iter().map(|p| p.0).collect(), "a").unwrap();
        let b = TimeSeries::new(t, y.iter().map(|p| p.1).collect(), "b").unwrap();
        prop_assert_eq!(compare_series(&a, &b).unwrap(), compare_series(&b, &a).unwrap());
    }
}

fn random_profile() -> impl Strategy<Value = (CouplingProfile, f64)> {
    (1usize..=6).prop_flat_map(|n| {
        (
            prop::collection::vec(-2.0..2.0f64, n),
            prop::collection::vec(-2.0..2.0f64, n),
            -2.0..2.0f64,
        )
            .prop_map(|(a, d, b)| (CouplingProfile::explicit(a, d).unwrap(), b))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(ED_CASES))]

    #[test]
    fn sector_eigensystems_are_accurate((profile, field) in random_profile()) {
        let n = profile.bath_size();
        let mut total = 0;
        for m in 0..=n + 1 {
            let basis = SectorBasis::new(n, m, 14).unwrap();
            total += basis.dim();
            let h = build_hamiltonian(&profile, field, &basis).unwrap();
            prop_assert_eq!(h.max_asymmetry(), 0.0);
            let s = diagonalize(&h, m).unwrap();
            let scale = h.max_abs().max(1.0) * h.dim() as f64;
            prop_assert!(s.max_residual(&h) < 1e-10 * scale);
            prop_assert!(s.orthonormality_error() < 1e-10);
        }
        prop_assert_eq!(total, 1 << (n + 1));
    }

    #[test]
    fn exact_evolution_conserves((profile, field) in random_profile(), theta in theta(), t_end in 1.0..50.0f64) {
        let n = profile.bath_size();
        let psi = initial_state(BathSize::new(n).unwrap(), theta, 14).unwrap();
        let spectra = SpectrumSet::for_state(&profile, field, &psi, 14, None).unwrap();
        let grid = TimeGrid::linspace(0.0, t_end, 64).unwrap();
        let traj = spectra.trajectory(&psi, &grid).unwrap();
        let report = conserved_checks(&traj);
        prop_assert!(report.passed(), "{:?}", report);
        for s in &traj.sz0 {
            prop_assert!(s.abs() <= 0.5 + 1e-12);
        }
    }

    #[test]
    fn uniform_couplings_keep_the_bath_symmetric(
        n in 1usize..=7,
        a in -2.0..2.0f64,
        d in -2.0..2.0f64,
        field in -2.0..2.0f64,
        theta in theta(),
    ) {
        let profile = CouplingProfile::uniform(n, a, d).unwrap();
        let psi = initial_state(BathSize::new(n).unwrap(), theta, 14).unwrap();
        let spectra = SpectrumSet::for_state(&profile, field, &psi, 14, None).unwrap();
        let traj = spectra.trajectory(&psi, &TimeGrid::linspace(0.0, 30.0, 50).unwrap()).unwrap();
        for p in &traj.pbath {
            prop_assert!((p - 1.0).abs() < 1e-10);
        }
    }
}

#[test]
fn poisson_approximation_improves_with_bath_size() {
    // ζ² = N sin²(θ/2) held at 9
    let distance = |n: usize| {
        let theta = CoherentAngle::new(2.0 * (9.0 / n as f64).sqrt().asin()).unwrap();
        binomial_poisson_distance(&ModelParams::new(n, 0.0, 1.0, 0.0).unwrap(), theta)
    };
    let d: Vec<f64> = [100, 1000, 10000].into_iter().map(distance).collect();
    assert!(d[0] > d[1] && d[1] > d[2], "{d:?}");
}

#[test]
fn doubling_the_truncation_changes_little() {
    let eps = 1e-12;
    let params = JcParams {
        detuning: 0.4,
        coupling: 1.0,
        mean_photons: 16.0,
        longitudinal: 0.01,
        bath: 400,
    };
    let base = poisson_weights(16.0, eps).unwrap();
    let mut doubled = base.clone();
    let longer = poisson_weights(16.0, f64::MIN_POSITIVE).unwrap();
    doubled.probs = longer.probs.iter().copied().take(2 * (base.n_max + 1)).collect();
    doubled.n_max = doubled.probs.len() - 1;
    let a = JcInversion::with_weights(params, base);
    let b = JcInversion::with_weights(params, doubled);
    for i in 0..=2000 {
        let t = i as f64 * 0.05;
        assert!((a.at(t) - b.at(t)).abs() < 10.0 * eps);
    }
}
