use nalgebra::Matrix4;
use num_complex::Complex64;
use proptest::prelude::*;

use dicke_core::eigen::{
    closed_eigenfrequencies, locate_critical, ohmic_roots_companion, ohmic_roots_dense, open_eigenfrequencies,
    residual_scale, sweep_eigenfrequencies,
};
use dicke_core::exec::Execution;
use dicke_core::matrices::{det4, poly_eval, zeta_np_quartic_coeffs, BogoliubovSystem, Mat4, ZetaSignature};
use dicke_core::model::{condensates, derive_phase, BathSpec, ModelParams, Phase, SweepAxis};
use dicke_core::scattering::{find_minima, s11, s_matrix};
use dicke_core::squeezing::{
    dispersive_output_coefficient, quadrature_variance, two_mode_variance, vacuum_variance, QuadratureSpec,
};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn bath(max_s: f64) -> impl Strategy<Value = BathSpec> {
    (0.0..0.5f64, -0.5..max_s).prop_map(|(g0, s)| BathSpec::new(g0, s).unwrap())
}

fn ohmic_bath() -> impl Strategy<Value = BathSpec> {
    (0.0..0.5f64).prop_map(|g0| BathSpec::ohmic(g0).unwrap())
}

/// Frequencies in [0.5, 2], coupling up to twice critical.
fn params_with(baths: impl Strategy<Value = (BathSpec, BathSpec)>) -> impl Strategy<Value = ModelParams> {
    (0.5..2.0f64, 0.5..2.0f64, 0.0..2.0f64, baths).prop_map(|(wa, wb, t, (ba, bb))| {
        let g = t * (wa * wb).sqrt() / 2.0;
        ModelParams::new(wa, wb, g, ba, bb).unwrap()
    })
}

fn any_params() -> impl Strategy<Value = ModelParams> {
    params_with((bath(1.0), bath(1.0)))
}

fn ohmic_params() -> impl Strategy<Value = ModelParams> {
    params_with((ohmic_bath(), ohmic_bath()))
}

fn sigma() -> Mat4 {
    Matrix4::from_diagonal(&nalgebra::Vector4::new(1.0, -1.0, 1.0, -1.0)).map(|x| c(x, 0.0))
}

fn pair_swap() -> Mat4 {
    #[rustfmt::skip]
    let p = Matrix4::new(
        0.0, 1.0, 0.0, 0.0,
        1.0, 0.0, 0.0, 0.0,
        0.0, 0.0, 0.0, 1.0,
        0.0, 0.0, 1.0, 0.0,
    );
    p.map(|x| c(x, 0.0))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn lambda_and_critical_coupling(p in any_params()) {
        let ph = derive_phase(&p);
        prop_assert!((ph.g_c - (p.omega_a() * p.omega_b()).sqrt() / 2.0).abs() < 1e-15);
        let wa = p.omega_a();
        let wb = p.omega_b();
        prop_assert!((wa * wa * wb * wb - 4.0 * ph.g_c * ph.g_c * wa * wb).abs() < 1e-14 * (wa * wb).powi(2).max(1.0));
    }

    #[test]
    fn condensate_signs(p in any_params()) {
        let ph = derive_phase(&p);
        match ph.phase {
            Phase::Superradiant => {
                prop_assert!(ph.alpha_per_n > 0.0 && ph.beta_per_n > 0.0 && ph.beta_per_n < 0.5);
            }
            _ => prop_assert!(ph.alpha_per_n == 0.0 && ph.beta_per_n == 0.0),
        }
    }

    #[test]
    fn condensates_ignore_baths(p in any_params(), ba in bath(0.5), bb in bath(0.5)) {
        let (a0, b0) = condensates(&p);
        let (a1, b1) = condensates(&p.with_baths(ba, bb));
        prop_assert_eq!(a0.to_bits(), a1.to_bits());
        prop_assert_eq!(b0.to_bits(), b1.to_bits());
    }

    #[test]
    fn real_axis_rate_is_even_and_real(g0 in 0.0..1.0f64, s in -0.9..2.0f64, w in 1e-3..10.0f64) {
        let b = BathSpec::new(g0, s).unwrap();
        let plus = b.gamma_of(c(w, 0.0)).unwrap();
        let minus = b.gamma_of(c(-w, 0.0)).unwrap();
        prop_assert_eq!(plus, minus);
        prop_assert_eq!(plus.im, 0.0);
        prop_assert_eq!(plus.re, b.rate(w));
    }

    #[test]
    fn omega_times_rate_vanishes_at_zero(g0 in 0.01..1.0f64, s in -0.95..2.0f64) {
        let b = BathSpec::new(g0, s).unwrap();
        let f = |w: f64| w * b.rate(w);
        prop_assert!(f(1e-12) < f(1e-6) || f(1e-6) == 0.0);
        prop_assert!(f(1e-300) < 1e-10);
    }

    #[test]
    fn bogoliubov_symmetries(p in any_params()) {
        let a = *BogoliubovSystem::new(&p).a_matrix();
        let s = sigma();
        let q = pair_swap();
        let scale = p.frequency_scale().max(1.0);
        prop_assert!((s * a.adjoint() * s - a).norm() < 1e-13 * scale);
        prop_assert!((-(q * a.conjugate() * q) - a).norm() < 1e-13 * scale);
    }

    #[test]
    fn gamma_blocks_are_rank_one(p in any_params(), w in 0.01..3.0f64) {
        let g = BogoliubovSystem::new(&p).gamma(c(w, 0.0), ZetaSignature::RETARDED).unwrap();
        for k in [0, 2] {
            let det = g[(k, k)] * g[(k + 1, k + 1)] - g[(k, k + 1)] * g[(k + 1, k)];
            prop_assert_eq!(det, c(0.0, 0.0));
        }
    }

    #[test]
    fn determinant_matches_quartic(p in params_with((ohmic_bath(), ohmic_bath())), wr in -3.0..3.0f64, wi in -1.0..1.0f64) {
        let p = p.with_g(p.g().min(p.critical_coupling())).unwrap();
        let w = c(wr, wi);
        let coeffs = zeta_np_quartic_coeffs(&p, ZetaSignature::RETARDED).unwrap();
        let z = BogoliubovSystem::new(&p).zeta(w, ZetaSignature::RETARDED).unwrap();
        prop_assert!((z - poly_eval(&coeffs, w)).norm() < 1e-10 * z.norm().max(1.0));
    }

    #[test]
    fn det4_matches_lu(p in any_params(), wr in -3.0..3.0f64, wi in -1.0..0.0f64) {
        let m = BogoliubovSystem::new(&p).m_matrix(c(wr, wi), ZetaSignature::RETARDED).unwrap();
        let d = det4(&m);
        prop_assert!((d - m.determinant()).norm() < 1e-12 * d.norm().max(1.0));
    }

    #[test]
    fn conjugation_symmetry(p in any_params(), w in 0.01..3.0f64) {
        let sys = BogoliubovSystem::new(&p);
        let r = sys.zeta(c(w, 0.0), ZetaSignature::RETARDED).unwrap();
        let adv = sys.zeta(c(w, 0.0), ZetaSignature::ADVANCED).unwrap();
        prop_assert!((r.conj() - adv).norm() < 1e-12 * r.norm().max(1.0));
    }

    #[test]
    fn constant_term_carries_no_damping(p in any_params(), ba in bath(0.5), bb in bath(0.5)) {
        let z0 = BogoliubovSystem::new(&p).constant_term();
        let z1 = BogoliubovSystem::new(&p.with_baths(ba, bb)).zeta(c(0.0, 0.0), ZetaSignature::RETARDED).unwrap();
        prop_assert!((z0 - z1).norm() < 1e-14 * p.frequency_scale().powi(4).max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn roots_are_causal_and_small_residual(p in any_params()) {
        let set = open_eigenfrequencies(&p).unwrap();
        let sys = BogoliubovSystem::new(&p);
        for &r in set.roots() {
            prop_assert!(r.im <= 1e-10, "acausal root {}", r);
            let res = sys.zeta(r, ZetaSignature::RETARDED).unwrap().norm();
            prop_assert!(res <= 1e-9 * residual_scale(&sys, r).unwrap(), "residual {} at {}", res, r);
        }
    }

    #[test]
    fn roots_come_in_mirror_pairs(p in any_params()) {
        let set = open_eigenfrequencies(&p).unwrap();
        let scale = p.frequency_scale();
        for &r in set.roots() {
            let mirrored = -r.conj();
            prop_assert!(set.roots().iter().any(|q| (q - mirrored).norm() < 1e-8 * scale), "{:?}", set.roots());
        }
    }

    #[test]
    fn ohmic_routes_agree(p in ohmic_params()) {
        let a = ohmic_roots_companion(&p).unwrap();
        let mut b = ohmic_roots_dense(&p).unwrap().to_vec();
        let tol = 1e-10 * p.frequency_scale().max(1.0);
        for x in a {
            let k = (0..b.len()).min_by(|&i, &j| (b[i] - x).norm().total_cmp(&(b[j] - x).norm())).unwrap();
            let y = b.swap_remove(k);
            // A near-collision splits the pair by the square root of the
            // rounding error; allow for that explicitly.
            let sep = a.iter().filter(|&&z| z != x).map(|z| (z - x).norm()).fold(f64::INFINITY, f64::min);
            let tol = if sep < 1e-3 { tol.max(1e-7) } else { tol };
            prop_assert!((x - y).norm() < tol, "{} vs {}", x, y);
        }
    }

    #[test]
    fn lossless_roots_are_closed_pairs(wa in 0.5..2.0f64, wb in 0.5..2.0f64, t in 0.0..2.0f64) {
        let p = ModelParams::lossless(wa, wb, t * (wa * wb).sqrt() / 2.0).unwrap();
        let (lo, hi) = closed_eigenfrequencies(&p);
        let set = open_eigenfrequencies(&p).unwrap();
        for target in [lo, -lo, hi, -hi] {
            prop_assert!(set.roots().iter().any(|r| (r - c(target, 0.0)).norm() < 1e-12));
        }
    }

    #[test]
    fn critical_point_ignores_baths(wa in 0.5..2.0f64, wb in 0.5..2.0f64, ba in bath(1.0), bb in bath(1.0)) {
        let gc = (wa * wb).sqrt() / 2.0;
        let p = ModelParams::new(wa, wb, 0.0, ba, bb).unwrap();
        let bare = ModelParams::lossless(wa, wb, 0.0).unwrap();
        let got = locate_critical(&p, 0.0, 2.0 * gc).unwrap();
        prop_assert_eq!(got.to_bits(), locate_critical(&bare, 0.0, 2.0 * gc).unwrap().to_bits());
        prop_assert!((got - gc).abs() < 1e-12);
    }

    #[test]
    fn passivity(p in any_params(), w in 1e-3..4.0f64) {
        prop_assert!(s11(&p, w).unwrap().norm() <= 1.0 + 1e-9);
    }

    #[test]
    fn lossless_matter_port_reflects_fully(p in any_params(), w in 1e-3..4.0f64) {
        let p = p.with_baths(p.bath_a(), BathSpec::lossless());
        prop_assert!((s11(&p, w).unwrap().norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn scattering_matrix_is_unitary_and_reciprocal(p in any_params(), w in 1e-2..4.0f64) {
        prop_assume!(p.bath_a().gamma0() > 1e-3 && p.bath_b().gamma0() > 1e-3);
        let s = s_matrix(&p, w).unwrap();
        prop_assert!((s[(0, 0)] - s11(&p, w).unwrap()).norm() < 1e-12);
        prop_assert!((s[(0, 1)] - s[(1, 0)]).norm() < 1e-9);
        prop_assert!((s.adjoint() * s - nalgebra::Matrix2::identity()).norm() < 1e-10);
    }

    #[test]
    fn poles_are_eigenfrequencies(p in any_params()) {
        let set = open_eigenfrequencies(&p).unwrap();
        let sys = BogoliubovSystem::new(&p);
        for &r in set.roots() {
            prop_assert!(sys.zeta(r, ZetaSignature::RETARDED).unwrap().norm() < 1e-9 * residual_scale(&sys, r).unwrap());
        }
    }

    #[test]
    fn low_frequency_reflection_tends_to_one(p in params_with((bath(1.0), bath(1.0)))) {
        prop_assume!((p.lambda() - 1.0).abs() > 0.05);
        // The deviation is of order omega * gamma(omega) / zeta(0).
        let dev = |w: f64| (s11(&p, w).unwrap() - 1.0).norm();
        let sys = BogoliubovSystem::new(&p);
        let c0 = sys.constant_term().norm();
        let scale = sys.scale();
        let bound = |w: f64| 8.0 * w * (p.bath_a().rate(w) + p.bath_b().rate(w)) * scale * scale / c0;
        for w in [1e-6, 1e-9, 1e-12] {
            prop_assert!(dev(w) <= bound(w) + 1e-15, "{} > {} at {}", dev(w), bound(w), w);
        }
    }

    #[test]
    fn dispersive_coefficient_unit_modulus(p in any_params(), w in 1e-3..5.0f64) {
        prop_assert!((dispersive_output_coefficient(&p, w).unwrap().norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn variance_is_phase_independent(p in any_params(), theta in 0.0..6.3f64, psi in 0.0..6.3f64, w in 0.05..3.0f64) {
        prop_assume!(p.bath_a().gamma0() > 1e-3 && p.bath_b().gamma0() > 1e-3);
        let vals: Vec<f64> = (0..64)
            .map(|k| {
                let phi = k as f64 * std::f64::consts::TAU / 64.0;
                two_mode_variance(&p, &QuadratureSpec::new(phi, theta, psi, w).unwrap()).unwrap()
            })
            .collect();
        let (lo, hi) = vals.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
        prop_assert!(hi - lo < 1e-12);
        prop_assert!((lo - vacuum_variance(w)).abs() < 1e-10);
        let single = quadrature_variance(&p, &QuadratureSpec::single(0.0, w).unwrap()).unwrap();
        prop_assert!((single - vacuum_variance(w)).abs() < 1e-14);
    }

    #[test]
    fn minima_refinement_stays_in_bracket(xs in prop::collection::vec(0.0..1.0f64, 3..40)) {
        let probe: Vec<f64> = (0..xs.len()).map(|k| 0.1 + k as f64 * 0.01).collect();
        for m in find_minima(&probe, &xs) {
            prop_assert!(m >= probe[0] && m <= probe[probe.len() - 1]);
        }
    }
}

#[test]
fn phase_boundary_is_continuous() {
    // The soft root goes as |g - g_c|^(1/(1+s)), so a superohmic bath needs
    // a closer approach for the same bound.
    for (ga, gb, s, dg) in [(0.3, 0.2, 0.0, 1e-6), (0.3, 0.2, -0.5, 1e-6), (0.1, 0.4, 0.5, 1e-8)] {
        let p = ModelParams::new(1.0, 1.0, 0.0, BathSpec::new(ga, s).unwrap(), BathSpec::new(gb, s).unwrap()).unwrap();
        let below = open_eigenfrequencies(&p.with_g(0.5 - dg).unwrap()).unwrap();
        let above = open_eigenfrequencies(&p.with_g(0.5 + dg).unwrap()).unwrap();
        assert!((below.lower() - above.lower()).norm() < 1e-4, "{} {}", below.lower(), above.lower());
        assert!((below.upper() - above.upper()).norm() < 1e-4);
    }
}

#[test]
fn phase_data_is_continuous_at_the_boundary() {
    // Differences scale linearly with the offset from lambda = 1.
    let at = |eps: f64| {
        let g = (1.0 + eps).sqrt() / 2.0;
        derive_phase(&ModelParams::ohmic(1.0, 1.0, g, 0.1, 0.2).unwrap())
    };
    for eps in [1e-6, 1e-8] {
        let (l, r) = (at(-eps), at(eps));
        let diffs = [
            r.omega_b_tilde - l.omega_b_tilde,
            r.g_tilde - l.g_tilde,
            r.d_term - l.d_term,
            r.gamma_b_tilde_amp - l.gamma_b_tilde_amp,
            r.alpha_per_n - l.alpha_per_n,
            r.beta_per_n - l.beta_per_n,
        ];
        for d in diffs {
            assert!(d.abs() < 4.0 * eps, "{d} at {eps}");
        }
    }
}

#[test]
fn gap_interval_collapses_without_damping() {
    let grid: Vec<f64> = (0..=80).map(|k| 0.3 + 0.005 * k as f64).collect();
    let lossy = ModelParams::ohmic(1.0, 1.0, 0.0, 0.3, 0.2).unwrap();
    let flagged: Vec<f64> = sweep_eigenfrequencies(&lossy, SweepAxis::Coupling, &grid, Execution::Parallel)
        .unwrap()
        .iter()
        .filter(|b| b.is_gap())
        .map(|b| b.value)
        .collect();
    assert!(!flagged.is_empty());
    let (lo, hi) = (flagged[0], flagged[flagged.len() - 1]);
    // The split closes faster on the superradiant side, where the matter
    // port is damped less.
    assert!(lo < 0.5 && hi >= 0.5);
    let n = ((hi - lo) / 0.005).round() as usize + 1;
    assert_eq!(n, flagged.len(), "gap points are not contiguous");

    let closed = ModelParams::lossless(1.0, 1.0, 0.0).unwrap();
    let pts = sweep_eigenfrequencies(&closed, SweepAxis::Coupling, &grid, Execution::Sequential).unwrap();
    assert!(pts.iter().all(|b| !b.is_gap()));
}

#[test]
fn sweep_rejects_unsorted_grid() {
    let p = ModelParams::ohmic(1.0, 1.0, 0.0, 0.3, 0.2).unwrap();
    assert!(sweep_eigenfrequencies(&p, SweepAxis::Coupling, &[0.2, 0.1], Execution::Sequential).is_err());
}
