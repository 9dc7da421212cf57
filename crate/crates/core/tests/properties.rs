use proptest::prelude::*;
use singlab_core::appendix_tables::{default_n_samples, default_p_samples, default_t_samples, verify_all};
use singlab_core::constants::{
    ell_star, gamma, general_order_constants, k0_hat, k0_product, lower_critical, upper_critical,
};
use singlab_core::cylinder_dynamics::{
    constant_state_map, equilibria, integrate, rhs_autonomous, shoot_to_equilibrium, stability_spectrum, Field,
    IntegratorConfig, Seed, State6,
};
use singlab_core::logpow::{apply, LogPowerExpr};
use singlab_core::operator_algebra::tri_laplacian_polar;
use singlab_core::pohozaev_lab::{constant_state_level, h_rad_autonomous, limit_level, monotonicity_check, LevelClass};
use singlab_core::profile_analysis::{aviles_leading_balance, kelvin_transform, profile_from_trajectory, Provenance, RadialProfile};
use singlab_core::rat::{q, qi, to_f64};
use singlab_core::cylinder_dynamics::Trajectory;
use singlab_core::{Params, Severity, Q};

fn gs_p(n: i64, frac: Q) -> Params {
    let lo = lower_critical(n);
    let hi = upper_critical(n) - qi(1);
    Params::new(n, &lo + (&hi - &lo) * frac).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn k0_sign_pattern(n in 7i64..16, k in 1i64..20) {
        let inside = gs_p(n, q(k, 20));
        prop_assert!(k0_product(&inside) > Q::from_integer(0.into()));
        prop_assert_eq!(k0_product(&Params::lower_critical(n).unwrap()), qi(0));
        prop_assert!(k0_product(&Params::upper_critical(n).unwrap()) > qi(0));
    }

    #[test]
    fn gamma_decreasing(a in 1i64..50, b in 1i64..50) {
        prop_assume!(a != b);
        let (pa, pb) = (qi(1) + q(a, 7), qi(1) + q(b, 7));
        let (ga, gb) = (gamma(&pa).unwrap(), gamma(&pb).unwrap());
        prop_assert_eq!(pa < pb, ga > gb);
    }

    #[test]
    fn order_three_factor_n(n in 7i64..30) {
        let c = general_order_constants(n, 3, &qi(3)).unwrap();
        prop_assert_eq!(&c.k0_hat_conjecture / k0_hat(n), qi(n));
    }

    #[test]
    fn tri_laplacian_kernel(n in 7i64..16, pick in 0usize..6) {
        let a = [0, 2, 4, 6 - n, 4 - n, 2 - n][pick];
        let out = apply(&tri_laplacian_polar(n), &LogPowerExpr::power(qi(a)), &qi(0)).unwrap();
        prop_assert!(out.is_zero());
    }

    #[test]
    fn constant_state_level_exact(num in -40i64..40, den in 1i64..8, pick in 0usize..3) {
        let (n, p) = [(9, 4), (7, 9), (12, 3)][pick];
        let prm = Params::new(n, qi(p)).unwrap();
        let c = q(num, den);
        let exact = constant_state_level(&prm, &c).unwrap();
        let h = h_rad_autonomous(&prm, &State6::constant(to_f64(&c)));
        prop_assert!((h - to_f64(&exact)).abs() <= 1e-12 * (1.0 + to_f64(&exact).abs()));
    }

    #[test]
    fn kelvin_exponent_map(g in 0.2f64..5.0, mu in 0.02f64..0.6, n in 7i64..14) {
        let p = RadialProfile::from_fn(|r| r.powf(-g), 1e-6, 0.95, 40, Provenance::Ansatz).unwrap();
        let k = kelvin_transform(&p, mu, n).unwrap();
        let e = (n - 6) as f64;
        for (r, u) in k.radii.iter().zip(&k.values) {
            let expect = mu.powf(e - 2.0 * g) * r.powf(g - e);
            prop_assert!((u / expect - 1.0).abs() < 1e-11);
        }
    }

    #[test]
    fn time_translation(tau in -3.0f64..3.0, a in -0.5f64..0.5) {
        let prm = Params::new(9, qi(4)).unwrap();
        let cfg = IntegratorConfig::default();
        let s0 = State6([1.0 + a, 0.1, -0.1 * a, 0.0, 0.05, 0.0]);
        let f = Field::autonomous(&prm);
        let base = integrate(&f, 0.0, s0, -1.0, &cfg).unwrap();
        let shifted = integrate(&f, tau, s0, tau - 1.0, &cfg).unwrap();
        for t in [-0.25, -0.5, -1.0] {
            let x = base.eval(t).unwrap();
            let y = shifted.eval(t + tau).unwrap();
            for j in 0..6 {
                prop_assert!((x.0[j] - y.0[j]).abs() <= 1e-7 * (1.0 + x.0[j].abs()));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn dual_path_on_random_trajectories(a in -0.3f64..0.3, b in -0.3f64..0.3, n in 8i64..11) {
        let prm = gs_p(n, q(1, 2));
        let v = *equilibria(&prm).unwrap().last().unwrap();
        let s0 = State6([v * (1.0 + a), b, a * b, 0.1 * a, -0.1 * b, 0.0]);
        let tr = integrate(&Field::autonomous(&prm), 0.0, s0, -1.0, &IntegratorConfig::with_tol(1e-11, 1e-13)).unwrap();
        let c = monotonicity_check(&prm, &tr, 200).unwrap();
        prop_assert!(c.max_scaled_corrected_mismatch <= 1e-6, "{}", c.max_scaled_corrected_mismatch);
    }
}

#[test]
fn ell_star_vanishes_at_lower_end() {
    for n in [7, 9, 12] {
        let lo = lower_critical(n);
        let mut last = f64::INFINITY;
        for k in [100, 10_000, 1_000_000] {
            let prm = Params::new(n, &lo + q(1, k)).unwrap();
            let l = ell_star(&prm).unwrap().to_f64();
            assert!(l > 0.0 && l < last);
            last = l;
        }
        assert!(last < 1e-3, "n = {n}: {last}");
    }
}

#[test]
fn fixed_points_are_equilibria() {
    for (n, p) in [(9, q(4, 1)), (10, q(5, 2)), (7, q(10, 1)), (12, q(5, 2))] {
        let prm = Params::new(n, p).unwrap();
        let eqs = equilibria(&prm).unwrap();
        // sign changes of the scalar map on c ≥ 0
        let mut roots = vec![0.0];
        let (mut c0, mut f0) = (1e-6, constant_state_map(&prm, 1e-6));
        for i in 1..=20000 {
            let c1 = 1e-6 * 10f64.powf(12.0 * i as f64 / 20000.0);
            let f1 = constant_state_map(&prm, c1);
            if f0.signum() != f1.signum() {
                let (mut lo, mut hi) = (c0, c1);
                for _ in 0..80 {
                    let m = 0.5 * (lo + hi);
                    if constant_state_map(&prm, m).signum() == f0.signum() { lo = m } else { hi = m }
                }
                roots.push(0.5 * (lo + hi));
            }
            c0 = c1;
            f0 = f1;
        }
        assert_eq!(roots.len(), eqs.len());
        for (r, e) in roots.iter().zip(&eqs) {
            assert!((r - e).abs() <= 1e-9 * (1.0 + e.abs()));
            let rhs = rhs_autonomous(&prm, &State6::constant(*e));
            assert!(rhs.iter().all(|x| x.abs() <= 1e-9 * (1.0 + e.powf(to_f64(prm.p())))));
        }
    }
}

#[test]
fn spectra_meet_residual_bound() {
    for n in 7..=12 {
        for k in 1..=3 {
            let prm = gs_p(n, q(k, 4));
            let v = *equilibria(&prm).unwrap().last().unwrap();
            let s = stability_spectrum(&prm, v).unwrap();
            assert_eq!(s.roots.len(), 6);
            for (z, r) in s.roots.iter().zip(&s.residuals) {
                assert!(*r <= 1e-8 * (1.0 + z.norm()).powi(6));
            }
        }
    }
}

#[test]
fn shot_trajectories_reach_minus_ell_star() {
    for (n, k) in [(9, 1), (9, 2), (10, 2), (11, 3), (8, 2)] {
        let prm = gs_p(n, q(k, 4));
        let tr = shoot_to_equilibrium(&prm, &Seed::default(), 20.0, &IntegratorConfig::default()).unwrap();
        let lvl = limit_level(&prm, &tr).unwrap();
        assert_eq!(lvl.class, LevelClass::MinusEllStar, "({n}, {})", prm.p());
    }
}

#[test]
fn profile_round_trip() {
    let prm = Params::new(9, qi(4)).unwrap();
    let g = 2.0;
    let prof = RadialProfile::from_fn(|r| r.powf(-1.5) * (3.0 + r), 1e-8, 0.9, 120, Provenance::Ansatz).unwrap();
    let mut times: Vec<f64> = prof.radii.iter().map(|r| r.ln()).collect();
    let mut states: Vec<State6> = prof.radii.iter().zip(&prof.values).map(|(r, u)| State6([r.powf(g) * u, 0.0, 0.0, 0.0, 0.0, 0.0])).collect();
    times.reverse();
    states.reverse();
    let tr = Trajectory::from_samples(times, states, "samples").unwrap();
    let back = profile_from_trajectory(&prm, &tr).unwrap();
    assert_eq!(back.radii.len(), prof.radii.len());
    for (a, b) in back.values.iter().zip(&prof.values) {
        assert!((a / b - 1.0).abs() < 1e-13);
    }
}

#[test]
fn aviles_exponent_identities() {
    for n in 7..=20 {
        let b = aviles_leading_balance(n).unwrap();
        assert!(b.exponents_match, "n = {n}");
        assert_eq!(b.lhs_log_exponent, q(-n, 6));
        assert_eq!(b.leading_coefficient, k0_hat(n));
    }
}

#[test]
fn verify_all_is_deterministic_and_certifies() {
    let run = || {
        let r = verify_all(&default_n_samples(), &default_p_samples(), &default_t_samples()).unwrap();
        serde_json::to_vec(&r).unwrap()
    };
    assert_eq!(run(), run());
    let r = verify_all(&default_n_samples(), &default_p_samples(), &default_t_samples()).unwrap();
    for v in &r.verdicts {
        if v.mismatches == 0 && v.samples >= v.required_samples && v.table != "pohozaev-p" {
            assert_eq!(v.verdict, Severity::CertifiedEqual, "{}/{}", v.table, v.entry);
        }
    }
}
