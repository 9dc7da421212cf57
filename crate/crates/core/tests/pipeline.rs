use singlab_core::appendix_tables::{
    default_n_samples, default_p_samples, default_t_samples, verify_all, KNOWN_DISCREPANCIES,
};
use singlab_core::cylinder_dynamics::{shoot_to_equilibrium, IntegratorConfig, Seed, Trajectory};
use singlab_core::pohozaev_lab::{
    aviles_probe, monotonicity_check, sign_profile, verify_monotonicity_identity_symbolic,
};
use singlab_core::profile_analysis::{fit_rate, profile_from_trajectory_on, FitModel};
use singlab_core::rat::qi;
use singlab_core::Params;

#[test]
fn discrepancies_match_documented_list() {
    let r = verify_all(&default_n_samples(), &default_p_samples(), &default_t_samples()).unwrap();
    let found = r.discrepant_entries();
    let documented: Vec<(String, String)> =
        KNOWN_DISCREPANCIES.iter().map(|(t, e)| (t.to_string(), e.to_string())).collect();
    assert_eq!(found, documented);
}

#[test]
fn shot_to_rate_pipeline() {
    let prm = Params::new(9, qi(4)).unwrap();
    let tr = shoot_to_equilibrium(&prm, &Seed::default(), 30.0, &IntegratorConfig::default()).unwrap();
    let shot = tr.shot.as_ref().unwrap();
    assert!(shot.terminal_distance <= 1e-6);
    assert!(!tr.increasing);

    let prof = profile_from_trajectory_on(&prm, &tr, 1e-10, 1e-4, 80).unwrap();
    let f = fit_rate(&prof, (1e-10, 1e-4), FitModel::PurePower).unwrap();
    assert!((f.exponent + 2.0).abs() < 1e-6);

    let json = serde_json::to_string(&f).unwrap();
    for key in ["exponent", "log_exponent", "constant", "residual_rms", "window"] {
        assert!(json.contains(key));
    }
}

#[test]
fn pohozaev_csv_and_trajectory_csv() {
    let prm = Params::new(9, qi(4)).unwrap();
    let tr = shoot_to_equilibrium(&prm, &Seed::default(), 10.0, &IntegratorConfig::default()).unwrap();
    let check = monotonicity_check(&prm, &tr, 64).unwrap();
    let mut buf = Vec::new();
    check.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("t,P,dP_numeric,dP_formula\n"));
    assert_eq!(text.lines().count(), 65);

    let mut buf = Vec::new();
    tr.write_csv(&mut buf).unwrap();
    let back = Trajectory::read_csv(&buf[..]).unwrap();
    assert_eq!(back.len(), tr.len());
    // sampled trajectories are not uniform: the stencil check refuses them
    assert!(monotonicity_check(&prm, &back, 64).is_err());
    let uniform = tr.resampled(&tr.uniform_grid(400)).unwrap();
    let c = monotonicity_check(&prm, &uniform, 64).unwrap();
    assert!(c.samples.len() >= 8);
}

#[test]
fn symbolic_identity_across_regimes() {
    for (n, p) in [(9, qi(4)), (10, qi(3)), (7, qi(10))] {
        let id = verify_monotonicity_identity_symbolic(&Params::new(n, p).unwrap()).unwrap();
        assert!(!id.leftover_nonlinear);
        // only the K3 transcription shows up
        assert!(id.residual_poly.len() <= 1, "{}", id.residual);
    }
}

#[test]
fn sign_profile_serialises() {
    let s = sign_profile(&Params::new(9, qi(4)).unwrap()).unwrap();
    let v: serde_json::Value = serde_json::to_value(&s).unwrap();
    assert_eq!(v["entries"].as_array().unwrap().len(), 6);
}

#[test]
fn aviles_probe_far_field() {
    for n in [7, 9, 10] {
        let p = aviles_probe(n, -1e8).unwrap();
        assert!((p.value - p.limit_with_half_weight).abs() <= 1e-4 * p.limit_with_half_weight.abs());
    }
}
