mod support;

use proptest::prelude::*;
use support::oracle;
use twinch_core::*;

fn winch() -> WinchGeometry {
    WinchGeometry::new(5e-3, 20e-3, 0.1).unwrap()
}

#[test]
fn twist_contraction_matches_bisection_oracle() {
    let dx = twist_contraction(0.5, 1e-3, 300.0).unwrap();
    let x = oracle::twisted_length(0.5, 1e-3, 300.0).unwrap();
    assert!((dx - (0.5 - x)).abs() < 1e-9, "{dx} vs {}", 0.5 - x);
}

#[test]
fn loaded_rigid_state_matches_oracle() {
    let params = StringParams::rigid(0.5, 1e-3).unwrap();
    let load = LoadCondition::axial(20.0).unwrap();
    let s = solve_total_contraction(&params, &winch(), &load, 300.0, 0.0).unwrap();
    let expected = oracle::total_contraction(0.5, 1e-3, 300.0, 5e-3, 0.0).unwrap();
    // 1e-6 mm
    assert!((s.total_contraction - expected).abs() < 1e-9);
}

#[test]
fn stiff_string_lengthens_under_load() {
    let params = StringParams::new(0.5, 1e-3, Stiffness::Finite(60e3)).unwrap();
    let load = LoadCondition::axial(30.0).unwrap();
    let s = solve_total_contraction(&params, &winch(), &load, 0.0, 0.0).unwrap();
    assert!((s.contracted_length - 0.5005).abs() < 1e-15);
    assert_eq!(s.total_contraction, 0.0);
}

/// Analytic `dX/dtheta` from implicit differentiation of the cubic.
fn dx_dtheta(l_c: f64, r0: f64, theta: f64) -> f64 {
    let x = oracle::twisted_length(l_c, r0, theta).unwrap();
    -2.0 * theta * r0 * r0 * l_c / (3.0 * x * x - l_c * l_c)
}

#[test]
fn twist_ratio_matches_implicit_derivative() {
    let params = StringParams::rigid(0.5, 1e-3).unwrap();
    let load = LoadCondition::default();
    for theta in [10.0, 80.0, 150.0, 250.0] {
        let s = solve_total_contraction(&params, &winch(), &load, theta, 0.0).unwrap();
        let r = transmission_ratio(&s, &params, &winch(), &load).unwrap();
        let analytic = -dx_dtheta(0.5, 1e-3, theta);
        assert!(
            (r.twist - analytic).abs() < 1e-4 * analytic.abs(),
            "theta {theta}: {} vs {analytic}",
            r.twist
        );
    }
}

fn string_params() -> impl Strategy<Value = StringParams> {
    (0.2f64..1.0, 0.5e-3f64..2e-3, prop::option::of(1e4f64..1e6)).prop_map(|(l, r0, k)| {
        StringParams::new(l, r0, k.map_or(Stiffness::Rigid, Stiffness::Finite)).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn solver_agrees_with_oracle(
        params in string_params(),
        fx in 0.0f64..50.0,
        twist_frac in 0.0f64..0.9,
        payout_frac in 0.0f64..0.5,
    ) {
        let w = winch();
        let load = LoadCondition::axial(fx).unwrap();
        let phi = payout_frac * params.unloaded_length / w.winch_radius;
        let l_c = loaded_length(&params, &load, phi, w.winch_radius).unwrap();
        let theta = twist_frac * twist_limit(l_c, params.initial_radius, 0.0);
        let s = solve_total_contraction(&params, &w, &load, theta, phi).unwrap();
        let expected = oracle::total_contraction(l_c, params.initial_radius, theta, w.winch_radius, phi).unwrap();
        prop_assert!((s.total_contraction - expected).abs() < 1e-9,
            "{} vs {}", s.total_contraction, expected);

        // self-consistency of the returned state
        let rebuilt = s.contracted_length
            - (s.contracted_length.powi(2) - (s.theta_eff * s.variable_radius).powi(2)).sqrt()
            + w.winch_radius * s.phi_eff;
        prop_assert!((rebuilt - s.total_contraction).abs() < 1e-9);
        prop_assert!(s.total_length > 0.0 && s.total_length <= s.contracted_length);
        prop_assert!(s.theta_eff * s.variable_radius < s.contracted_length);
        if theta == 0.0 {
            prop_assert_eq!(s.variable_radius, params.initial_radius);
        } else {
            prop_assert!(s.variable_radius > params.initial_radius);
        }
    }

    #[test]
    fn pure_winch_is_exact(l in 0.2f64..1.0, r0 in 0.5e-3f64..2e-3, frac in -0.5f64..0.5) {
        let params = StringParams::rigid(l, r0).unwrap();
        let w = winch();
        let phi = frac * l / w.winch_radius;
        let s = solve_total_contraction(&params, &w, &LoadCondition::default(), 0.0, phi).unwrap();
        prop_assert!((s.total_contraction - w.winch_radius * phi).abs() < 1e-12);
    }

    #[test]
    fn contraction_monotone_in_both_angles(
        params in string_params(),
        twist_frac in 0.01f64..0.85,
        payout_frac in 0.0f64..0.45,
    ) {
        let w = winch();
        let load = LoadCondition::default();
        let phi = payout_frac * params.unloaded_length / w.winch_radius;
        let l_c = loaded_length(&params, &load, phi, w.winch_radius).unwrap();
        let theta = twist_frac * twist_limit(l_c, params.initial_radius, 0.0);
        let base = solve_total_contraction(&params, &w, &load, theta, phi).unwrap();
        let more_twist = solve_total_contraction(&params, &w, &load, theta * 1.02, phi).unwrap();
        let more_winch = solve_total_contraction(&params, &w, &load, theta, phi + 0.05).unwrap();
        prop_assert!(more_twist.total_contraction > base.total_contraction);
        prop_assert!(more_winch.total_contraction > base.total_contraction);
    }

    #[test]
    fn twist_displacement_grows_with_prior_winding(
        l in 0.3f64..1.0,
        r0 in 0.5e-3f64..2e-3,
        shallow in 0.0f64..0.2,
        extra in 0.01f64..0.25,
        twist_frac in 0.05f64..0.9,
    ) {
        let params = StringParams::rigid(l, r0).unwrap();
        let w = winch();
        let load = LoadCondition::default();
        let phi_a = shallow * l / w.winch_radius;
        let phi_b = (shallow + extra) * l / w.winch_radius;
        let l_c_b = loaded_length(&params, &load, phi_b, w.winch_radius).unwrap();
        let theta = twist_frac * twist_limit(l_c_b, r0, 0.01);
        let a = solve_total_contraction(&params, &w, &load, theta, phi_a).unwrap();
        let b = solve_total_contraction(&params, &w, &load, theta, phi_b).unwrap();
        prop_assert!(b.twist_contraction() > a.twist_contraction());
    }

    #[test]
    fn invalid_inputs_give_structured_errors(
        l_c in -1.0f64..2.0,
        r0 in -1e-3f64..3e-3,
        theta in -10.0f64..5000.0,
    ) {
        match solve_twisted_length(l_c, r0, theta, &SolverOptions::default()) {
            Ok(sol) => {
                prop_assert!(sol.length.is_finite() && sol.radius.is_finite());
                prop_assert!(sol.length > 0.0 && sol.length <= l_c);
            }
            Err(e) => prop_assert!(!e.to_string().is_empty()),
        }
        if let Ok(x) = contracted_length(l_c, r0, theta) {
            prop_assert!(x.is_finite() && x > 0.0 && x <= l_c);
        }
    }
}
