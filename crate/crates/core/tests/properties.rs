//! Property tests for the core amplitude and sweep invariants.

use proptest::prelude::*;

use chiral_router::analysis::{contrast, contrast_ratio, find_peaks_fn};
use chiral_router::closed_form::{amplitudes_port1, amplitudes_port2};
use chiral_router::model::{AxisVar, Port, ScatteringContext, SystemParams};
use chiral_router::oracle::{amplitudes_oracle, build_system, solve};
use chiral_router::sweep::{run_sweep, Observable, SweepAxis, SweepSpec};
use chiral_router::Error;

const OMEGA_E: f64 = 100.0;

fn ctx(
    gamma2: f64,
    xi: f64,
    delta: f64,
    theta: f64,
    tau: f64,
    port: Port,
) -> ScatteringContext<f64> {
    let params = SystemParams::symmetric(OMEGA_E, xi, 1.0, gamma2, theta, tau).unwrap();
    ScatteringContext::new(params, OMEGA_E + xi + delta, port).unwrap()
}

fn draw_space() -> impl Strategy<Value = (f64, f64, f64, f64, f64)> {
    (
        0.0..5.0f64,
        0.0..10.0f64,
        -50.0..50.0f64,
        0.0..std::f64::consts::TAU,
        0.0..3.0f64,
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn conservation_holds_on_both_routes((g2, xi, delta, theta, tau) in draw_space()) {
        for port in [Port::Port1, Port::Port2] {
            let c = ctx(g2, xi, delta, theta, tau, port);
            let or = amplitudes_oracle(&c).unwrap();
            prop_assert!(or.conservation_residual() < 1e-10);
            let closed = match port {
                Port::Port1 => amplitudes_port1(&c),
                Port::Port2 => amplitudes_port2(&c),
            };
            match closed {
                Ok(cf) => prop_assert!(cf.conservation_residual() < 1e-10),
                Err(Error::DegeneratePoint { .. }) => {}
                Err(e) => return Err(TestCaseError::fail(format!("unexpected error: {e}"))),
            }
        }
    }

    #[test]
    fn closed_forms_match_the_solver((g2, xi, delta, theta, tau) in draw_space()) {
        for port in [Port::Port1, Port::Port2] {
            let c = ctx(g2, xi, delta, theta, tau, port);
            let closed = match port {
                Port::Port1 => amplitudes_port1(&c),
                Port::Port2 => amplitudes_port2(&c),
            };
            let cf = match closed {
                Ok(cf) => cf,
                Err(Error::DegeneratePoint { .. }) => continue,
                Err(e) => return Err(TestCaseError::fail(format!("unexpected error: {e}"))),
            };
            let or = amplitudes_oracle(&c).unwrap();
            for (x, y) in [
                (cf.t_a, or.t_a),
                (cf.r_a, or.r_a),
                (cf.t_b, or.t_b),
                (cf.r_b, or.r_b),
            ] {
                prop_assert!((x - y).norm() < 1e-9, "{x} vs {y}");
            }
        }
    }

    #[test]
    fn amplitudes_are_2pi_periodic_in_phi((g2, xi, delta, theta, tau) in draw_space()) {
        let a = ctx(g2, xi, delta, theta, tau, Port::Port1);
        let b = ctx(g2, xi, delta, theta + std::f64::consts::TAU, tau, Port::Port1);
        if let (Ok(aa), Ok(ab)) = (amplitudes_port1(&a), amplitudes_port1(&b)) {
            prop_assert!((aa.t_a - ab.t_a).norm() < 1e-10);
            prop_assert!((aa.r_a - ab.r_a).norm() < 1e-10);
            prop_assert!((aa.t_b - ab.t_b).norm() < 1e-10);
        }
    }

    #[test]
    fn unit_chirality_is_reciprocal((_g2, xi, delta, theta, tau) in draw_space()) {
        let c1 = ctx(1.0, xi, delta, theta, tau, Port::Port1);
        let c2 = ctx(1.0, xi, delta, theta, tau, Port::Port2);
        let (a1, _) = chiral_router::amplitudes(&c1).unwrap();
        let (a2, _) = chiral_router::amplitudes(&c2).unwrap();
        prop_assert!((a1.t_a.norm_sqr() - a2.t_a.norm_sqr()).abs() < 1e-12);
        prop_assert!((a1.r_a.norm_sqr() - a2.r_a.norm_sqr()).abs() < 1e-12);
        prop_assert!((a1.t_b.norm_sqr() - a2.t_b.norm_sqr()).abs() < 1e-12);
        prop_assert!((a1.r_b.norm_sqr() - a2.r_b.norm_sqr()).abs() < 1e-12);
    }

    #[test]
    fn port_swap_exchanges_coupling_rates((g2, xi, delta, theta, tau) in draw_space()) {
        prop_assume!(g2 > 1e-6);
        let epsilon = OMEGA_E + xi + delta;
        let fwd = ctx(g2, xi, delta, theta, tau, Port::Port2);
        let swapped_params =
            SystemParams::new(OMEGA_E, OMEGA_E, xi, g2, 1.0, theta, tau).unwrap();
        let swp = ScatteringContext::new(swapped_params, epsilon, Port::Port1).unwrap();
        let a_fwd = amplitudes_oracle(&fwd).unwrap();
        let a_swp = amplitudes_oracle(&swp).unwrap();
        prop_assert!((a_fwd.t_a - a_swp.t_a).norm() < 1e-12);
        prop_assert!((a_fwd.t_b - a_swp.t_b).norm() < 1e-12);
    }

    #[test]
    fn reflections_differ_only_by_phase_between_ports((g2, xi, delta, theta, tau) in draw_space()) {
        let c1 = ctx(g2, xi, delta, theta, tau, Port::Port1);
        let c2 = ctx(g2, xi, delta, theta, tau, Port::Port2);
        let r1 = amplitudes_oracle(&c1).unwrap().r_a;
        let r2 = amplitudes_oracle(&c2).unwrap().r_a;
        let phase = num_complex::Complex::from_polar(1.0, -2.0 * c1.phi);
        prop_assert!((r2 - phase * r1).norm() < 1e-10);
    }

    #[test]
    fn contrast_is_antisymmetric_and_bounded(t in 0.0..1.0f64, tt in 0.0..1.0f64) {
        let (i, _) = contrast_ratio(t, tt);
        let (j, _) = contrast_ratio(tt, t);
        prop_assert!((i + j).abs() < 1e-14);
        prop_assert!(i.abs() <= 1.0);
    }

    #[test]
    fn contrast_from_params_is_bounded((g2, xi, delta, theta, tau) in draw_space()) {
        let params = SystemParams::symmetric(OMEGA_E, xi, 1.0, g2, theta, tau).unwrap();
        match contrast(&params, OMEGA_E + xi + delta) {
            Ok(c) => {
                prop_assert!(c.i_a.abs() <= 1.0 + 1e-12);
                prop_assert!(c.i_b.abs() <= 1.0 + 1e-12);
            }
            Err(Error::SingularSystem { .. }) => {}
            Err(e) => return Err(TestCaseError::fail(format!("unexpected error: {e}"))),
        }
    }

    #[test]
    fn solver_residuals_stay_scaled((g2, xi, delta, theta, tau) in draw_space()) {
        for port in [Port::Port1, Port::Port2] {
            let c = ctx(g2, xi, delta, theta, tau, port);
            let sys = build_system(&c);
            let x = solve(&sys).unwrap();
            prop_assert!(sys.max_scaled_residual(&x) < 1e-12);
        }
    }

    #[test]
    fn csv_numbers_roundtrip(x in proptest::num::f64::NORMAL | proptest::num::f64::ZERO) {
        let printed = format!("{x}");
        let parsed: f64 = printed.parse().unwrap();
        prop_assert_eq!(parsed.to_bits(), x.to_bits());
    }
}

proptest! {
    // peak-search coverage is more expensive; fewer cases
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn peak_coverage_is_monotone_under_grid_doubling(cx in -0.8..0.8f64, cy in -0.8..0.8f64) {
        let f = move |x: f64, y: f64| 1.0 / (1.0 + (x - cx).powi(2) + (y - cy).powi(2));
        let tol = 1e-8;
        let coarse = find_peaks_fn(f, (-1.0, 1.0), (-1.0, 1.0), 16, tol).unwrap();
        let fine = find_peaks_fn(f, (-1.0, 1.0), (-1.0, 1.0), 32, tol).unwrap();
        prop_assert!(!coarse.is_empty() && !fine.is_empty());
        prop_assert!(fine[0].value >= coarse[0].value - tol);
    }
}

#[test]
fn resonance_sweep_reproduces_transparency_map() {
    // 201 x 201 grid over delta in [-10, 10], theta in [0, 2 pi]: the maximum
    // T_a cell is >= 0.999 and sits adjacent to (delta, theta) = (0, 0)
    let spec = SweepSpec {
        base: SystemParams::symmetric(OMEGA_E, 0.5, 1.0, 2.38, 0.0, 0.0).unwrap(),
        epsilon: OMEGA_E + 0.5,
        port: Port::Port1,
        x_axis: SweepAxis {
            var: AxisVar::Delta,
            min: -10.0,
            max: 10.0,
            n: 201,
        },
        y_axis: SweepAxis {
            var: AxisVar::Theta,
            min: 0.0,
            max: std::f64::consts::TAU,
            n: 201,
        },
        observables: vec![Observable::Ta, Observable::ConservationResidual],
    };
    let result = run_sweep(&spec).unwrap();
    assert_eq!(result.rows.len(), 201 * 201);
    let best = result
        .rows
        .iter()
        .filter(|r| r.values[0].is_finite())
        .max_by(|a, b| a.values[0].partial_cmp(&b.values[0]).unwrap())
        .unwrap();
    assert!(best.values[0] >= 0.999, "max T_a = {}", best.values[0]);
    let dx = 20.0 / 200.0;
    let dy = std::f64::consts::TAU / 200.0;
    let near_origin = best.x.abs() <= dx + 1e-12 && (best.y <= dy + 1e-12 || best.y >= std::f64::consts::TAU - dy - 1e-12);
    assert!(
        near_origin,
        "max T_a at ({}, {}) is not adjacent to (0, 0)",
        best.x, best.y
    );
    for row in &result.rows {
        if row.values[1].is_finite() {
            assert!(row.values[1] < 1e-8);
        }
    }
}

#[test]
fn tau_period_in_sweep_matches_4pi() {
    // at Delta = 0.5 the tau-period of every coefficient is 4 pi
    let period = 4.0 * std::f64::consts::PI;
    let spec = SweepSpec {
        base: SystemParams::symmetric(OMEGA_E, 0.5, 1.0, 2.38, 0.0, 0.0).unwrap(),
        epsilon: OMEGA_E + 0.5,
        port: Port::Port1,
        x_axis: SweepAxis {
            var: AxisVar::Tau,
            min: 0.0,
            max: 3.0,
            n: 100,
        },
        y_axis: SweepAxis {
            var: AxisVar::Delta,
            min: -0.5,
            max: 0.0,
            n: 2,
        },
        observables: vec![Observable::Ta, Observable::Tb],
    };
    let shifted = SweepSpec {
        x_axis: SweepAxis {
            var: AxisVar::Tau,
            min: period,
            max: 3.0 + period,
            n: 100,
        },
        ..spec.clone()
    };
    let a = run_sweep(&spec).unwrap();
    let b = run_sweep(&shifted).unwrap();
    for (ra, rb) in a.rows.iter().zip(&b.rows) {
        // the delta = 0 row has Delta = 0.5 exactly
        if ra.y == 0.0 {
            for (va, vb) in ra.values.iter().zip(&rb.values) {
                assert!((va - vb).abs() < 1e-10, "{va} vs {vb}");
            }
        }
    }
}
