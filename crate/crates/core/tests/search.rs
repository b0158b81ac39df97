use std::f64::consts::PI;

use oamch::azimuthal::{Orientation, StepIndex};
use oamch::ch::{s_parameter, ChSettings, ThetaQuad};
use oamch::coincidence::amplitude_matrix_quadrature;
use oamch::interferometer::BeamSplitterAngle;
use oamch::search::{optimize_thetas, optimize_thetas_detailed, scan_alpha_beta, ScanGrid, ThetaPolicy};

fn o(x: f64) -> Orientation {
    Orientation::new(x).unwrap()
}

fn quadrature_s(alpha: Orientation, beta: Orientation, step: StepIndex, t: ThetaQuad) -> f64 {
    let bs = |x| BeamSplitterAngle::new(x).unwrap();
    let cfg = ChSettings {
        theta_a: bs(t.theta_a),
        theta_a_prime: bs(t.theta_a_prime),
        theta_b: bs(t.theta_b),
        theta_b_prime: bs(t.theta_b_prime),
        alpha,
        beta,
        step_index: step,
    };
    let p = |pa, pb| amplitude_matrix_quadrature(&cfg.experiment(pa, pb)).p;
    let (ab, abp, apb, apbp) = (p(false, false), p(false, true), p(true, false), p(true, true));
    s_parameter(
        [ab[0][0], abp[0][0], apb[0][0], apbp[0][0]],
        apb[0][0] + apb[0][1],
        ab[0][0] + ab[1][0],
        ab.iter().flatten().sum(),
    )
}

#[test]
fn maximal_misalignment_cross_checked_by_quadrature() {
    let alpha = o(0.8);
    let beta = alpha.opposite();
    let step = StepIndex::default();
    let (thetas, s) = optimize_thetas(alpha, beta, step, 1e-9).unwrap();
    let q = quadrature_s(alpha, beta, step, thetas);
    assert!((s - q).abs() < 1e-8, "analytic {s} vs quadrature {q}");
}

#[test]
fn refinement_never_loses_to_coarse_grid() {
    for (a, b) in [(0.0, 0.0), (0.1, 2.0), (3.0, 0.4), (5.9, 5.7)] {
        let opt = optimize_thetas_detailed(o(a), o(b), StepIndex::default(), 1e-8).unwrap();
        assert!(opt.s >= opt.coarse_s);
    }
}

#[test]
fn small_misalignment_exceeds_threshold() {
    // delta = 2pi/33, the closest off-diagonal spacing of a 33-point grid.
    let (_, s) = optimize_thetas(o(2.0 * PI / 33.0), o(0.0), StepIndex::default(), 1e-10).unwrap();
    assert!(s > 0.204, "{s}");
}

#[test]
fn scan_is_invariant_under_joint_shift() {
    let base = ScanGrid {
        alpha_steps: 9,
        beta_steps: 7,
        ..ScanGrid::default()
    };
    let shifted = ScanGrid { origin: 0.77, ..base };
    let a = scan_alpha_beta(&base, StepIndex::default()).unwrap();
    let b = scan_alpha_beta(&shifted, StepIndex::default()).unwrap();
    for (x, y) in a.rows.iter().zip(&b.rows) {
        assert!((x.s - y.s).abs() < 1e-8);
    }
}

#[test]
fn optimized_scan_is_reproducible() {
    let grid = ScanGrid {
        alpha_steps: 4,
        beta_steps: 3,
        theta_policy: ThetaPolicy::OptimizePerPoint,
        ..ScanGrid::default()
    };
    let a = scan_alpha_beta(&grid, StepIndex::default()).unwrap();
    let b = scan_alpha_beta(&grid, StepIndex::default()).unwrap();
    assert_eq!(a, b);
    for row in &a.rows {
        assert!(row.s <= a.best.s);
    }
}

#[test]
fn half_pi_misalignment_admits_no_violation() {
    let alpha = o(0.3);
    let beta = o(0.3 + PI / 2.0);
    let (_, s) = optimize_thetas(alpha, beta, StepIndex::default(), 1e-10).unwrap();
    assert!(s.abs() < 1e-9, "S = {s}");
}
