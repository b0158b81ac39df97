//! Acceptance gate. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any criterion fails.

use std::f64::consts::TAU;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use oamch::azimuthal::{Orientation, StepIndex};
use oamch::ch::{canonical_settings, ch_from_kernel, ch_parameter, ThetaQuad};
use oamch::coincidence::{amplitude_matrix, normalized_amplitudes, AzimuthalKernel, ExperimentSettings};
use oamch::interferometer::{arm_amplitude, mz_unitary, Arm, BeamSplitterAngle, MzConfig};
use oamch::montecarlo::{estimate_s, run_ch_experiment, sample_run, McConfig, SettingLabel};
use oamch::search::{scan_alpha_beta, ScanGrid, ThetaPolicy};
use oamch::validate::{run_suite, Suite};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const S_MAX: f64 = 0.207_106_781_186_547_5; // (sqrt 2 - 1) / 2

struct Outcome {
    passed: bool,
    detail: String,
}

fn o(x: f64) -> Orientation {
    Orientation::new(x).unwrap()
}

fn bs(x: f64) -> BeamSplitterAngle {
    BeamSplitterAngle::new(x).unwrap()
}

fn maximum_violation() -> Outcome {
    let mut worst: f64 = 0.0;
    for k in 0..8 {
        let alpha = o(TAU * k as f64 / 8.0);
        let s = ch_parameter(&canonical_settings(alpha)).s;
        worst = worst.max((s - S_MAX).abs());
    }
    Outcome {
        passed: worst <= 1e-9,
        detail: format!("max |S - (sqrt2-1)/2| over 8 alphas = {worst:.2e} (tol 1e-9)"),
    }
}

fn aligned_reduction() -> Outcome {
    let mut worst: f64 = 0.0;
    let alpha = 0.7;
    for i in 0..32 {
        for j in 0..32 {
            let ta = TAU * i as f64 / 32.0;
            let tb = TAU * j as f64 / 32.0;
            let m = amplitude_matrix(&ExperimentSettings::from_radians(alpha, alpha, ta, tb, StepIndex::default()).unwrap());
            let total = m.total();
            worst = worst
                .max((m.p[0][0] / total - 0.5 * (ta - tb).cos().powi(2)).abs())
                .max((m.marginal_a() / total - 0.5).abs())
                .max((m.marginal_b() / total - 0.5).abs());
        }
    }
    Outcome {
        passed: worst <= 1e-9,
        detail: format!("32x32 grid, max deviation from cos^2/2 and 1/2 = {worst:.2e} (tol 1e-9)"),
    }
}

fn suite_outcome(suite: Suite) -> Outcome {
    let r = run_suite(suite);
    Outcome {
        passed: r.passed,
        detail: format!("{} cases, max error {:.2e} (tol {:.0e}); {}", r.cases, r.max_error, r.tolerance, r.detail),
    }
}

fn search_claim() -> Outcome {
    let grid = ScanGrid {
        alpha_steps: 33,
        beta_steps: 33,
        theta_policy: ThetaPolicy::OptimizePerPoint,
        ..ScanGrid::default()
    };
    let result = scan_alpha_beta(&grid, StepIndex::default()).unwrap();
    let best_off = result
        .rows
        .iter()
        .filter(|r| r.alpha != r.beta)
        .max_by(|a, b| a.s.total_cmp(&b.s))
        .unwrap();
    let count = result.rows.iter().filter(|r| r.alpha != r.beta && r.s > 0.204).count();
    Outcome {
        passed: count > 0,
        detail: format!(
            "{count} off-diagonal pairs with S > 0.204; best off-diagonal S = {:.7} at (alpha, beta) = ({:.4}, {:.4})",
            best_off.s, best_off.alpha, best_off.beta
        ),
    }
}

fn monte_carlo() -> Outcome {
    let cfg = canonical_settings(Orientation::ZERO);
    let mut passed = true;
    let mut parts = Vec::new();
    for eta in [1.0, 0.5] {
        let mc = McConfig::new(1_000_000, eta, eta, 20_240_601).unwrap();
        let est = estimate_s(&run_ch_experiment(&cfg, &mc).unwrap()).unwrap();
        let ok = (est.s_hat - S_MAX).abs() < 4.0 * est.stderr;
        passed &= ok;
        parts.push(format!("eta={eta}: S_hat = {:.5} +/- {:.5}", est.s_hat, est.stderr));
    }
    Outcome {
        passed,
        detail: format!("{} (bound 4 stderr)", parts.join("; ")),
    }
}

fn property_suites() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut angle = move || rng.random_range(0.0..TAU);
    let mut failures = Vec::new();
    let (mut arm_norm, mut unitarity, mut lambda_norm, mut marginal, mut rotation) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);

    for k in 0..500 {
        let step = StepIndex::half_integer(k % 4);
        let cfg = MzConfig::new(o(angle()), bs(angle()), k % 2 == 0, step).with_aux_phases(angle(), angle());
        let phi = angle();
        let n = arm_amplitude(&cfg, Arm::One, phi).norm_sqr() + arm_amplitude(&cfg, Arm::Two, phi).norm_sqr();
        arm_norm = arm_norm.max((n - 1.0).abs());
        unitarity = unitarity.max(mz_unitary(bs(angle()), angle(), angle()).unitarity_defect());

        let (alpha, beta, ta, tb, tb2, ta2, shift) = (angle(), angle(), angle(), angle(), angle(), angle(), angle());
        let m = |a: f64, b: f64, ta: f64, tb: f64| {
            amplitude_matrix(&ExperimentSettings::from_radians(a, b, ta, tb, step).unwrap())
        };
        let base = m(alpha, beta, ta, tb);
        let lam = normalized_amplitudes(&base).unwrap();
        lambda_norm = lambda_norm.max((lam.probabilities().iter().flatten().sum::<f64>() - 1.0).abs());
        marginal = marginal
            .max((base.marginal_a() - m(alpha, beta, ta, tb2).marginal_a()).abs())
            .max((base.marginal_b() - m(alpha, beta, ta2, tb).marginal_b()).abs());
        let rotated = m(alpha + shift, beta + shift, ta, tb);
        for (x, y) in base.p.iter().flatten().zip(rotated.p.iter().flatten()) {
            rotation = rotation.max((x - y).abs());
        }
    }
    for (name, value, tol) in [
        ("arm-norm", arm_norm, 1e-12),
        ("unitarity", unitarity, 1e-12),
        ("sum|lambda|^2", lambda_norm, 1e-12),
        ("marginal theta-independence", marginal, 1e-10),
        ("joint rotation", rotation, 1e-10),
    ] {
        if value > tol {
            failures.push(format!("{name} {value:.2e} > {tol:.0e}"));
        }
    }

    let settings = ExperimentSettings::from_radians(0.4, 2.2, 0.9, 0.1, StepIndex::default()).unwrap();
    let mut conserved = true;
    for seed in 0..20u64 {
        let mc = McConfig::new(1_000 + 37 * seed, 0.6, 0.8, seed).unwrap();
        let rec = sample_run(&settings, &mc, SettingLabel::APrimeBPrime).unwrap();
        conserved &= rec.coincidences() + rec.no_coincidence == mc.trials;
    }
    if !conserved {
        failures.push("count conservation".into());
    }

    let cfg = canonical_settings(o(1.0));
    let mc = McConfig::new(100_000, 0.9, 0.7, 42).unwrap();
    let first = run_ch_experiment(&cfg, &mc).unwrap();
    let second = run_ch_experiment(&cfg, &mc).unwrap();
    let grid = ScanGrid {
        alpha_steps: 3,
        beta_steps: 3,
        theta_policy: ThetaPolicy::OptimizePerPoint,
        ..ScanGrid::default()
    };
    let scan_a = scan_alpha_beta(&grid, StepIndex::default()).unwrap();
    let scan_b = scan_alpha_beta(&grid, StepIndex::default()).unwrap();
    if first != second || scan_a != scan_b {
        failures.push("determinism".into());
    }

    Outcome {
        passed: failures.is_empty(),
        detail: if failures.is_empty() {
            format!(
                "arm-norm {arm_norm:.1e}, unitarity {unitarity:.1e}, sum|lambda|^2 {lambda_norm:.1e}, marginals {marginal:.1e}, rotation {rotation:.1e}, counts conserved, reruns identical"
            )
        } else {
            failures.join("; ")
        },
    }
}

fn grid_ceiling() -> Outcome {
    let alpha = o(0.3);
    let kernel = AzimuthalKernel::new(alpha, alpha, StepIndex::default());
    let axis: Vec<f64> = (0..16).map(|k| TAU * k as f64 / 16.0).collect();
    let mut best = f64::NEG_INFINITY;
    for &a in &axis {
        for &ap in &axis {
            for &b in &axis {
                for &bp in &axis {
                    best = best.max(ch_from_kernel(&kernel, ThetaQuad::from_array([a, ap, b, bp])).s);
                }
            }
        }
    }
    Outcome {
        passed: best <= 0.207_106_8 + 1e-6,
        detail: format!("max S over 16^4 grid = {best:.9} (ceiling 0.2071068 + 1e-6)"),
    }
}

fn main() -> ExitCode {
    type Criterion = (&'static str, Duration, fn() -> Outcome);
    let criteria: [Criterion; 8] = [
        ("1 maximum CH violation", Duration::from_secs(1), maximum_violation),
        ("2 aligned-plate reduction", Duration::from_secs(5), aligned_reduction),
        ("3 closed-form oracle equivalence", Duration::from_secs(30), || suite_outcome(Suite::AppendixA)),
        ("4 integral sign adjudication", Duration::from_secs(10), || suite_outcome(Suite::Sign)),
        ("5 search claim S > 0.204", Duration::from_secs(180), search_claim),
        ("6 Monte Carlo consistency", Duration::from_secs(60), monte_carlo),
        ("7 property suites", Duration::from_secs(60), property_suites),
        ("8 grid ceiling", Duration::from_secs(60), grid_ceiling),
    ];

    let mut all = true;
    for (name, budget, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= budget;
        let passed = outcome.passed && in_time;
        all &= passed;
        println!(
            "[{}] {name}: {} [{:.2}s, budget {}s{}]",
            if passed { "PASS" } else { "FAIL" },
            outcome.detail,
            elapsed.as_secs_f64(),
            budget.as_secs(),
            if in_time { "" } else { ", over budget" }
        );
    }
    if all {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: FAILED");
        ExitCode::FAILURE
    }
}
