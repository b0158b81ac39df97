use oamch::azimuthal::{Orientation, StepIndex};
use oamch::ch::{canonical_settings, ch_parameter, ChSettings};
use oamch::coincidence::ExperimentSettings;
use oamch::interferometer::BeamSplitterAngle;
use oamch::montecarlo::{estimate_s, run_ch_experiment, sample_run, McConfig, SettingLabel};

const S_MAX: f64 = 0.207_106_781_186_547_5;

fn zero_angles(alpha: f64) -> ChSettings {
    let zero = BeamSplitterAngle::new(0.0).unwrap();
    ChSettings {
        theta_a: zero,
        theta_a_prime: zero,
        theta_b: zero,
        theta_b_prime: zero,
        ..canonical_settings(Orientation::new(alpha).unwrap())
    }
}

#[test]
fn loss_fraction_follows_binomial() {
    let s = ExperimentSettings::from_radians(0.3, 1.4, 0.2, 0.9, StepIndex::default()).unwrap();
    let mc = McConfig::new(1_000_000, 0.5, 0.5, 2024).unwrap();
    let rec = sample_run(&s, &mc, SettingLabel::AB).unwrap();
    let n = mc.trials as f64;
    let sigma = (n * 0.75 * 0.25).sqrt();
    let dev = (rec.no_coincidence as f64 - 0.75 * n).abs();
    assert!(dev < 5.0 * sigma, "deviation {dev} vs 5 sigma {}", 5.0 * sigma);
}

#[test]
fn canonical_estimate_within_four_stderr() {
    let cfg = canonical_settings(Orientation::ZERO);
    let mc = McConfig::new(200_000, 1.0, 1.0, 11).unwrap();
    let est = estimate_s(&run_ch_experiment(&cfg, &mc).unwrap()).unwrap();
    assert!((est.s_hat - S_MAX).abs() < 4.0 * est.stderr, "{est:?}");
}

#[test]
fn zero_angle_estimate_near_zero() {
    let cfg = zero_angles(1.3);
    assert!(ch_parameter(&cfg).s.abs() < 1e-15);
    let mc = McConfig::new(200_000, 0.8, 0.9, 5).unwrap();
    let est = estimate_s(&run_ch_experiment(&cfg, &mc).unwrap()).unwrap();
    assert!(est.s_hat.abs() < 4.0 * est.stderr, "{est:?}");
}

#[test]
fn stderr_shrinks_like_inverse_sqrt_n() {
    let cfg = canonical_settings(Orientation::new(0.4).unwrap());
    let mut previous = f64::INFINITY;
    for (k, trials) in [1_000u64, 10_000, 100_000, 1_000_000].into_iter().enumerate() {
        let mut errors = Vec::new();
        let mut stderr = 0.0;
        for seed in 0..6u64 {
            let mc = McConfig::new(trials, 1.0, 1.0, 1000 * k as u64 + seed).unwrap();
            let est = estimate_s(&run_ch_experiment(&cfg, &mc).unwrap()).unwrap();
            errors.push((est.s_hat - S_MAX).powi(2));
            stderr = est.stderr;
        }
        let rms = (errors.iter().sum::<f64>() / errors.len() as f64).sqrt();
        // stderr * sqrt(N) is roughly constant
        let scaled = stderr * (trials as f64).sqrt();
        assert!((0.3..3.0).contains(&scaled), "stderr*sqrt(N) = {scaled}");
        assert!(rms < 4.0 * stderr, "N={trials}: rms {rms} vs stderr {stderr}");
        assert!(stderr < previous);
        previous = stderr;
    }
}

#[test]
fn efficiency_cancels_in_mean() {
    let cfg = canonical_settings(Orientation::new(2.0).unwrap());
    let mean_and_err = |eta: f64| {
        let ests: Vec<_> = (0..50u64)
            .map(|seed| {
                let mc = McConfig::new(20_000, eta, eta, 77 + seed).unwrap();
                estimate_s(&run_ch_experiment(&cfg, &mc).unwrap()).unwrap()
            })
            .collect();
        let mean = ests.iter().map(|e| e.s_hat).sum::<f64>() / 50.0;
        let var = ests.iter().map(|e| e.stderr.powi(2)).sum::<f64>() / 50.0;
        (mean, (var / 50.0).sqrt())
    };
    let (m1, e1) = mean_and_err(1.0);
    let (m2, e2) = mean_and_err(0.5);
    let combined = (e1 * e1 + e2 * e2).sqrt();
    assert!((m1 - m2).abs() < 3.0 * combined, "{m1} vs {m2} (combined {combined})");
}

#[test]
fn four_runs_are_bit_identical_on_rerun() {
    let cfg = canonical_settings(Orientation::ZERO);
    let mc = McConfig::new(50_000, 0.7, 0.9, 42).unwrap();
    let a = run_ch_experiment(&cfg, &mc).unwrap();
    let b = run_ch_experiment(&cfg, &mc).unwrap();
    assert_eq!(a, b);
    let ea = estimate_s(&a).unwrap();
    let eb = estimate_s(&b).unwrap();
    assert_eq!(ea.s_hat.to_bits(), eb.s_hat.to_bits());
    assert_eq!(ea.stderr.to_bits(), eb.stderr.to_bits());
}
