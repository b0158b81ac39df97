//! Finite-statistics counting runs.
//!
//! Each trial emits one photon pair. With detection efficiencies `eta_a`,
//! `eta_b` a coincidence is registered with probability `eta_a eta_b`, and
//! given a coincidence the detector pair `(i, j)` is drawn with probability
//! `p_ij / P(inf, inf)`. Four runs, one per choice of beam-splitter angles,
//! feed the estimate of `S`; the marginals are pooled from the same runs.
//!
//! Runs use ChaCha20 seeded with [`McConfig::seed`]; each of the four runs
//! reads its own ChaCha stream (stream number = run index), so a run's counts
//! do not depend on which other runs were simulated.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::ch::{s_parameter, ChSettings};
use crate::coincidence::{amplitude_matrix, ExperimentSettings};
use crate::{Error, Result};

/// Generator identification written into reports.
pub const RNG_ALGORITHM: &str = "ChaCha20 (rand_chacha 0.9, seed_from_u64, stream = run index)";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub trials: u64,
    pub efficiency_a: f64,
    pub efficiency_b: f64,
    pub seed: u64,
}

impl McConfig {
    pub fn new(trials: u64, efficiency_a: f64, efficiency_b: f64, seed: u64) -> Result<Self> {
        let cfg = Self {
            trials,
            efficiency_a,
            efficiency_b,
            seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidArgument("trials must be at least 1".into()));
        }
        for (name, eta) in [("efficiency_a", self.efficiency_a), ("efficiency_b", self.efficiency_b)] {
            if !(eta > 0.0 && eta <= 1.0) {
                return Err(Error::InvalidArgument(format!("{name} must lie in (0, 1], got {eta}")));
            }
        }
        Ok(())
    }
}

/// Which of the four CH measurement runs a record belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SettingLabel {
    #[serde(rename = "a,b")]
    AB,
    #[serde(rename = "a,b'")]
    ABPrime,
    #[serde(rename = "a',b")]
    APrimeB,
    #[serde(rename = "a',b'")]
    APrimeBPrime,
}

impl SettingLabel {
    pub const ALL: [SettingLabel; 4] = [
        SettingLabel::AB,
        SettingLabel::ABPrime,
        SettingLabel::APrimeB,
        SettingLabel::APrimeBPrime,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    /// `(primed_a, primed_b)`
    pub fn primes(self) -> (bool, bool) {
        match self {
            SettingLabel::AB => (false, false),
            SettingLabel::ABPrime => (false, true),
            SettingLabel::APrimeB => (true, false),
            SettingLabel::APrimeBPrime => (true, true),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SettingLabel::AB => "a,b",
            SettingLabel::ABPrime => "a,b'",
            SettingLabel::APrimeB => "a',b",
            SettingLabel::APrimeBPrime => "a',b'",
        }
    }
}

/// Counts of one run of `trials` pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountRecord {
    pub setting_label: SettingLabel,
    pub n: [[u64; 2]; 2],
    pub trials: u64,
    pub no_coincidence: u64,
}

impl CountRecord {
    pub fn coincidences(&self) -> u64 {
        self.n.iter().flatten().sum()
    }
}

/// Estimate of `S` from four runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChEstimate {
    pub s_hat: f64,
    pub stderr: f64,
    /// `F_ij` of each run, in [`SettingLabel::ALL`] order.
    pub frequencies: [[[f64; 2]; 2]; 4],
    /// Estimated `P(a,b), P(a,b'), P(a',b), P(a',b')`.
    pub p_joint: [f64; 4],
    pub p_marg_a: f64,
    pub p_marg_b: f64,
    pub p_total: f64,
}

/// Simulates one run. Deterministic in `(settings, mc, label)`.
pub fn sample_run(settings: &ExperimentSettings, mc: &McConfig, label: SettingLabel) -> Result<CountRecord> {
    mc.validate()?;
    let m = amplitude_matrix(settings);
    let total = m.total();
    if total <= 0.0 {
        return Err(Error::DegenerateState);
    }
    let eta = mc.efficiency_a * mc.efficiency_b;
    // Cumulative thresholds for (1,1), (1,2), (2,1), (2,2); the rest is loss.
    let mut cumulative = [0.0; 4];
    let mut acc = 0.0;
    for (slot, p) in cumulative.iter_mut().zip(m.p.iter().flatten()) {
        acc += eta * p / total;
        *slot = acc;
    }

    let mut rng = ChaCha20Rng::seed_from_u64(mc.seed);
    rng.set_stream(label.index() as u64);

    let mut counts = [0u64; 4];
    let mut none = 0u64;
    for _ in 0..mc.trials {
        let u: f64 = rng.random();
        match cumulative.iter().position(|&c| u < c) {
            Some(k) => counts[k] += 1,
            None => none += 1,
        }
    }
    Ok(CountRecord {
        setting_label: label,
        n: [[counts[0], counts[1]], [counts[2], counts[3]]],
        trials: mc.trials,
        no_coincidence: none,
    })
}

/// Simulates the four runs of a CH experiment.
pub fn run_ch_experiment(cfg: &ChSettings, mc: &McConfig) -> Result<[CountRecord; 4]> {
    let mut out = Vec::with_capacity(4);
    for label in SettingLabel::ALL {
        let (pa, pb) = label.primes();
        out.push(sample_run(&cfg.experiment(pa, pb), mc, label)?);
    }
    Ok(out.try_into().expect("four runs"))
}

/// `F_ij = N_ij / trials`.
pub fn frequency(rec: &CountRecord) -> Result<[[f64; 2]; 2]> {
    if rec.trials == 0 {
        return Err(Error::InvalidArgument("record has zero trials".into()));
    }
    let n = rec.trials as f64;
    Ok(rec.n.map(|row| row.map(|c| c as f64 / n)))
}

/// Estimates `S` from coincidence frequencies.
///
/// Joint terms take `F11` of the matching run; `P(a', inf)` pools `F11 + F12`
/// over the two `a'` runs, `P(inf, b)` pools `F11 + F21` over the two `b`
/// runs and `P(inf, inf)` pools all coincidences. The standard error is the
/// first-order (delta-method) propagation of the multinomial count
/// covariances of each run through the ratio.
pub fn estimate_s(runs: &[CountRecord; 4]) -> Result<ChEstimate> {
    for (rec, label) in runs.iter().zip(SettingLabel::ALL) {
        if rec.setting_label != label {
            return Err(Error::InvalidArgument(format!(
                "runs must be ordered (a,b), (a,b'), (a',b), (a',b'); found {} at position {}",
                rec.setting_label.as_str(),
                label.index()
            )));
        }
        if rec.trials == 0 {
            return Err(Error::InvalidArgument("record has zero trials".into()));
        }
        if rec.coincidences() + rec.no_coincidence != rec.trials {
            return Err(Error::InvalidArgument(format!(
                "counts of run {} do not add up to its trials",
                label.as_str()
            )));
        }
    }
    let frequencies = [
        frequency(&runs[0])?,
        frequency(&runs[1])?,
        frequency(&runs[2])?,
        frequency(&runs[3])?,
    ];

    let trials = runs.map(|r| r.trials as f64);
    let counts = runs.map(|r| r.n.map(|row| row.map(|c| c as f64)));

    let all_trials: f64 = trials.iter().sum();
    let all_coinc: f64 = counts.iter().flatten().flatten().sum();
    if all_coinc == 0.0 {
        return Err(Error::InsufficientStatistics("no coincidences in any run".into()));
    }

    // Runs 2, 3 carry a'; runs 0, 2 carry b.
    let a_runs = [2usize, 3];
    let b_runs = [0usize, 2];
    let a_trials: f64 = a_runs.iter().map(|&r| trials[r]).sum();
    let b_trials: f64 = b_runs.iter().map(|&r| trials[r]).sum();

    let p_joint = [0, 1, 2, 3].map(|r| frequencies[r][0][0]);
    let p_marg_a = a_runs.iter().map(|&r| counts[r][0][0] + counts[r][0][1]).sum::<f64>() / a_trials;
    let p_marg_b = b_runs.iter().map(|&r| counts[r][0][0] + counts[r][1][0]).sum::<f64>() / b_trials;
    let p_total = all_coinc / all_trials;
    let s_hat = s_parameter(p_joint, p_marg_a, p_marg_b, p_total);

    let joint_sign = [1.0, -1.0, 1.0, 1.0];
    let mut variance = 0.0;
    for r in 0..4 {
        let in_a = a_runs.contains(&r);
        let in_b = b_runs.contains(&r);
        // d(numerator)/d(n_x) and d(total)/d(n_x) for x = 11, 12, 21, 22.
        let mut dnum = [0.0; 4];
        dnum[0] = joint_sign[r] / trials[r];
        if in_a {
            dnum[0] -= 1.0 / a_trials;
            dnum[1] -= 1.0 / a_trials;
        }
        if in_b {
            dnum[0] -= 1.0 / b_trials;
            dnum[2] -= 1.0 / b_trials;
        }
        let dtot = 1.0 / all_trials;
        let grad = dnum.map(|d| (d - s_hat * dtot) / p_total);

        let n = trials[r];
        let probs = [counts[r][0][0], counts[r][0][1], counts[r][1][0], counts[r][1][1]].map(|c| c / n);
        let mean: f64 = grad.iter().zip(&probs).map(|(g, p)| g * p).sum();
        let second: f64 = grad.iter().zip(&probs).map(|(g, p)| g * g * p).sum();
        variance += n * (second - mean * mean).max(0.0);
    }

    Ok(ChEstimate {
        s_hat,
        stderr: variance.sqrt(),
        frequencies,
        p_joint,
        p_marg_a,
        p_marg_b,
        p_total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::azimuthal::StepIndex;

    fn aligned_zero() -> ExperimentSettings {
        ExperimentSettings::from_radians(0.0, 0.0, 0.0, 0.0, StepIndex::default()).unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(McConfig::new(0, 1.0, 1.0, 1).is_err());
        assert!(McConfig::new(1, 0.0, 1.0, 1).is_err());
        assert!(McConfig::new(1, 1.0, 1.2, 1).is_err());
        assert!(McConfig::new(1, f64::NAN, 1.0, 1).is_err());
        assert!(McConfig::new(1, 1.0, 1.0, 1).is_ok());
    }

    #[test]
    fn aligned_zero_only_diagonal_outcomes() {
        let mc = McConfig::new(20_000, 1.0, 1.0, 7).unwrap();
        let rec = sample_run(&aligned_zero(), &mc, SettingLabel::AB).unwrap();
        assert_eq!(rec.n[0][1], 0);
        assert_eq!(rec.n[1][0], 0);
        assert_eq!(rec.no_coincidence, 0);
        assert_eq!(rec.n[0][0] + rec.n[1][1], 20_000);
        // Binomial(20000, 1/2): sd = 70.7.
        assert!((rec.n[0][0] as f64 - 10_000.0).abs() < 5.0 * 70.8);
    }

    #[test]
    fn single_trial_single_count() {
        let mc = McConfig::new(1, 1.0, 1.0, 99).unwrap();
        let rec = sample_run(&aligned_zero(), &mc, SettingLabel::AB).unwrap();
        assert_eq!(rec.coincidences(), 1);
        assert_eq!(rec.no_coincidence, 0);
    }

    #[test]
    fn deterministic_given_seed() {
        let mc = McConfig::new(5_000, 0.8, 0.6, 42).unwrap();
        let s = ExperimentSettings::from_radians(0.2, 1.0, 0.3, 0.9, StepIndex::default()).unwrap();
        let a = sample_run(&s, &mc, SettingLabel::APrimeB).unwrap();
        let b = sample_run(&s, &mc, SettingLabel::APrimeB).unwrap();
        assert_eq!(a, b);
        let c = sample_run(&s, &mc, SettingLabel::AB).unwrap();
        assert_ne!(a.n, c.n);
    }

    #[test]
    fn frequency_examples() {
        let rec = CountRecord {
            setting_label: SettingLabel::AB,
            n: [[5, 0], [0, 0]],
            trials: 10,
            no_coincidence: 5,
        };
        assert_eq!(frequency(&rec).unwrap(), [[0.5, 0.0], [0.0, 0.0]]);
        let empty = CountRecord {
            n: [[0, 0], [0, 0]],
            no_coincidence: 10,
            ..rec
        };
        assert_eq!(frequency(&empty).unwrap(), [[0.0; 2]; 2]);
        let bad = CountRecord { trials: 0, ..empty };
        assert!(frequency(&bad).is_err());
    }

    #[test]
    fn estimate_requires_ordering_and_statistics() {
        let rec = |label| CountRecord {
            setting_label: label,
            n: [[0, 0], [0, 0]],
            trials: 10,
            no_coincidence: 10,
        };
        let runs = SettingLabel::ALL.map(rec);
        assert!(matches!(estimate_s(&runs), Err(Error::InsufficientStatistics(_))));
        let mut swapped = runs;
        swapped.swap(0, 1);
        assert!(matches!(estimate_s(&swapped), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn exact_frequencies_reproduce_s() {
        // Counts proportional to the exact probabilities give S exactly.
        let cfg = crate::ch::canonical_settings(Default::default());
        let exact = crate::ch::ch_parameter(&cfg);
        let scale = 1e9;
        let runs = SettingLabel::ALL.map(|label| {
            let (pa, pb) = label.primes();
            let m = amplitude_matrix(&cfg.experiment(pa, pb));
            let n = m.p.map(|row| row.map(|p| (p / m.total() * scale).round() as u64));
            let c: u64 = n.iter().flatten().sum();
            CountRecord {
                setting_label: label,
                n,
                trials: c,
                no_coincidence: 0,
            }
        });
        let est = estimate_s(&runs).unwrap();
        assert!((est.s_hat - exact.s).abs() < 1e-8);
        assert!(est.stderr > 0.0 && est.stderr < 1e-4);
    }
}
