use std::fmt::Write as _;

use oamch::ch::{ch_parameter, ch_violated, marginal_probabilities, ChResult, Marginals, Violation};
use oamch::coincidence::{
    amplitude_matrix, closed_form_for, normalized_amplitudes, AmplitudeMatrix, ClosedFormProbabilities,
    ExperimentSettings,
};
use oamch::montecarlo::{estimate_s, run_ch_experiment, ChEstimate, CountRecord, RNG_ALGORITHM};
use oamch::search::{scan_alpha_beta, ScanRow};
use oamch::validate::{opposite_sign_overlap, run_suite, run_suite_with, Suite, SuiteReport};
use serde::{Deserialize, Serialize};

use crate::config::{self, Format, RunConfig};
use crate::report::{emit, scan_csv, sig9, summary_path, Report};
use crate::{CliError, Common};

fn load(common: &Common) -> Result<RunConfig, CliError> {
    config::load(common.config.as_deref(), &common.overrides)
}

fn format_of(common: &Common, cfg: &RunConfig, default: Format) -> Format {
    common.format.or(cfg.output.format).unwrap_or(default)
}

fn out_path(common: &Common, cfg: &RunConfig) -> Option<std::path::PathBuf> {
    common.out.clone().or_else(|| cfg.output.path.as_ref().map(Into::into))
}

fn lib_err(e: oamch::Error) -> CliError {
    CliError::Config(e.to_string())
}

fn text_only(format: Format, command: &str) -> Result<(), CliError> {
    if format == Format::Csv {
        return Err(CliError::Config(format!("{command} supports --format text or json")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeResults {
    pub settings: ExperimentSettings,
    pub amplitudes: AmplitudeMatrix,
    pub lambda_sq: [[f64; 2]; 2],
    pub marginals: Marginals,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub closed_form: Option<ClosedFormProbabilities>,
}

pub fn probe(common: &Common, closed_form: bool) -> Result<(), CliError> {
    let cfg = load(common)?;
    let format = format_of(common, &cfg, Format::Text);
    text_only(format, "probe")?;
    let settings = cfg.experiment_settings()?;
    let closed = if closed_form {
        Some(closed_form_for(&settings).map_err(lib_err)?)
    } else {
        None
    };
    let m = amplitude_matrix(&settings);
    let lambda = normalized_amplitudes(&m).map_err(lib_err)?;
    let results = ProbeResults {
        settings,
        amplitudes: m,
        lambda_sq: lambda.probabilities(),
        marginals: marginal_probabilities(&settings),
        closed_form: closed,
    };

    let text = match format {
        Format::Json => Report::new(&cfg, results).to_json(),
        _ => {
            let s = &results.settings;
            let mut t = String::new();
            let _ = writeln!(
                t,
                "alpha = {}  beta = {}  theta_a = {}  theta_b = {}  L = {}",
                sig9(s.alpha.angle()),
                sig9(s.beta.angle()),
                sig9(s.theta_a.radians()),
                sig9(s.theta_b.radians()),
                sig9(s.step_index.value())
            );
            let _ = writeln!(t, "(i,j)  p_ij             |lambda_ij|^2");
            for i in 0..2 {
                for j in 0..2 {
                    let _ = writeln!(
                        t,
                        "({},{})  {:<16} {}",
                        i + 1,
                        j + 1,
                        sig9(results.amplitudes.p[i][j]),
                        sig9(results.lambda_sq[i][j])
                    );
                }
            }
            let mg = &results.marginals;
            let _ = writeln!(t, "P(theta_a, inf) = {}", sig9(mg.a));
            let _ = writeln!(t, "P(inf, theta_b) = {}", sig9(mg.b));
            let _ = writeln!(t, "P(inf, inf)     = {}", sig9(mg.total));
            if let Some(cf) = &results.closed_form {
                let _ = writeln!(
                    t,
                    "closed form: P(theta_a, theta_b) = {}  P(theta_a, inf) = {}  P(inf, theta_b) = {}  P(inf, inf) = {}",
                    sig9(cf.joint),
                    sig9(cf.marginal_a),
                    sig9(cf.marginal_b),
                    sig9(cf.total)
                );
            }
            t
        }
    };
    emit(out_path(common, &cfg).as_deref(), &text)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChReport {
    pub result: ChResult,
    pub violation: Violation,
}

pub fn ch(common: &Common, assert_violation: bool) -> Result<(), CliError> {
    let cfg = load(common)?;
    let format = format_of(common, &cfg, Format::Text);
    text_only(format, "ch")?;
    let settings = cfg.ch_settings()?;
    let result = ch_parameter(&settings);
    let violation = ch_violated(&result);

    let text = match format {
        Format::Json => Report::new(&cfg, ChReport { result, violation }).to_json(),
        _ => {
            let th = settings.thetas();
            let mut t = String::new();
            let _ = writeln!(
                t,
                "alpha = {}  beta = {}  L = {}",
                sig9(settings.alpha.angle()),
                sig9(settings.beta.angle()),
                sig9(settings.step_index.value())
            );
            let _ = writeln!(
                t,
                "theta_a = {}  theta_a' = {}  theta_b = {}  theta_b' = {}",
                sig9(th.theta_a),
                sig9(th.theta_a_prime),
                sig9(th.theta_b),
                sig9(th.theta_b_prime)
            );
            let rows = [
                ("P(a, b)", result.p_joint[0]),
                ("P(a, b')", result.p_joint[1]),
                ("P(a', b)", result.p_joint[2]),
                ("P(a', b')", result.p_joint[3]),
                ("P(a', inf)", result.p_marg_a),
                ("P(inf, b)", result.p_marg_b),
                ("P(inf, inf)", result.p_total),
            ];
            for (name, v) in rows {
                let _ = writeln!(t, "{name:<12}= {}", sig9(v));
            }
            let _ = writeln!(t, "S = {:.7}", result.s);
            let _ = writeln!(
                t,
                "CH inequality S <= 0: {}",
                if violation.violated { "violated" } else { "satisfied" }
            );
            t
        }
    };
    emit(out_path(common, &cfg).as_deref(), &text)?;
    if assert_violation && !violation.violated {
        return Err(CliError::Assertion(format!("no CH violation: S = {:.7}", result.s)));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McReport {
    pub rng: String,
    pub runs: Vec<CountRecord>,
    pub estimate: ChEstimate,
    pub s_analytic: f64,
}

pub fn mc(common: &Common) -> Result<(), CliError> {
    let cfg = load(common)?;
    let format = format_of(common, &cfg, Format::Text);
    text_only(format, "mc")?;
    let settings = cfg.ch_settings()?;
    let mc = cfg.mc_config()?;
    let runs = run_ch_experiment(&settings, &mc).map_err(lib_err)?;
    let estimate = estimate_s(&runs).map_err(lib_err)?;
    let s_analytic = ch_parameter(&settings).s;

    let text = match format {
        Format::Json => Report::new(
            &cfg,
            McReport {
                rng: RNG_ALGORITHM.into(),
                runs: runs.to_vec(),
                estimate,
                s_analytic,
            },
        )
        .to_json(),
        _ => {
            let mut t = String::new();
            let _ = writeln!(t, "rng: {RNG_ALGORITHM}, seed {}", mc.seed);
            let _ = writeln!(
                t,
                "trials per run: {}  efficiencies: {} / {}",
                mc.trials,
                sig9(mc.efficiency_a),
                sig9(mc.efficiency_b)
            );
            let _ = writeln!(t, "run     N11      N12      N21      N22      none     F11          F12          F21          F22");
            for (rec, f) in runs.iter().zip(&estimate.frequencies) {
                let _ = writeln!(
                    t,
                    "{:<7} {:<8} {:<8} {:<8} {:<8} {:<8} {:<12} {:<12} {:<12} {}",
                    rec.setting_label.as_str(),
                    rec.n[0][0],
                    rec.n[0][1],
                    rec.n[1][0],
                    rec.n[1][1],
                    rec.no_coincidence,
                    sig9(f[0][0]),
                    sig9(f[0][1]),
                    sig9(f[1][0]),
                    sig9(f[1][1])
                );
            }
            let _ = writeln!(t, "S_hat = {:.7} +/- {:.7}", estimate.s_hat, estimate.stderr);
            let _ = writeln!(t, "S (exact) = {s_analytic:.7}");
            t
        }
    };
    emit(out_path(common, &cfg).as_deref(), &text)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanSummary {
    pub rows: usize,
    pub exceeding: usize,
    pub threshold: f64,
    pub best: ScanRow,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub summary: ScanSummary,
    pub rows: Vec<ScanRow>,
}

pub fn scan(common: &Common) -> Result<(), CliError> {
    let cfg = load(common)?;
    let format = format_of(common, &cfg, Format::Csv);
    let (grid, step) = cfg.scan_grid()?;
    let result = scan_alpha_beta(&grid, step).map_err(lib_err)?;
    let summary = ScanSummary {
        rows: result.rows.len(),
        exceeding: result.exceeding().count(),
        threshold: grid.threshold,
        best: result.best,
    };
    let out = out_path(common, &cfg);
    match format {
        Format::Json => {
            let report = Report::new(
                &cfg,
                ScanReport {
                    summary,
                    rows: result.rows.clone(),
                },
            );
            emit(out.as_deref(), &report.to_json())
        }
        Format::Csv | Format::Text => {
            let csv = scan_csv(&result);
            emit(out.as_deref(), &csv)?;
            let best = summary.best;
            match out {
                Some(p) => emit(Some(&summary_path(&p)), &Report::new(&cfg, summary).to_json()),
                None => {
                    eprintln!(
                        "best S = {} at alpha = {}, beta = {}; {} of {} points exceed {}",
                        sig9(best.s),
                        sig9(best.alpha),
                        sig9(best.beta),
                        summary.exceeding,
                        summary.rows,
                        sig9(summary.threshold)
                    );
                    Ok(())
                }
            }
        }
    }
}

pub fn validate(common: &Common, suites: &[String], inject_flipped_sign: bool) -> Result<(), CliError> {
    let cfg = load(common)?;
    let format = format_of(common, &cfg, Format::Text);
    text_only(format, "validate")?;
    let selected: Vec<Suite> = if suites.is_empty() {
        Suite::ALL.to_vec()
    } else {
        suites
            .iter()
            .map(|s| s.parse::<Suite>().map_err(lib_err))
            .collect::<Result<_, _>>()?
    };
    let reports: Vec<SuiteReport> = selected
        .iter()
        .map(|&s| {
            if inject_flipped_sign {
                run_suite_with(s, opposite_sign_overlap)
            } else {
                run_suite(s)
            }
        })
        .collect();

    let text = match format {
        Format::Json => Report::new(&cfg, reports.clone()).to_json(),
        _ => {
            let mut t = String::new();
            for r in &reports {
                let _ = writeln!(
                    t,
                    "[{}] {}: {} cases, max error {:.3e} (tol {:.0e}); {}",
                    if r.passed { "PASS" } else { "FAIL" },
                    r.suite,
                    r.cases,
                    r.max_error,
                    r.tolerance,
                    r.detail
                );
            }
            t
        }
    };
    emit(out_path(common, &cfg).as_deref(), &text)?;

    let failed: Vec<&SuiteReport> = reports.iter().filter(|r| !r.passed).collect();
    if let Some(worst) = failed.iter().max_by(|a, b| a.max_error.total_cmp(&b.max_error)) {
        let names: Vec<String> = failed.iter().map(|r| r.suite.to_string()).collect();
        return Err(CliError::Assertion(format!(
            "suite(s) failed: {}; worst discrepancy {:.3e} in {}",
            names.join(", "),
            worst.max_error,
            worst.suite
        )));
    }
    Ok(())
}
