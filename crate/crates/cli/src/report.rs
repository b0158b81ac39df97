use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use oamch::search::ScanResult;
use serde::{Deserialize, Serialize};

use crate::config::{RunConfig, SCHEMA_VERSION};
use crate::CliError;

/// Envelope of every JSON document the CLI emits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report<T> {
    pub schema_version: u32,
    pub inputs_echo: RunConfig,
    pub results: T,
}

impl<T: Serialize> Report<T> {
    pub fn new(inputs: &RunConfig, results: T) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            inputs_echo: inputs.clone(),
            results,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Formats `x` with 9 significant digits, like C's `%.9g`.
pub fn sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if !(-5..9).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        return format!("{mantissa}e{exp}");
    }
    let decimals = (8 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub const SCAN_HEADER: &str = "alpha,beta,theta_a,theta_a_prime,theta_b,theta_b_prime,S,exceeds_threshold";

pub fn scan_csv(result: &ScanResult) -> String {
    let mut out = String::with_capacity(64 * (result.rows.len() + 1));
    out.push_str(SCAN_HEADER);
    out.push('\n');
    for r in &result.rows {
        let t = r.thetas;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            sig9(r.alpha),
            sig9(r.beta),
            sig9(t.theta_a),
            sig9(t.theta_a_prime),
            sig9(t.theta_b),
            sig9(t.theta_b_prime),
            sig9(r.s),
            r.exceeds_threshold
        );
    }
    out
}

/// Writes `text` to `path`, or to stdout when no path is given.
pub fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Io(format!("cannot write to stdout: {e}")))
        }
    }
}

/// `scan.csv` -> `scan.summary.json`.
pub fn summary_path(csv: &Path) -> PathBuf {
    csv.with_extension("summary.json")
}
