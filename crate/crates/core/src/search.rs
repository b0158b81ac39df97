//! Scans of the CH parameter over plate orientations and a deterministic
//! derivative-free optimizer over the four beam-splitter angles.
//!
//! The optimizer evaluates a coarse grid over `[0, 2pi)^4` and refines the
//! best grid point by cyclic coordinate-wise golden-section search. Each
//! `p_ij` is a quadratic form in `(cos theta, sin theta)` of every single
//! angle, so along one coordinate `S` is `c0 + c1 cos 2x + c2 sin 2x`, which
//! is unimodal on any bracket shorter than `pi`.

use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::azimuthal::{wrap_finite, Orientation, StepIndex};
use crate::ch::{ch_from_kernel, ThetaQuad};
use crate::coincidence::AzimuthalKernel;
use crate::{Error, Result};

/// Points per axis of the optimizer's coarse grid.
pub const COARSE_POINTS: usize = 9;

/// Default threshold for flagging strong violations.
pub const DEFAULT_THRESHOLD: f64 = 0.204;

const MAX_SWEEPS: usize = 10_000;
const GOLDEN: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThetaPolicy {
    FixedCanonical,
    OptimizePerPoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanGrid {
    pub alpha_steps: usize,
    pub beta_steps: usize,
    pub theta_policy: ThetaPolicy,
    pub threshold: f64,
    /// Common offset added to every grid orientation.
    pub origin: f64,
    /// Convergence tolerance of the optimizer (improvement of `S` per sweep).
    pub tol: f64,
}

impl Default for ScanGrid {
    fn default() -> Self {
        Self {
            alpha_steps: 17,
            beta_steps: 17,
            theta_policy: ThetaPolicy::FixedCanonical,
            threshold: DEFAULT_THRESHOLD,
            origin: 0.0,
            tol: 1e-9,
        }
    }
}

impl ScanGrid {
    pub fn validate(&self) -> Result<()> {
        if self.alpha_steps < 2 || self.beta_steps < 2 {
            return Err(Error::InvalidArgument("grid needs at least 2 steps per axis".into()));
        }
        if !self.threshold.is_finite() || !self.origin.is_finite() {
            return Err(Error::InvalidArgument("threshold and origin must be finite".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidArgument("tolerance must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub alpha: f64,
    pub beta: f64,
    pub thetas: ThetaQuad,
    pub s: f64,
    pub exceeds_threshold: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    /// Ordered by alpha index, then beta index.
    pub rows: Vec<ScanRow>,
    pub best: ScanRow,
}

impl ScanResult {
    pub fn exceeding(&self) -> impl Iterator<Item = &ScanRow> {
        self.rows.iter().filter(|r| r.exceeds_threshold)
    }
}

/// Evaluates `S` on the `alpha x beta` grid over `[0, 2pi)^2`. Grid points
/// are evaluated in parallel; the output order is fixed.
pub fn scan_alpha_beta(grid: &ScanGrid, step_index: StepIndex) -> Result<ScanResult> {
    grid.validate()?;
    let points: Vec<(usize, usize)> = (0..grid.alpha_steps)
        .flat_map(|i| (0..grid.beta_steps).map(move |j| (i, j)))
        .collect();

    let rows: Vec<ScanRow> = points
        .par_iter()
        .map(|&(i, j)| {
            let alpha = Orientation::new(grid.origin + TAU * i as f64 / grid.alpha_steps as f64)?;
            let beta = Orientation::new(grid.origin + TAU * j as f64 / grid.beta_steps as f64)?;
            let (thetas, s) = match grid.theta_policy {
                ThetaPolicy::FixedCanonical => {
                    let kernel = AzimuthalKernel::new(alpha, beta, step_index);
                    (ThetaQuad::CANONICAL, ch_from_kernel(&kernel, ThetaQuad::CANONICAL).s)
                }
                ThetaPolicy::OptimizePerPoint => optimize_thetas(alpha, beta, step_index, grid.tol)?,
            };
            Ok(ScanRow {
                alpha: alpha.angle(),
                beta: beta.angle(),
                thetas,
                s,
                exceeds_threshold: s > grid.threshold,
            })
        })
        .collect::<Result<_>>()?;

    // First maximum in row order, so ties resolve deterministically.
    let best = rows
        .iter()
        .copied()
        .reduce(|best, r| if r.s > best.s { r } else { best })
        .expect("grid is non-empty");
    Ok(ScanResult { rows, best })
}

/// Result of [`optimize_thetas`] including the coarse-grid starting value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Optimum {
    pub thetas: ThetaQuad,
    pub s: f64,
    pub coarse_s: f64,
    pub sweeps: usize,
}

/// Maximizes `S` over the four beam-splitter angles for fixed plates.
pub fn optimize_thetas(alpha: Orientation, beta: Orientation, step_index: StepIndex, tol: f64) -> Result<(ThetaQuad, f64)> {
    let opt = optimize_thetas_detailed(alpha, beta, step_index, tol)?;
    Ok((opt.thetas, opt.s))
}

pub fn optimize_thetas_detailed(
    alpha: Orientation,
    beta: Orientation,
    step_index: StepIndex,
    tol: f64,
) -> Result<Optimum> {
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let kernel = AzimuthalKernel::new(alpha, beta, step_index);
    let objective = |x: &[f64; 4]| ch_from_kernel(&kernel, ThetaQuad::from_array(*x)).s;

    let spacing = TAU / COARSE_POINTS as f64;
    let axis: Vec<f64> = (0..COARSE_POINTS).map(|k| k as f64 * spacing).collect();
    let mut best_x = [0.0; 4];
    let mut best_s = f64::NEG_INFINITY;
    for &a in &axis {
        for &ap in &axis {
            for &b in &axis {
                for &bp in &axis {
                    let x = [a, ap, b, bp];
                    let s = objective(&x);
                    if s > best_s {
                        best_s = s;
                        best_x = x;
                    }
                }
            }
        }
    }
    let coarse_s = best_s;

    // Golden-section brackets stay at the grid spacing; the per-coordinate
    // profile is unimodal there because spacing < pi.
    let xtol = 1e-12;
    let mut sweeps = 0;
    while sweeps < MAX_SWEEPS {
        sweeps += 1;
        let start = best_s;
        for coord in 0..4 {
            let center = best_x[coord];
            let profile = |t: f64| {
                let mut x = best_x;
                x[coord] = t;
                objective(&x)
            };
            let (t, s) = golden_section_max(profile, center - spacing, center + spacing, xtol);
            if s > best_s {
                best_s = s;
                best_x[coord] = t;
            }
        }
        if best_s - start < tol {
            break;
        }
    }

    Ok(Optimum {
        thetas: ThetaQuad::from_array(best_x.map(wrap_finite)),
        s: best_s,
        coarse_s,
        sweeps,
    })
}

/// Golden-section search for the maximum of a unimodal `f` on `[lo, hi]`.
pub fn golden_section_max<F>(f: F, mut lo: f64, mut hi: f64, xtol: f64) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    let mut x1 = hi - GOLDEN * (hi - lo);
    let mut x2 = lo + GOLDEN * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > xtol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + GOLDEN * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - GOLDEN * (hi - lo);
            f1 = f(x1);
        }
        if x1 >= x2 {
            break;
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}
