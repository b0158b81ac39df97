//! The Clauser-Horne parameter.
//!
//! With unnormalized coincidence probabilities `P(theta_a, theta_b) = p11`,
//! `P(theta_a, inf) = p11 + p12`, `P(inf, theta_b) = p11 + p21` and
//! `P(inf, inf) = sum p_ij`,
//!
//! ```text
//! S = [P(a,b) - P(a,b') + P(a',b) + P(a',b') - P(a',inf) - P(inf,b)] / P(inf,inf)
//! ```
//!
//! and local realism requires `S <= 0`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::azimuthal::{Orientation, StepIndex};
use crate::coincidence::{amplitude_matrix, AzimuthalKernel, ExperimentSettings};
use crate::interferometer::BeamSplitterAngle;

/// Beam-splitter angles of one CH experiment, in the order
/// `(theta_a, theta_a', theta_b, theta_b')`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaQuad {
    pub theta_a: f64,
    pub theta_a_prime: f64,
    pub theta_b: f64,
    pub theta_b_prime: f64,
}

impl ThetaQuad {
    pub const CANONICAL: ThetaQuad = ThetaQuad {
        theta_a: 0.0,
        theta_a_prime: PI / 4.0,
        theta_b: PI / 8.0,
        theta_b_prime: 3.0 * PI / 8.0,
    };

    pub fn to_array(self) -> [f64; 4] {
        [self.theta_a, self.theta_a_prime, self.theta_b, self.theta_b_prime]
    }

    pub fn from_array(v: [f64; 4]) -> Self {
        Self {
            theta_a: v[0],
            theta_a_prime: v[1],
            theta_b: v[2],
            theta_b_prime: v[3],
        }
    }
}

/// A complete CH experiment: two choices per party plus the plate setup.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChSettings {
    pub theta_a: BeamSplitterAngle,
    pub theta_a_prime: BeamSplitterAngle,
    pub theta_b: BeamSplitterAngle,
    pub theta_b_prime: BeamSplitterAngle,
    pub alpha: Orientation,
    pub beta: Orientation,
    pub step_index: StepIndex,
}

impl ChSettings {
    pub fn thetas(&self) -> ThetaQuad {
        ThetaQuad {
            theta_a: self.theta_a.radians(),
            theta_a_prime: self.theta_a_prime.radians(),
            theta_b: self.theta_b.radians(),
            theta_b_prime: self.theta_b_prime.radians(),
        }
    }

    /// Settings for one of the four measurement runs.
    pub fn experiment(&self, primed_a: bool, primed_b: bool) -> ExperimentSettings {
        let ta = if primed_a { self.theta_a_prime } else { self.theta_a };
        let tb = if primed_b { self.theta_b_prime } else { self.theta_b };
        ExperimentSettings::new(self.alpha, self.beta, ta, tb, self.step_index)
    }
}

/// The six probabilities entering `S`, and `S` itself.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChResult {
    pub s: f64,
    /// `P(a,b), P(a,b'), P(a',b), P(a',b')`
    pub p_joint: [f64; 4],
    /// `P(a', inf)`
    pub p_marg_a: f64,
    /// `P(inf, b)`
    pub p_marg_b: f64,
    /// `P(inf, inf)`
    pub p_total: f64,
}

/// Outcome of the local-realism check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub violated: bool,
    /// `S` itself: the distance above the local bound `0`.
    pub margin: f64,
}

/// Marginals `(P(theta_a, inf), P(inf, theta_b), P(inf, inf))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Marginals {
    pub a: f64,
    pub b: f64,
    pub total: f64,
}

pub fn marginal_probabilities(settings: &ExperimentSettings) -> Marginals {
    let m = amplitude_matrix(settings);
    Marginals {
        a: m.marginal_a(),
        b: m.marginal_b(),
        total: m.total(),
    }
}

pub fn ch_parameter(cfg: &ChSettings) -> ChResult {
    let kernel = AzimuthalKernel::new(cfg.alpha, cfg.beta, cfg.step_index);
    ch_from_kernel(&kernel, cfg.thetas())
}

/// `S` and its ingredients for a precomputed plate kernel; used by the
/// optimizers, which evaluate many angle quadruples per plate setup.
pub fn ch_from_kernel(kernel: &AzimuthalKernel, t: ThetaQuad) -> ChResult {
    let ab = kernel.probabilities_at(t.theta_a, t.theta_b);
    let abp = kernel.probabilities_at(t.theta_a, t.theta_b_prime);
    let apb = kernel.probabilities_at(t.theta_a_prime, t.theta_b);
    let apbp = kernel.probabilities_at(t.theta_a_prime, t.theta_b_prime);

    let p_joint = [ab[0][0], abp[0][0], apb[0][0], apbp[0][0]];
    let p_marg_a = apb[0][0] + apb[0][1];
    let p_marg_b = ab[0][0] + ab[1][0];
    let p_total: f64 = ab.iter().flatten().sum();
    ChResult {
        s: s_parameter(p_joint, p_marg_a, p_marg_b, p_total),
        p_joint,
        p_marg_a,
        p_marg_b,
        p_total,
    }
}

/// The CH combination of six (possibly unnormalized) probabilities.
pub fn s_parameter(p_joint: [f64; 4], p_marg_a: f64, p_marg_b: f64, p_total: f64) -> f64 {
    (p_joint[0] - p_joint[1] + p_joint[2] + p_joint[3] - p_marg_a - p_marg_b) / p_total
}

/// Angles `(0, pi/4, pi/8, 3pi/8)` with aligned plates `beta = alpha`.
pub fn canonical_settings(alpha: Orientation) -> ChSettings {
    canonical_with_step(alpha, StepIndex::default())
}

pub fn canonical_with_step(alpha: Orientation, step_index: StepIndex) -> ChSettings {
    let t = ThetaQuad::CANONICAL;
    let bs = |x: f64| BeamSplitterAngle::new(x).expect("canonical angle is finite");
    ChSettings {
        theta_a: bs(t.theta_a),
        theta_a_prime: bs(t.theta_a_prime),
        theta_b: bs(t.theta_b),
        theta_b_prime: bs(t.theta_b_prime),
        alpha,
        beta: alpha,
        step_index,
    }
}

/// `S > 0` violates the CH inequality; `S = 0` sits on the bound.
pub fn ch_violated(r: &ChResult) -> Violation {
    Violation {
        violated: r.s > 0.0,
        margin: r.s,
    }
}
