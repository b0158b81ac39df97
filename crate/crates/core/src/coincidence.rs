//! Two-photon coincidence amplitudes after the single-mode fibers.
//!
//! With the radial factor dropped, the amplitude for detector `i` of photon a
//! firing together with detector `j` of photon b is
//!
//! ```text
//! C_ij = sigma_ij * int_0^{2pi} A_i(phi) B_j(phi) dphi
//! ```
//!
//! Expanding `A_i B_j` over the four plate pairs turns the integral into
//! `C_ij = sigma_ij / 2 * sum_km Ua_ik Ub_jm I(alpha_k, beta_m, L)`, so the
//! four overlap integrals only depend on the plate orientations and can be
//! reused for every pair of beam-splitter angles (see [`AzimuthalKernel`]).

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::azimuthal::{overlap_raw, wrap_finite, Orientation, StepIndex};
use crate::interferometer::{arm_amplitude, Arm, BeamSplitterAngle, MzConfig, TwoByTwoUnitary};
use crate::quadrature;
use crate::{Error, Result};

/// Azimuth-independent phases `(a1, a2, b1, b2)` on the four arms.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct AuxPhases {
    pub a1: f64,
    pub a2: f64,
    pub b1: f64,
    pub b2: f64,
}

impl AuxPhases {
    pub fn is_zero(&self) -> bool {
        self.a1 == 0.0 && self.a2 == 0.0 && self.b1 == 0.0 && self.b2 == 0.0
    }
}

/// One full apparatus configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSettings {
    pub alpha: Orientation,
    pub beta: Orientation,
    pub theta_a: BeamSplitterAngle,
    pub theta_b: BeamSplitterAngle,
    pub step_index: StepIndex,
    #[serde(default)]
    pub aux_phases: AuxPhases,
}

impl ExperimentSettings {
    pub fn new(
        alpha: Orientation,
        beta: Orientation,
        theta_a: BeamSplitterAngle,
        theta_b: BeamSplitterAngle,
        step_index: StepIndex,
    ) -> Self {
        Self {
            alpha,
            beta,
            theta_a,
            theta_b,
            step_index,
            aux_phases: AuxPhases::default(),
        }
    }

    /// Convenience constructor from raw radians.
    pub fn from_radians(alpha: f64, beta: f64, theta_a: f64, theta_b: f64, step_index: StepIndex) -> Result<Self> {
        Ok(Self::new(
            Orientation::new(alpha)?,
            Orientation::new(beta)?,
            BeamSplitterAngle::new(theta_a)?,
            BeamSplitterAngle::new(theta_b)?,
            step_index,
        ))
    }

    pub fn with_aux_phases(mut self, aux_phases: AuxPhases) -> Self {
        self.aux_phases = aux_phases;
        self
    }

    /// `alpha - beta` wrapped into `(-pi, pi]`.
    pub fn delta(&self) -> f64 {
        wrap_delta(self.alpha.angle() - self.beta.angle())
    }

    pub fn mz_a(&self) -> MzConfig {
        MzConfig::new(self.alpha, self.theta_a, false, self.step_index)
            .with_aux_phases(self.aux_phases.a1, self.aux_phases.a2)
    }

    pub fn mz_b(&self) -> MzConfig {
        MzConfig::new(self.beta, self.theta_b, true, self.step_index)
            .with_aux_phases(self.aux_phases.b1, self.aux_phases.b2)
    }
}

/// Wraps an angle difference into `(-pi, pi]`.
pub fn wrap_delta(raw: f64) -> f64 {
    let w = wrap_finite(raw);
    if w > PI {
        w - TAU
    } else {
        w
    }
}

/// Coincidence amplitudes `C_ij` and probabilities `p_ij = |C_ij|^2`, both
/// without the radial constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeMatrix {
    pub c: [[Complex64; 2]; 2],
    pub p: [[f64; 2]; 2],
}

impl AmplitudeMatrix {
    pub fn from_amplitudes(c: [[Complex64; 2]; 2]) -> Self {
        let p = c.map(|row| row.map(|z| z.norm_sqr()));
        Self { c, p }
    }

    pub fn amplitude(&self, i: Arm, j: Arm) -> Complex64 {
        self.c[i.index()][j.index()]
    }

    pub fn probability(&self, i: Arm, j: Arm) -> f64 {
        self.p[i.index()][j.index()]
    }

    pub fn total(&self) -> f64 {
        self.p.iter().flatten().sum()
    }

    /// `p11 + p12`: photon a at detector 1, photon b anywhere.
    pub fn marginal_a(&self) -> f64 {
        self.p[0][0] + self.p[0][1]
    }

    /// `p11 + p21`: photon b at detector 1, photon a anywhere.
    pub fn marginal_b(&self) -> f64 {
        self.p[0][0] + self.p[1][0]
    }
}

/// Normalized two-photon amplitudes `lambda_ij` of the post-fiber state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalizedState {
    pub lambda: [[Complex64; 2]; 2],
}

impl NormalizedState {
    pub fn probabilities(&self) -> [[f64; 2]; 2] {
        self.lambda.map(|row| row.map(|z| z.norm_sqr()))
    }
}

/// The phase factor `sigma_ij = (3 - i - j) + i (3i + 3j - 2ij - 4)`.
pub fn sigma_coeff(i: Arm, j: Arm) -> Complex64 {
    let (i, j) = (i.label() as f64, j.label() as f64);
    Complex64::new(3.0 - i - j, 3.0 * i + 3.0 * j - 2.0 * i * j - 4.0)
}

/// The four overlap integrals `I(alpha_k, beta_m, L)` of one plate
/// configuration, from which `C_ij` follows for any beam-splitter angles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AzimuthalKernel {
    overlaps: [[Complex64; 2]; 2],
}

impl AzimuthalKernel {
    pub fn new(alpha: Orientation, beta: Orientation, step: StepIndex) -> Self {
        let a = [alpha.angle(), alpha.opposite().angle()];
        let b = [beta.angle(), beta.opposite().angle()];
        let overlaps = [
            [overlap_raw(a[0], b[0], step), overlap_raw(a[0], b[1], step)],
            [overlap_raw(a[1], b[0], step), overlap_raw(a[1], b[1], step)],
        ];
        Self { overlaps }
    }

    /// `I(alpha_k, beta_m)` with `k, m` indexing the plates of each analyzer.
    pub fn overlap(&self, k: Arm, m: Arm) -> Complex64 {
        self.overlaps[k.index()][m.index()]
    }

    /// `C = sigma o (Ua K Ub^T) / 2`.
    pub fn amplitudes(&self, ua: &TwoByTwoUnitary, ub: &TwoByTwoUnitary) -> AmplitudeMatrix {
        let a = ua.entries();
        let b = ub.entries();
        let k = &self.overlaps;
        let mut c = [[Complex64::default(); 2]; 2];
        for i in Arm::BOTH {
            // row i of Ua K
            let r0 = a[i.index()][0] * k[0][0] + a[i.index()][1] * k[1][0];
            let r1 = a[i.index()][0] * k[0][1] + a[i.index()][1] * k[1][1];
            for j in Arm::BOTH {
                let v = r0 * b[j.index()][0] + r1 * b[j.index()][1];
                c[i.index()][j.index()] = sigma_coeff(i, j) * v * 0.5;
            }
        }
        AmplitudeMatrix::from_amplitudes(c)
    }

    /// Probabilities for real rotations only (zero auxiliary phases).
    pub fn probabilities_at(&self, theta_a: f64, theta_b: f64) -> [[f64; 2]; 2] {
        let (sa, ca) = theta_a.sin_cos();
        let (sb, cb) = theta_b.sin_cos();
        let ra = [[ca, -sa], [sa, ca]];
        let rb = [[cb, -sb], [sb, cb]];
        let k = &self.overlaps;
        let mut p = [[0.0; 2]; 2];
        for i in 0..2 {
            let r0 = k[0][0] * ra[i][0] + k[1][0] * ra[i][1];
            let r1 = k[0][1] * ra[i][0] + k[1][1] * ra[i][1];
            for j in 0..2 {
                // |sigma_ij| = 1
                p[i][j] = 0.25 * (r0 * rb[j][0] + r1 * rb[j][1]).norm_sqr();
            }
        }
        p
    }
}

/// Analytic coincidence amplitudes.
pub fn amplitude_matrix(settings: &ExperimentSettings) -> AmplitudeMatrix {
    AzimuthalKernel::new(settings.alpha, settings.beta, settings.step_index)
        .amplitudes(&settings.mz_a().unitary(), &settings.mz_b().unitary())
}

/// Coincidence amplitudes by direct quadrature of
/// `Psi_ij(phi) = sigma_ij A_i(phi) B_j(phi)`, split at the four plate
/// dislocations.
pub fn amplitude_matrix_quadrature(settings: &ExperimentSettings) -> AmplitudeMatrix {
    let mz_a = settings.mz_a();
    let mz_b = settings.mz_b();
    let mut cuts = Vec::with_capacity(4);
    cuts.extend(mz_a.plates());
    cuts.extend(mz_b.plates());
    let rule = quadrature::default_rule();
    let mut c = [[Complex64::default(); 2]; 2];
    for i in Arm::BOTH {
        for j in Arm::BOTH {
            let integral = rule.integrate_piecewise(0.0, TAU, &cuts, |phi| {
                arm_amplitude(&mz_a, i, phi) * arm_amplitude(&mz_b, j, phi)
            });
            c[i.index()][j.index()] = sigma_coeff(i, j) * integral;
        }
    }
    AmplitudeMatrix::from_amplitudes(c)
}

/// `lambda_ij = C_ij / sqrt(sum |C_kl|^2)`.
pub fn normalized_amplitudes(m: &AmplitudeMatrix) -> Result<NormalizedState> {
    let norm = m.c.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 || !norm.is_finite() {
        return Err(Error::DegenerateState);
    }
    Ok(NormalizedState {
        lambda: m.c.map(|row| row.map(|z| z / norm)),
    })
}

/// Closed-form unnormalized probabilities for aligned-half-integer plates
/// with zero auxiliary phases.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormProbabilities {
    /// `P(theta_a, theta_b) = p11`
    pub joint: f64,
    /// `P(theta_a, inf) = p11 + p12`
    pub marginal_a: f64,
    /// `P(inf, theta_b) = p11 + p21`
    pub marginal_b: f64,
    /// `P(inf, inf) = sum p_ij`
    pub total: f64,
}

/// Evaluates the closed-form probabilities as functions of the plate
/// difference `delta = alpha - beta` in `[-pi, pi]` and the two
/// beam-splitter angles.
pub fn closed_form_probabilities(delta: f64, theta_a: f64, theta_b: f64) -> Result<ClosedFormProbabilities> {
    if !theta_a.is_finite() || !theta_b.is_finite() {
        return Err(Error::InvalidArgument("beam-splitter angles must be finite".into()));
    }
    if !(-PI..=PI).contains(&delta) {
        return Err(Error::DeltaOutOfDomain { delta });
    }
    let d = delta;
    let d2 = d * d;
    let pi2 = PI * PI;
    let plus = (PI + d).abs();
    let minus = (PI - d).abs();

    let (sa, ca) = theta_a.sin_cos();
    let (sb, cb) = theta_b.sin_cos();
    let cos_diff2 = (theta_a - theta_b).cos().powi(2);

    let joint = d2 * cos_diff2 - 2.0 * PI * d.abs() * cos_diff2
        + sa * sa * (pi2 * sb * sb + cb * cb * (2.0 * pi2 + d2 - 2.0 * PI * (d + minus)))
        + ca * ca * (pi2 * cb * cb + sb * sb * (2.0 * pi2 + d2 - 2.0 * PI * (-d + plus)))
        + 0.5 * (2.0 * theta_a).sin() * (2.0 * theta_b).sin() * (PI * (plus + minus) - plus * minus);

    let base = 3.0 * pi2 + 2.0 * d2 - PI * (plus + 2.0 * d.abs() + minus);
    let swing = PI * (2.0 * d - plus + minus);
    let marginal_a = base + swing * (2.0 * theta_a).cos();
    let marginal_b = base + swing * (2.0 * theta_b).cos();
    let total = 6.0 * pi2 + 4.0 * d2 - 2.0 * PI * (plus + 2.0 * d.abs() + minus);

    Ok(ClosedFormProbabilities {
        joint,
        marginal_a,
        marginal_b,
        total,
    })
}

/// Closed-form probabilities for a full settings record, enforcing the
/// preconditions of the closed form (half-integer step index, zero auxiliary
/// phases) and wrapping `alpha - beta` into `(-pi, pi]`.
pub fn closed_form_for(settings: &ExperimentSettings) -> Result<ClosedFormProbabilities> {
    if !settings.step_index.is_half_integer() {
        return Err(Error::NotHalfInteger(settings.step_index.value()));
    }
    if !settings.aux_phases.is_zero() {
        return Err(Error::NonzeroAuxPhases);
    }
    closed_form_probabilities(
        settings.delta(),
        settings.theta_a.radians(),
        settings.theta_b.radians(),
    )
}
