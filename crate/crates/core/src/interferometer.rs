//! The Mach-Zehnder analyzers.
//!
//! A photon enters a 50/50 splitter, picks up the phase of a spiral phase
//! plate in each arm (orientations `chi` and `chi + pi`) and recombines on a
//! variable-reflectivity splitter with `t = cos(theta)`, `r = i sin(theta)`.
//! The net action on the plate-phase two-vector
//! `E(phi) = (e^{i f(chi, phi)}, e^{i f(chi + pi, phi)}) / sqrt(2)` is the
//! matrix returned by [`mz_unitary`]; photon `b` traverses conjugate plates,
//! which conjugates the exponents of `E` but not the splitter coefficients.

use std::f64::consts::{FRAC_1_SQRT_2, TAU};
use std::ops::Mul;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::azimuthal::{plate_phase, wrap_finite, Orientation, StepIndex};
use crate::{Error, Result};

/// Output port of an interferometer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Arm {
    One,
    Two,
}

impl Arm {
    pub const BOTH: [Arm; 2] = [Arm::One, Arm::Two];

    /// Zero-based position, for indexing 2x2 tables.
    pub fn index(self) -> usize {
        match self {
            Arm::One => 0,
            Arm::Two => 1,
        }
    }

    /// One-based label as used in the physics notation.
    pub fn label(self) -> u8 {
        self.index() as u8 + 1
    }
}

impl TryFrom<u8> for Arm {
    type Error = Error;

    fn try_from(v: u8) -> Result<Self> {
        match v {
            1 => Ok(Arm::One),
            2 => Ok(Arm::Two),
            _ => Err(Error::InvalidArgument(format!("arm must be 1 or 2, got {v}"))),
        }
    }
}

/// Angle of the variable beam splitter, canonicalized to `[0, 2pi)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct BeamSplitterAngle(f64);

impl BeamSplitterAngle {
    pub fn new(theta: f64) -> Result<Self> {
        if !theta.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "beam-splitter angle must be finite, got {theta}"
            )));
        }
        Ok(Self(wrap_finite(theta)))
    }

    pub fn radians(self) -> f64 {
        self.0
    }

    /// Transmission and reflection coefficients `(cos theta, i sin theta)`.
    pub fn coefficients(self) -> (Complex64, Complex64) {
        let (s, c) = self.0.sin_cos();
        (Complex64::new(c, 0.0), Complex64::new(0.0, s))
    }
}

impl TryFrom<f64> for BeamSplitterAngle {
    type Error = Error;

    fn try_from(v: f64) -> Result<Self> {
        Self::new(v)
    }
}

impl From<BeamSplitterAngle> for f64 {
    fn from(t: BeamSplitterAngle) -> f64 {
        t.0
    }
}

/// A 2x2 complex matrix known to be unitary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoByTwoUnitary {
    entries: [[Complex64; 2]; 2],
}

impl TwoByTwoUnitary {
    pub const IDENTITY: TwoByTwoUnitary = TwoByTwoUnitary {
        entries: [
            [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
        ],
    };

    /// Wraps `entries`, rejecting matrices whose `U U^dagger` deviates from
    /// the identity by more than `1e-12` in any entry.
    pub fn try_new(entries: [[Complex64; 2]; 2]) -> Result<Self> {
        let u = Self { entries };
        let defect = u.unitarity_defect();
        if defect > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "matrix is not unitary (max |U U^dagger - I| = {defect:e})"
            )));
        }
        Ok(u)
    }

    pub fn entries(&self) -> &[[Complex64; 2]; 2] {
        &self.entries
    }

    pub fn get(&self, row: Arm, col: Arm) -> Complex64 {
        self.entries[row.index()][col.index()]
    }

    pub fn adjoint(&self) -> Self {
        let e = &self.entries;
        Self {
            entries: [[e[0][0].conj(), e[1][0].conj()], [e[0][1].conj(), e[1][1].conj()]],
        }
    }

    pub fn apply(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        let e = &self.entries;
        [e[0][0] * v[0] + e[0][1] * v[1], e[1][0] * v[0] + e[1][1] * v[1]]
    }

    /// Largest entrywise modulus of `U U^dagger - I`.
    pub fn unitarity_defect(&self) -> f64 {
        let p = self.mul_raw(&self.adjoint());
        let mut worst: f64 = 0.0;
        for (r, row) in p.iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                let target = if r == c { 1.0 } else { 0.0 };
                worst = worst.max((v - target).norm());
            }
        }
        worst
    }

    fn mul_raw(&self, rhs: &Self) -> [[Complex64; 2]; 2] {
        let a = &self.entries;
        let b = &rhs.entries;
        let mut out = [[Complex64::default(); 2]; 2];
        for (r, row) in out.iter_mut().enumerate() {
            for (c, v) in row.iter_mut().enumerate() {
                *v = a[r][0] * b[0][c] + a[r][1] * b[1][c];
            }
        }
        out
    }
}

impl Mul for TwoByTwoUnitary {
    type Output = TwoByTwoUnitary;

    fn mul(self, rhs: Self) -> Self {
        Self {
            entries: self.mul_raw(&rhs),
        }
    }
}

/// Real rotation `[[cos, -sin], [sin, cos]]`.
pub fn rotation_matrix(theta: BeamSplitterAngle) -> TwoByTwoUnitary {
    mz_unitary(theta, 0.0, 0.0)
}

/// Rotation with azimuth-independent phases on the two arms:
/// `[[e^{i p1} cos, -e^{i p2} sin], [e^{i p1} sin, e^{i p2} cos]]`.
pub fn mz_unitary(theta: BeamSplitterAngle, aux_phase_1: f64, aux_phase_2: f64) -> TwoByTwoUnitary {
    let (s, c) = theta.0.sin_cos();
    let e1 = Complex64::cis(aux_phase_1);
    let e2 = Complex64::cis(aux_phase_2);
    TwoByTwoUnitary {
        entries: [[e1 * c, -e2 * s], [e1 * s, e2 * c]],
    }
}

/// One Mach-Zehnder analyzer. The second plate always sits at
/// `plate_orientation + pi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MzConfig {
    pub plate_orientation: Orientation,
    pub theta: BeamSplitterAngle,
    pub aux_phase_1: f64,
    pub aux_phase_2: f64,
    /// `false` for spiral phase plates (photon a), `true` for the
    /// complementary plates of photon b.
    pub conjugate_plates: bool,
    pub step_index: StepIndex,
}

impl MzConfig {
    pub fn new(
        plate_orientation: Orientation,
        theta: BeamSplitterAngle,
        conjugate_plates: bool,
        step_index: StepIndex,
    ) -> Self {
        Self {
            plate_orientation,
            theta,
            aux_phase_1: 0.0,
            aux_phase_2: 0.0,
            conjugate_plates,
            step_index,
        }
    }

    pub fn with_aux_phases(mut self, aux_phase_1: f64, aux_phase_2: f64) -> Self {
        self.aux_phase_1 = aux_phase_1;
        self.aux_phase_2 = aux_phase_2;
        self
    }

    pub fn second_plate(&self) -> Orientation {
        self.plate_orientation.opposite()
    }

    /// Both plate orientations as raw angles in `[0, 2pi)`.
    pub fn plates(&self) -> [f64; 2] {
        [self.plate_orientation.angle(), self.second_plate().angle()]
    }

    pub fn unitary(&self) -> TwoByTwoUnitary {
        mz_unitary(self.theta, self.aux_phase_1, self.aux_phase_2)
    }

    /// The plate-phase two-vector `E(phi)`.
    pub(crate) fn plate_vector(&self, phi: f64) -> [Complex64; 2] {
        let sign = if self.conjugate_plates { -1.0 } else { 1.0 };
        let l = self.step_index.value();
        self.plates()
            .map(|chi| Complex64::cis(sign * plate_phase(chi, phi, l)) * FRAC_1_SQRT_2)
    }
}

/// Azimuthal amplitude `A_arm(phi)` (or `B_arm(phi)` for conjugate plates)
/// at the output of the analyzer. `phi` is reduced into `[0, 2pi)`.
pub fn arm_amplitude(cfg: &MzConfig, arm: Arm, phi: f64) -> Complex64 {
    let phi = if (0.0..TAU).contains(&phi) { phi } else { wrap_finite(phi) };
    cfg.unitary().apply(cfg.plate_vector(phi))[arm.index()]
}
