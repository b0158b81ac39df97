//! Spiral phase plate phase function and the azimuthal overlap integral.
//!
//! A plate with step index `L` rotated to orientation `chi` imprints the phase
//! `f(chi, phi) = L * ((phi - chi) mod 2pi)` on the azimuth `phi`: a linear
//! ramp with a `2 pi L` jump at the dislocation `phi = chi`. Every coincidence
//! amplitude of the apparatus reduces to the overlap
//!
//! ```text
//! I(mu, nu, L) = int_0^{2pi} exp(i [f(mu, phi) - f(nu, phi)]) dphi
//! ```
//!
//! which is evaluated here in closed form and, as an independent check, by
//! piecewise Gauss-Legendre quadrature.

use std::f64::consts::{PI, TAU};
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::quadrature;
use crate::{Error, Result};

/// Phase shift per unit azimuthal angle imposed by a spiral phase plate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct StepIndex {
    value: f64,
    half_integer_l: Option<u32>,
}

impl StepIndex {
    /// Accepts any finite positive value. Values of the form `l + 1/2` are
    /// recognized and take the half-integer fast paths.
    pub fn new(value: f64) -> Result<Self> {
        if !value.is_finite() || value <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "step index must be finite and positive, got {value}"
            )));
        }
        let shifted = value - 0.5;
        let half_integer_l = if shifted >= 0.0 && shifted.fract() == 0.0 && shifted <= u32::MAX as f64 {
            Some(shifted as u32)
        } else {
            None
        };
        Ok(Self {
            value,
            half_integer_l,
        })
    }

    /// The step index `l + 1/2`.
    pub fn half_integer(l: u32) -> Self {
        Self {
            value: l as f64 + 0.5,
            half_integer_l: Some(l),
        }
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    /// `Some(l)` when the step index equals `l + 1/2` exactly.
    pub fn half_integer_l(&self) -> Option<u32> {
        self.half_integer_l
    }

    pub fn is_half_integer(&self) -> bool {
        self.half_integer_l.is_some()
    }
}

impl Default for StepIndex {
    fn default() -> Self {
        Self::half_integer(0)
    }
}

impl TryFrom<f64> for StepIndex {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Self::new(value)
    }
}

impl From<StepIndex> for f64 {
    fn from(step: StepIndex) -> f64 {
        step.value
    }
}

/// An angle canonicalized to `[0, 2pi)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Orientation(f64);

impl Orientation {
    /// Same as [`wrap_angle`].
    pub fn new(raw: f64) -> Result<Self> {
        wrap_angle(raw)
    }

    pub const ZERO: Orientation = Orientation(0.0);

    pub fn angle(self) -> f64 {
        self.0
    }

    /// The orientation rotated by `pi`.
    pub fn opposite(self) -> Self {
        Self(wrap_finite(self.0 + PI))
    }

    /// The orientation rotated by `delta`.
    pub fn rotated(self, delta: f64) -> Result<Self> {
        wrap_angle(self.0 + delta)
    }
}

impl TryFrom<f64> for Orientation {
    type Error = Error;

    fn try_from(raw: f64) -> Result<Self> {
        wrap_angle(raw)
    }
}

impl From<Orientation> for f64 {
    fn from(o: Orientation) -> f64 {
        o.0
    }
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Reduces `raw` modulo `2pi` into `[0, 2pi)`.
pub fn wrap_angle(raw: f64) -> Result<Orientation> {
    if !raw.is_finite() {
        return Err(Error::InvalidArgument(format!("angle must be finite, got {raw}")));
    }
    Ok(Orientation(wrap_finite(raw)))
}

pub(crate) fn wrap_finite(raw: f64) -> f64 {
    let r = raw.rem_euclid(TAU);
    // rem_euclid rounds tiny negative inputs up to exactly 2pi.
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// The real phase `f(chi, phi)` for an azimuth `phi` in `[0, 2pi)`.
///
/// At `phi == chi` the branch for `phi > chi` is used, so the plate factor
/// has unit modulus everywhere.
#[inline]
pub(crate) fn plate_phase(chi: f64, phi: f64, step: f64) -> f64 {
    if phi < chi {
        step * (phi - chi) + TAU * step
    } else {
        step * (phi - chi)
    }
}

/// Phase factor `exp(i f(chi, phi))` imprinted by a plate at orientation
/// `chi` on the azimuth `phi`.
pub fn spp_phase(chi: Orientation, phi: Orientation, step: StepIndex) -> Complex64 {
    Complex64::cis(plate_phase(chi.0, phi.0, step.value))
}

/// Closed form of the azimuthal overlap `I(mu, nu, L)`.
///
/// For `mu >= nu` this is `e^{-iL(mu-nu)} [2pi - (1 - e^{i2piL})(mu - nu)]`;
/// the other ordering is the complex conjugate. For `L = l + 1/2` it reduces
/// to `2pi e^{-iL(mu-nu)} (1 - |mu - nu| / pi)`.
pub fn overlap_integral(mu: Orientation, nu: Orientation, step: StepIndex) -> Complex64 {
    overlap_raw(mu.0, nu.0, step)
}

#[inline]
pub(crate) fn overlap_raw(mu: f64, nu: f64, step: StepIndex) -> Complex64 {
    if mu < nu {
        return overlap_raw(nu, mu, step).conj();
    }
    let d = mu - nu;
    let l = step.value;
    if step.is_half_integer() {
        Complex64::cis(-l * d) * (TAU - 2.0 * d)
    } else {
        let bracket = Complex64::new(TAU, 0.0) - (Complex64::new(1.0, 0.0) - Complex64::cis(TAU * l)) * d;
        Complex64::cis(-l * d) * bracket
    }
}

/// Numerical evaluation of `I(mu, nu, L)` by Gauss-Legendre quadrature on the
/// segments between the dislocation angles.
pub fn overlap_integral_quadrature(mu: Orientation, nu: Orientation, step: StepIndex) -> Complex64 {
    let (m, n, l) = (mu.0, nu.0, step.value);
    quadrature::default_rule().integrate_piecewise(0.0, TAU, &[m, n], |phi| {
        Complex64::cis(plate_phase(m, phi, l) - plate_phase(n, phi, l))
    })
}

/// Normalized overlap `<S(a)|S(b)>` of the states prepared by plates at
/// orientations `a` and `b`; the radial factor cancels.
pub fn spp_state_overlap(a: Orientation, b: Orientation, step: StepIndex) -> Complex64 {
    overlap_integral(a, b, step) / TAU
}
