//! Simulation of a Clauser-Horne test on orbital-angular-momentum entangled
//! photon pairs.
//!
//! Each photon of a down-converted pair is sent through a Mach-Zehnder
//! interferometer carrying a spiral phase plate in each arm (the second plate
//! rotated by pi with respect to the first) and a variable-reflectivity output
//! beam splitter. Both outputs are coupled to single-mode fibers, which
//! projects the pair onto a four-dimensional two-photon space.
//!
//! The crate is organized bottom-up:
//!
//! * [`azimuthal`]: plate phase function and the azimuthal overlap integral,
//!   in closed form and by piecewise quadrature.
//! * [`interferometer`]: beam-splitter unitaries and per-arm amplitudes.
//! * [`coincidence`]: coincidence amplitudes `C_ij`, probabilities and the
//!   closed-form unnormalized probabilities.
//! * [`ch`]: the Clauser-Horne parameter `S`.
//! * [`montecarlo`]: finite-statistics counting runs and the estimate of `S`.
//! * [`search`]: scans and derivative-free optimization over the apparatus
//!   angles.
//! * [`validate`]: analytic-versus-quadrature oracle suites.
//!
//! ```
//! use oamch::azimuthal::Orientation;
//! use oamch::ch::{canonical_settings, ch_parameter};
//!
//! let alpha = Orientation::new(0.9).unwrap();
//! let result = ch_parameter(&canonical_settings(alpha));
//! assert!((result.s - (2f64.sqrt() - 1.0) / 2.0).abs() < 1e-12);
//! ```

pub mod azimuthal;
pub mod ch;
pub mod coincidence;
mod error;
pub mod interferometer;
pub mod montecarlo;
pub mod quadrature;
pub mod search;
pub mod validate;

pub use error::{Error, Result};
pub use num_complex::Complex64;

// The guide under `book/` is compiled as doc tests so its snippets stay in
// sync with the API.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/azimuthal.md")]
    mod azimuthal {}
    #[doc = include_str!("../../../book/src/interferometer.md")]
    mod interferometer {}
    #[doc = include_str!("../../../book/src/coincidence.md")]
    mod coincidence {}
    #[doc = include_str!("../../../book/src/clauser_horne.md")]
    mod clauser_horne {}
    #[doc = include_str!("../../../book/src/monte_carlo.md")]
    mod monte_carlo {}
    #[doc = include_str!("../../../book/src/search.md")]
    mod search {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
