//! Fast robust deconvolution of grey-value images degraded by a known,
//! space-invariant blur.
//!
//! The main pipeline ([`deconv::wr3l`]) runs a Wiener filter followed by a
//! few robust and regularized Richardson-Lucy (RRRL) iterations. For blurs
//! along a coordinate axis, convolutions use 1D FFTs or, for uniform box
//! kernels, a sliding-window filter whose cost does not depend on the
//! kernel length.
//!
//! ```
//! use wr3l::{deconv::{wr3l, Scenario}, psf::{Axis, Psf}, synth, DeconvParams};
//!
//! let sharp = synth::test_scene(64, 64);
//! let psf = Psf::uniform_box(Axis::Vertical, 9.0)?;
//! let blurred = synth::synth_blur(&sharp, &psf, true)?;
//! let restored = wr3l(&blurred, &psf, &DeconvParams::default(), Scenario::Box1D)?;
//! assert_eq!(restored.width(), 64);
//! # Ok::<(), wr3l::Error>(())
//! ```

pub mod bench;
pub mod cli;
pub mod conv;
pub mod deconv;
pub mod error;
pub mod fft;
pub mod image;
pub mod params;
pub mod pgm;
pub mod psf;
pub mod synth;

pub use error::{Error, Result};
pub use image::Image;
pub use params::{DataTerm, DeconvParams};
pub use psf::{Axis, Psf};
