use crate::conv::{box_convolve, spatial_convolve};
use crate::error::{Error, Result};
use crate::fft::{
    check_support, filter_2d, filter_along_axis, filter_pair_2d, filter_pair_along_axis, is_power_of_two,
    psf_spectrum_1d, psf_spectrum_2d, FourierPlan, Plan2D, C64,
};
use crate::image::Image;
use crate::psf::{Axis, Psf};

/// A blur operator `u ↦ u * h` together with its adjoint `v ↦ v * h*`.
pub trait BlurOperator: Send + Sync {
    fn blur(&self, u: &Image) -> Result<Image>;

    fn blur_adjoint(&self, v: &Image) -> Result<Image>;

    /// Adjoint applied to two images; Fourier realizations share one transform.
    fn blur_adjoint_pair(&self, a: &Image, b: &Image) -> Result<(Image, Image)> {
        Ok((self.blur_adjoint(a)?, self.blur_adjoint(b)?))
    }
}

/// Direct summation with constant continuation.
#[derive(Debug, Clone)]
pub struct SpatialBlur {
    psf: Psf,
    adjoint: Psf,
}

impl SpatialBlur {
    pub fn new(psf: &Psf) -> Self {
        Self {
            psf: psf.clone(),
            adjoint: psf.adjoint(),
        }
    }
}

impl BlurOperator for SpatialBlur {
    fn blur(&self, u: &Image) -> Result<Image> {
        spatial_convolve(u, &self.psf)
    }

    fn blur_adjoint(&self, v: &Image) -> Result<Image> {
        spatial_convolve(v, &self.adjoint)
    }
}

/// Sliding-window box filter with constant continuation.
#[derive(Debug, Clone)]
pub struct BoxBlur {
    psf: Psf,
    adjoint: Psf,
}

impl BoxBlur {
    pub fn new(psf: &Psf) -> Result<Self> {
        if !psf.is_box() {
            return Err(Error::invalid(format!("box convolver needs a uniform box PSF, got {psf}")));
        }
        Ok(Self {
            psf: psf.clone(),
            adjoint: psf.adjoint(),
        })
    }
}

impl BlurOperator for BoxBlur {
    fn blur(&self, u: &Image) -> Result<Image> {
        box_convolve(u, &self.psf)
    }

    fn blur_adjoint(&self, v: &Image) -> Result<Image> {
        box_convolve(v, &self.adjoint)
    }
}

/// Periodic convolution along the axis of a 1D PSF, one 1D FFT per line.
///
/// Only the length along the blur axis is fixed; any number of lines may be
/// processed, so column blocks of an image can be filtered independently.
#[derive(Debug, Clone)]
pub struct FourierBlur1D {
    axis: Axis,
    plan: FourierPlan,
    response: Vec<C64>,
}

impl FourierBlur1D {
    /// `line_len` is the image extent along the PSF axis.
    pub fn new(psf: &Psf, line_len: usize) -> Result<Self> {
        let axis = psf
            .axis()
            .ok_or_else(|| Error::invalid("1D Fourier convolver needs a 1D PSF"))?;
        if !is_power_of_two(line_len) {
            return Err(Error::invalid(format!(
                "image extent {line_len} along the blur axis is not a power of two"
            )));
        }
        let plan = FourierPlan::new(line_len)?;
        let response = psf_spectrum_1d(psf, &plan)?;
        Ok(Self { axis, plan, response })
    }

    pub fn axis(&self) -> Axis {
        self.axis
    }

    pub fn response(&self) -> &[C64] {
        &self.response
    }

    /// Applies `û = f̂ · conj(ĥ) / (|ĥ|² + K)` line by line.
    pub fn wiener(&self, f: &Image, k: f64) -> Result<Image> {
        check_k(k)?;
        let gain = wiener_gain(&self.response, k);
        filter_along_axis(&self.plan, f, self.axis, &gain, false)
    }
}

impl BlurOperator for FourierBlur1D {
    fn blur(&self, u: &Image) -> Result<Image> {
        filter_along_axis(&self.plan, u, self.axis, &self.response, false)
    }

    fn blur_adjoint(&self, v: &Image) -> Result<Image> {
        filter_along_axis(&self.plan, v, self.axis, &self.response, true)
    }

    fn blur_adjoint_pair(&self, a: &Image, b: &Image) -> Result<(Image, Image)> {
        filter_pair_along_axis(&self.plan, a, b, self.axis, &self.response, true)
    }
}

/// Periodic 2D convolution via the 2D FFT.
#[derive(Debug, Clone)]
pub struct FourierBlur2D {
    plan: Plan2D,
    response: Vec<C64>,
}

impl FourierBlur2D {
    pub fn new(psf: &Psf, width: usize, height: usize) -> Result<Self> {
        check_support(psf, width, height)?;
        let plan = Plan2D::new(width, height)?;
        let response = psf_spectrum_2d(psf, &plan)?.data;
        Ok(Self { plan, response })
    }

    pub fn response(&self) -> &[C64] {
        &self.response
    }

    pub fn wiener(&self, f: &Image, k: f64) -> Result<Image> {
        check_k(k)?;
        let gain = wiener_gain(&self.response, k);
        filter_2d(&self.plan, f, &gain, false)
    }
}

impl BlurOperator for FourierBlur2D {
    fn blur(&self, u: &Image) -> Result<Image> {
        filter_2d(&self.plan, u, &self.response, false)
    }

    fn blur_adjoint(&self, v: &Image) -> Result<Image> {
        filter_2d(&self.plan, v, &self.response, true)
    }

    fn blur_adjoint_pair(&self, a: &Image, b: &Image) -> Result<(Image, Image)> {
        filter_pair_2d(&self.plan, a, b, &self.response, true)
    }
}

pub(crate) fn check_k(k: f64) -> Result<()> {
    if k > 0.0 && k.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("Wiener constant K must be positive, got {k}")))
    }
}

fn wiener_gain(response: &[C64], k: f64) -> Vec<C64> {
    response.iter().map(|h| h.conj() / (h.norm_sqr() + k)).collect()
}

/// Concrete convolver selected by a deconvolution scenario.
#[derive(Debug, Clone)]
pub enum Convolver {
    Spatial(SpatialBlur),
    Box(BoxBlur),
    Fourier1D(FourierBlur1D),
    Fourier2D(FourierBlur2D),
}

impl BlurOperator for Convolver {
    fn blur(&self, u: &Image) -> Result<Image> {
        match self {
            Convolver::Spatial(op) => op.blur(u),
            Convolver::Box(op) => op.blur(u),
            Convolver::Fourier1D(op) => op.blur(u),
            Convolver::Fourier2D(op) => op.blur(u),
        }
    }

    fn blur_adjoint(&self, v: &Image) -> Result<Image> {
        match self {
            Convolver::Spatial(op) => op.blur_adjoint(v),
            Convolver::Box(op) => op.blur_adjoint(v),
            Convolver::Fourier1D(op) => op.blur_adjoint(v),
            Convolver::Fourier2D(op) => op.blur_adjoint(v),
        }
    }

    fn blur_adjoint_pair(&self, a: &Image, b: &Image) -> Result<(Image, Image)> {
        match self {
            Convolver::Spatial(op) => op.blur_adjoint_pair(a, b),
            Convolver::Box(op) => op.blur_adjoint_pair(a, b),
            Convolver::Fourier1D(op) => op.blur_adjoint_pair(a, b),
            Convolver::Fourier2D(op) => op.blur_adjoint_pair(a, b),
        }
    }
}
