use crate::deconv::lut::DivergenceLut;
use crate::deconv::operator::BlurOperator;
use crate::deconv::regularizer::diffusion_term;
use crate::error::{Error, Result};
use crate::image::Image;
use crate::params::{DataTerm, DeconvParams};

/// Lower guard for divisions by blurred iterates and RRRL denominators.
pub const DIVISION_GUARD: f64 = 1e-12;

fn require_positive(img: &Image, what: &str) -> Result<()> {
    match img.as_slice().iter().position(|&v| !(v > 0.0)) {
        None => Ok(()),
        Some(i) => Err(Error::contract(format!(
            "{what} must be strictly positive, found {} at pixel {i}",
            img.as_slice()[i]
        ))),
    }
}

/// One Richardson-Lucy update `u · ((f / (u*h)) * h*)`.
pub fn rl_step(u: &Image, f: &Image, op: &dyn BlurOperator) -> Result<Image> {
    u.check_same_shape(f, "RL step")?;
    require_positive(u, "RL iterate")?;
    require_positive(f, "RL observation")?;
    let blurred = op.blur(u)?;
    let ratio: Vec<f64> = f
        .as_slice()
        .iter()
        .zip(blurred.as_slice())
        .map(|(&fv, &b)| fv / b.max(DIVISION_GUARD))
        .collect();
    let ratio = Image::from_raw(u.width(), u.height(), ratio);
    let corr = op.blur_adjoint(&ratio)?;
    let out = u
        .as_slice()
        .iter()
        .zip(corr.as_slice())
        .map(|(&uv, &c)| uv * c)
        .collect();
    Ok(Image::from_raw(u.width(), u.height(), out))
}

/// Robust data weights `W = Φ'(r_f(b))` with `Φ(z) = √(z + ε²)`.
///
/// Pixels with `f < floor` use the limit `r_f(s) = s − f`.
pub fn robust_weight(f: &Image, b: &Image, lut: &DivergenceLut, eps_data: f64, floor: f64) -> Result<Image> {
    f.check_same_shape(b, "robust weight")?;
    require_positive(b, "blurred iterate")?;
    if !(eps_data > 0.0) {
        return Err(Error::invalid(format!("eps_data must be positive, got {eps_data}")));
    }
    Ok(robust_weight_unchecked(f, b, lut, eps_data, floor))
}

fn robust_weight_unchecked(f: &Image, b: &Image, lut: &DivergenceLut, eps_data: f64, floor: f64) -> Image {
    let eps2 = eps_data * eps_data;
    let w = f
        .as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(&fv, &bv)| {
            let r = if fv < floor { bv - fv } else { lut.divergence(fv, bv) };
            0.5 / (r.max(0.0) + eps2).sqrt()
        })
        .collect();
    Image::from_raw(f.width(), f.height(), w)
}

/// Intermediate fields of an RRRL iteration.
#[derive(Debug, Clone)]
pub struct SharpeningState {
    /// Current iterate `uᵏ`.
    pub iterate: Image,
    /// `uᵏ * h` from the most recent step.
    pub blurred: Image,
    /// Robust weights `Wᵏ`.
    pub weight: Image,
    /// Signed TV diffusion field `D(uᵏ)`.
    pub diffusion: Image,
    /// Smallest RRRL denominator seen before guarding, over all steps so far.
    pub min_denominator: f64,
}

impl SharpeningState {
    pub fn new(initial: Image) -> Result<Self> {
        require_positive(&initial, "initial iterate")?;
        let (w, h) = (initial.width(), initial.height());
        Ok(Self {
            iterate: initial,
            blurred: Image::zeros(w, h),
            weight: Image::zeros(w, h),
            diffusion: Image::zeros(w, h),
            min_denominator: f64::INFINITY,
        })
    }
}

/// Numerator and denominator of the sharpening part of an RRRL step,
/// `(W·f/(u*h)) * h*` and `W * h*`, plus `u*h` and `W`.
pub(crate) struct Sharpening {
    pub numerator: Image,
    pub denominator: Image,
    pub blurred: Image,
    pub weight: Image,
}

pub(crate) fn sharpening_terms(
    u: &Image,
    f: &Image,
    op: &dyn BlurOperator,
    lut: &DivergenceLut,
    params: &DeconvParams,
) -> Result<Sharpening> {
    let mut blurred = op.blur(u)?;
    for b in blurred.as_mut_slice() {
        *b = b.max(DIVISION_GUARD);
    }
    let weight = match params.data_term {
        DataTerm::Robust => robust_weight_unchecked(f, &blurred, lut, params.eps_data, params.floor),
        DataTerm::Identity => Image::filled(u.width(), u.height(), 1.0),
    };
    let ratio: Vec<f64> = weight
        .as_slice()
        .iter()
        .zip(f.as_slice())
        .zip(blurred.as_slice())
        .map(|((&w, &fv), &b)| w * fv / b)
        .collect();
    let ratio = Image::from_raw(u.width(), u.height(), ratio);
    let (numerator, denominator) = op.blur_adjoint_pair(&ratio, &weight)?;
    Ok(Sharpening {
        numerator,
        denominator,
        blurred,
        weight,
    })
}

/// `u · (num + α[D]₊) / (den − α[D]₋)`; returns the new iterate and the
/// smallest unguarded denominator.
pub(crate) fn combine(
    u: &Image,
    numerator: &Image,
    denominator: &Image,
    diffusion: Option<&Image>,
    alpha: f64,
) -> (Image, f64) {
    let mut min_den = f64::INFINITY;
    let out: Vec<f64> = match diffusion {
        Some(d) if alpha > 0.0 => u
            .as_slice()
            .iter()
            .zip(numerator.as_slice())
            .zip(denominator.as_slice())
            .zip(d.as_slice())
            .map(|(((&uv, &n), &dn), &dv)| {
                // [z]₊ = ½(z + |z|), [z]₋ = ½(z − |z|)
                let pos = 0.5 * (dv + dv.abs());
                let neg = 0.5 * (dv - dv.abs());
                let den = dn - alpha * neg;
                min_den = min_den.min(den);
                uv * (n + alpha * pos) / den.max(DIVISION_GUARD)
            })
            .collect(),
        _ => u
            .as_slice()
            .iter()
            .zip(numerator.as_slice())
            .zip(denominator.as_slice())
            .map(|((&uv, &n), &dn)| {
                min_den = min_den.min(dn);
                uv * n / dn.max(DIVISION_GUARD)
            })
            .collect(),
    };
    (Image::from_raw(u.width(), u.height(), out), min_den)
}

/// One robust and regularized RL step, updating `state` in place.
pub fn rrrl_step(
    state: &mut SharpeningState,
    f: &Image,
    op: &dyn BlurOperator,
    lut: &DivergenceLut,
    params: &DeconvParams,
) -> Result<()> {
    state.iterate.check_same_shape(f, "RRRL step")?;
    require_positive(&state.iterate, "RRRL iterate")?;
    let s = sharpening_terms(&state.iterate, f, op, lut, params)?;
    let diffusion = if params.alpha > 0.0 {
        Some(diffusion_term(&state.iterate, params.eps_reg)?)
    } else {
        None
    };
    let (next, min_den) = combine(&state.iterate, &s.numerator, &s.denominator, diffusion.as_ref(), params.alpha);
    state.iterate = next;
    state.blurred = s.blurred;
    state.weight = s.weight;
    if let Some(d) = diffusion {
        state.diffusion = d;
    }
    state.min_denominator = state.min_denominator.min(min_den);
    Ok(())
}
