//! Radix-2 FFT with precomputed twiddle tables and periodic convolution.
//!
//! Forward transforms are unnormalized; inverse transforms divide by `n`.
//! Real-valued data is handled by packing two real signals into the real and
//! imaginary parts of one complex transform and separating the results via
//! Hermitian symmetry.

use std::f64::consts::PI;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::image::Image;
use crate::psf::{Axis, Psf, PsfKind};

pub type C64 = Complex<f64>;

const MAX_LOG2: u32 = 20;

/// Precomputed tables for length-`n` transforms, `n` a power of two.
#[derive(Debug, Clone)]
pub struct FourierPlan {
    n: usize,
    /// `exp(−2πik/n)` for `k < n/2`.
    twiddles: Vec<C64>,
    bitrev: Vec<u32>,
}

pub fn plan_fft(n: usize) -> Result<FourierPlan> {
    FourierPlan::new(n)
}

pub fn is_power_of_two(n: usize) -> bool {
    n > 0 && n & (n - 1) == 0
}

impl FourierPlan {
    pub fn new(n: usize) -> Result<Self> {
        if !is_power_of_two(n) || n > 1 << MAX_LOG2 {
            return Err(Error::invalid(format!(
                "FFT length must be a power of two up to 2^{MAX_LOG2}, got {n}"
            )));
        }
        let bits = n.trailing_zeros();
        let twiddles = (0..n / 2)
            .map(|k| C64::from_polar(1.0, -2.0 * PI * k as f64 / n as f64))
            .collect();
        let bitrev = (0..n as u32)
            .map(|i| if bits == 0 { 0 } else { i.reverse_bits() >> (32 - bits) })
            .collect();
        Ok(Self { n, twiddles, bitrev })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    /// In-place unnormalized forward transform.
    pub fn forward(&self, data: &mut [C64]) {
        self.transform(data, false);
    }

    /// In-place inverse transform, scaled by `1/n`.
    pub fn inverse(&self, data: &mut [C64]) {
        self.transform(data, true);
        let scale = 1.0 / self.n as f64;
        for v in data.iter_mut() {
            *v *= scale;
        }
    }

    fn transform(&self, data: &mut [C64], inverse: bool) {
        let n = self.n;
        assert_eq!(data.len(), n, "transform length does not match plan");
        for i in 0..n {
            let j = self.bitrev[i] as usize;
            if i < j {
                data.swap(i, j);
            }
        }
        let mut len = 2;
        while len <= n {
            let half = len / 2;
            let step = n / len;
            for block in data.chunks_exact_mut(len) {
                let (lo, hi) = block.split_at_mut(half);
                for k in 0..half {
                    let mut w = self.twiddles[k * step];
                    if inverse {
                        w = w.conj();
                    }
                    let b = hi[k] * w;
                    let a = lo[k];
                    lo[k] = a + b;
                    hi[k] = a - b;
                }
            }
            len <<= 1;
        }
    }

    /// Transforms columns `cols` of an `n × stride` row-major buffer. Every
    /// butterfly acts on whole row segments so memory access stays contiguous.
    pub(crate) fn forward_columns(&self, data: &mut [C64], stride: usize, cols: std::ops::Range<usize>) {
        self.transform_columns(data, stride, cols, false);
    }

    pub(crate) fn inverse_columns(&self, data: &mut [C64], stride: usize, cols: std::ops::Range<usize>) {
        self.transform_columns(data, stride, cols.clone(), true);
        let scale = 1.0 / self.n as f64;
        for row in data.chunks_exact_mut(stride) {
            for v in &mut row[cols.clone()] {
                *v *= scale;
            }
        }
    }

    fn transform_columns(
        &self,
        data: &mut [C64],
        stride: usize,
        cols: std::ops::Range<usize>,
        inverse: bool,
    ) {
        let n = self.n;
        assert_eq!(data.len(), n * stride, "column buffer does not match plan");
        let (c0, c1) = (cols.start, cols.end);
        for i in 0..n {
            let j = self.bitrev[i] as usize;
            if i < j {
                let (a, b) = data.split_at_mut(j * stride);
                a[i * stride + c0..i * stride + c1].swap_with_slice(&mut b[c0..c1]);
            }
        }
        let mut len = 2;
        while len <= n {
            let half = len / 2;
            let step = n / len;
            for block in data.chunks_exact_mut(len * stride) {
                let (lo, hi) = block.split_at_mut(half * stride);
                for k in 0..half {
                    let mut w = self.twiddles[k * step];
                    if inverse {
                        w = w.conj();
                    }
                    let r0 = &mut lo[k * stride + c0..k * stride + c1];
                    let r1 = &mut hi[k * stride + c0..k * stride + c1];
                    for (a, b) in r0.iter_mut().zip(r1.iter_mut()) {
                        let t = *b * w;
                        let s = *a;
                        *a = s + t;
                        *b = s - t;
                    }
                }
            }
            len <<= 1;
        }
    }
}

/// Full length-`n` spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub coefficients: Vec<C64>,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }
}

pub fn fft_forward_real(plan: &FourierPlan, signal: &[f64]) -> Result<Spectrum> {
    if signal.len() != plan.len() {
        return Err(Error::invalid(format!(
            "signal length {} does not match plan length {}",
            signal.len(),
            plan.len()
        )));
    }
    let mut data: Vec<C64> = signal.iter().map(|&v| C64::new(v, 0.0)).collect();
    plan.forward(&mut data);
    Ok(Spectrum { coefficients: data })
}

/// Inverse of [`fft_forward_real`]; the imaginary residue of a Hermitian
/// spectrum is discarded.
pub fn fft_inverse_real(plan: &FourierPlan, spectrum: &Spectrum) -> Result<Vec<f64>> {
    if spectrum.len() != plan.len() {
        return Err(Error::invalid(format!(
            "spectrum length {} does not match plan length {}",
            spectrum.len(),
            plan.len()
        )));
    }
    let mut data = spectrum.coefficients.clone();
    plan.inverse(&mut data);
    Ok(data.into_iter().map(|c| c.re).collect())
}

/// Row and column plans for `width × height` images.
#[derive(Debug, Clone)]
pub struct Plan2D {
    rows: FourierPlan,
    cols: FourierPlan,
}

impl Plan2D {
    pub fn new(width: usize, height: usize) -> Result<Self> {
        Ok(Self {
            rows: FourierPlan::new(width)?,
            cols: FourierPlan::new(height)?,
        })
    }

    pub fn width(&self) -> usize {
        self.rows.len()
    }

    pub fn height(&self) -> usize {
        self.cols.len()
    }

    fn check(&self, img: &Image) -> Result<()> {
        if img.width() != self.width() || img.height() != self.height() {
            return Err(Error::invalid(format!(
                "image {}x{} does not match 2D plan {}x{}",
                img.width(),
                img.height(),
                self.width(),
                self.height()
            )));
        }
        Ok(())
    }
}

/// Row-major `width × height` spectrum; index `ky * width + kx`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum2D {
    pub width: usize,
    pub height: usize,
    pub data: Vec<C64>,
}

impl Spectrum2D {
    #[inline]
    pub fn at(&self, kx: usize, ky: usize) -> C64 {
        self.data[ky * self.width + kx]
    }
}

/// Separates the spectra of two real signals packed as `a + i·b`.
#[inline]
fn split_packed(z: &[C64], k: usize) -> (C64, C64) {
    let n = z.len();
    let zk = z[k];
    let zc = z[(n - k) % n].conj();
    let a = (zk + zc) * 0.5;
    let b = (zk - zc) * C64::new(0.0, -0.5);
    (a, b)
}

pub fn fft2_forward(plan: &Plan2D, img: &Image) -> Result<Spectrum2D> {
    plan.check(img)?;
    let (w, h) = (img.width(), img.height());
    let mut data = vec![C64::new(0.0, 0.0); w * h];
    let mut z = vec![C64::new(0.0, 0.0); w];
    for y in (0..h).step_by(2) {
        let a = img.row(y);
        if y + 1 < h {
            let b = img.row(y + 1);
            for x in 0..w {
                z[x] = C64::new(a[x], b[x]);
            }
        } else {
            for x in 0..w {
                z[x] = C64::new(a[x], 0.0);
            }
        }
        plan.rows.forward(&mut z);
        for k in 0..w {
            let (ak, bk) = split_packed(&z, k);
            data[y * w + k] = ak;
            if y + 1 < h {
                data[(y + 1) * w + k] = bk;
            }
        }
    }
    let half = w / 2 + 1;
    plan.cols.forward_columns(&mut data, w, 0..half.min(w));
    for ky in 0..h {
        for kx in half..w {
            data[ky * w + kx] = data[((h - ky) % h) * w + (w - kx)].conj();
        }
    }
    Ok(Spectrum2D { width: w, height: h, data })
}

/// Inverse 2D transform of the spectrum of a real image.
pub fn fft2_inverse(plan: &Plan2D, spectrum: &Spectrum2D) -> Result<Image> {
    let (w, h) = (spectrum.width, spectrum.height);
    if w != plan.width() || h != plan.height() || spectrum.data.len() != w * h {
        return Err(Error::invalid("spectrum does not match 2D plan"));
    }
    let mut data = spectrum.data.clone();
    let half = (w / 2 + 1).min(w);
    plan.cols.inverse_columns(&mut data, w, 0..half);
    let mut out = vec![0.0; w * h];
    let mut z = vec![C64::new(0.0, 0.0); w];
    for y in (0..h).step_by(2) {
        let has_b = y + 1 < h;
        for kx in 0..w {
            let (src, conj) = if kx < half { (kx, false) } else { (w - kx, true) };
            let mut a = data[y * w + src];
            let mut b = if has_b { data[(y + 1) * w + src] } else { C64::new(0.0, 0.0) };
            if conj {
                a = a.conj();
                b = b.conj();
            }
            z[kx] = a + C64::new(-b.im, b.re);
        }
        plan.rows.inverse(&mut z);
        for x in 0..w {
            out[y * w + x] = z[x].re;
            if has_b {
                out[(y + 1) * w + x] = z[x].im;
            }
        }
    }
    Ok(Image::from_raw(w, h, out))
}

/// Spectrum of `psf` embedded periodically in a `width × height` grid with
/// its origin at index (0, 0).
pub fn psf_spectrum_2d(psf: &Psf, plan: &Plan2D) -> Result<Spectrum2D> {
    let (w, h) = (plan.width(), plan.height());
    check_support(psf, w, h)?;
    let mut grid = Image::zeros(w, h);
    for (dx, dy, v) in psf.taps() {
        let x = dx.rem_euclid(w as isize) as usize;
        let y = dy.rem_euclid(h as isize) as usize;
        let cur = grid.get(x, y);
        grid.set(x, y, cur + v);
    }
    fft2_forward(plan, &grid)
}

/// Spectrum of a 1D `psf` along its axis for a length-`plan.len()` period.
pub fn psf_spectrum_1d(psf: &Psf, plan: &FourierPlan) -> Result<Vec<C64>> {
    if psf.axis().is_none() {
        return Err(Error::invalid("1D spectrum requested for a 2D PSF"));
    }
    let n = plan.len();
    let taps = psf.weights();
    if taps.len() > n {
        return Err(Error::invalid(format!(
            "PSF support {} exceeds signal length {n}",
            taps.len()
        )));
    }
    let c = psf.center_1d() as isize;
    let mut data = vec![C64::new(0.0, 0.0); n];
    for (i, &v) in taps.iter().enumerate() {
        let k = (i as isize - c).rem_euclid(n as isize) as usize;
        data[k].re += v;
    }
    plan.forward(&mut data);
    Ok(data)
}

pub(crate) fn check_support(psf: &Psf, width: usize, height: usize) -> Result<()> {
    if psf.width() > width || psf.height() > height {
        return Err(Error::invalid(format!(
            "PSF support {}x{} exceeds image {}x{}",
            psf.width(),
            psf.height(),
            width,
            height
        )));
    }
    Ok(())
}

/// Multiplies a 2D spectrum by `response` (or its conjugate) in place.
fn apply_response(data: &mut [C64], response: &[C64], conjugate: bool) {
    if conjugate {
        for (d, r) in data.iter_mut().zip(response) {
            *d *= r.conj();
        }
    } else {
        for (d, r) in data.iter_mut().zip(response) {
            *d *= *r;
        }
    }
}

/// Periodic filtering of a real image by a 2D Hermitian frequency response.
pub(crate) fn filter_2d(plan: &Plan2D, img: &Image, response: &[C64], conjugate: bool) -> Result<Image> {
    let mut spec = fft2_forward(plan, img)?;
    apply_response(&mut spec.data, response, conjugate);
    fft2_inverse(plan, &spec)
}

/// Filters two real images with the same Hermitian response using one
/// complex 2D transform.
pub(crate) fn filter_pair_2d(
    plan: &Plan2D,
    a: &Image,
    b: &Image,
    response: &[C64],
    conjugate: bool,
) -> Result<(Image, Image)> {
    plan.check(a)?;
    plan.check(b)?;
    let (w, h) = (a.width(), a.height());
    let mut data: Vec<C64> = a
        .as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(&x, &y)| C64::new(x, y))
        .collect();
    for row in data.chunks_exact_mut(w) {
        plan.rows.forward(row);
    }
    plan.cols.forward_columns(&mut data, w, 0..w);
    apply_response(&mut data, response, conjugate);
    plan.cols.inverse_columns(&mut data, w, 0..w);
    for row in data.chunks_exact_mut(w) {
        plan.rows.inverse(row);
    }
    let re = data.iter().map(|c| c.re).collect();
    let im = data.iter().map(|c| c.im).collect();
    Ok((Image::from_raw(w, h, re), Image::from_raw(w, h, im)))
}

/// Periodic filtering of every line of `img` along `axis` by a 1D Hermitian
/// response. Lines are packed in fixed pairs (0,1), (2,3), … so the result for
/// a line never depends on which other lines are processed in the same call,
/// provided the caller's line ranges start at even indices.
pub(crate) fn filter_along_axis(
    plan: &FourierPlan,
    img: &Image,
    axis: Axis,
    response: &[C64],
    conjugate: bool,
) -> Result<Image> {
    let (w, h) = (img.width(), img.height());
    let n = plan.len();
    match axis {
        Axis::Vertical => {
            if h != n {
                return Err(Error::invalid(format!("image height {h} does not match plan length {n}")));
            }
            let pairs = w.div_ceil(2);
            let mut buf = vec![C64::new(0.0, 0.0); n * pairs];
            for y in 0..h {
                let row = img.row(y);
                let dst = &mut buf[y * pairs..(y + 1) * pairs];
                for (c, z) in dst.iter_mut().enumerate() {
                    let re = row[2 * c];
                    let im = if 2 * c + 1 < w { row[2 * c + 1] } else { 0.0 };
                    *z = C64::new(re, im);
                }
            }
            plan.forward_columns(&mut buf, pairs, 0..pairs);
            for (ky, row) in buf.chunks_exact_mut(pairs).enumerate() {
                let r = if conjugate { response[ky].conj() } else { response[ky] };
                for z in row {
                    *z *= r;
                }
            }
            plan.inverse_columns(&mut buf, pairs, 0..pairs);
            let mut out = vec![0.0; w * h];
            for y in 0..h {
                let src = &buf[y * pairs..(y + 1) * pairs];
                let dst = &mut out[y * w..(y + 1) * w];
                for (c, z) in src.iter().enumerate() {
                    dst[2 * c] = z.re;
                    if 2 * c + 1 < w {
                        dst[2 * c + 1] = z.im;
                    }
                }
            }
            Ok(Image::from_raw(w, h, out))
        }
        Axis::Horizontal => {
            if w != n {
                return Err(Error::invalid(format!("image width {w} does not match plan length {n}")));
            }
            let mut out = vec![0.0; w * h];
            let mut z = vec![C64::new(0.0, 0.0); n];
            for y in (0..h).step_by(2) {
                let a = img.row(y);
                let has_b = y + 1 < h;
                for x in 0..w {
                    z[x] = C64::new(a[x], if has_b { img.get(x, y + 1) } else { 0.0 });
                }
                plan.forward(&mut z);
                apply_response(&mut z, response, conjugate);
                plan.inverse(&mut z);
                for x in 0..w {
                    out[y * w + x] = z[x].re;
                    if has_b {
                        out[(y + 1) * w + x] = z[x].im;
                    }
                }
            }
            Ok(Image::from_raw(w, h, out))
        }
    }
}

/// Filters two real images along `axis` with one complex transform per line.
pub(crate) fn filter_pair_along_axis(
    plan: &FourierPlan,
    a: &Image,
    b: &Image,
    axis: Axis,
    response: &[C64],
    conjugate: bool,
) -> Result<(Image, Image)> {
    a.check_same_shape(b, "paired filtering")?;
    let (w, h) = (a.width(), a.height());
    let n = plan.len();
    let mut buf: Vec<C64> = a
        .as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(&x, &y)| C64::new(x, y))
        .collect();
    match axis {
        Axis::Vertical => {
            if h != n {
                return Err(Error::invalid(format!("image height {h} does not match plan length {n}")));
            }
            plan.forward_columns(&mut buf, w, 0..w);
            for (ky, row) in buf.chunks_exact_mut(w).enumerate() {
                let r = if conjugate { response[ky].conj() } else { response[ky] };
                for z in row {
                    *z *= r;
                }
            }
            plan.inverse_columns(&mut buf, w, 0..w);
        }
        Axis::Horizontal => {
            if w != n {
                return Err(Error::invalid(format!("image width {w} does not match plan length {n}")));
            }
            for row in buf.chunks_exact_mut(w) {
                plan.forward(row);
                apply_response(row, response, conjugate);
                plan.inverse(row);
            }
        }
    }
    let re = buf.iter().map(|c| c.re).collect();
    let im = buf.iter().map(|c| c.im).collect();
    Ok((Image::from_raw(w, h, re), Image::from_raw(w, h, im)))
}

fn check_power_of_two_dims(img: &Image, psf: &Psf) -> Result<()> {
    let need_w = !matches!(psf.axis(), Some(Axis::Vertical));
    let need_h = !matches!(psf.axis(), Some(Axis::Horizontal));
    if (need_w && !is_power_of_two(img.width())) || (need_h && !is_power_of_two(img.height())) {
        return Err(Error::invalid(format!(
            "Fourier convolution needs power-of-two dimensions along transformed axes, got {}x{}",
            img.width(),
            img.height()
        )));
    }
    Ok(())
}

/// Circular convolution of `img` with `psf`.
///
/// 1D kernels use one 1D transform per line along their axis; general 2D
/// kernels use the 2D transform.
pub fn fourier_convolve(img: &Image, psf: &Psf) -> Result<Image> {
    check_power_of_two_dims(img, psf)?;
    check_support(psf, img.width(), img.height())?;
    match psf.kind() {
        PsfKind::General2D => {
            let plan = Plan2D::new(img.width(), img.height())?;
            let h = psf_spectrum_2d(psf, &plan)?;
            filter_2d(&plan, img, &h.data, false)
        }
        PsfKind::General1D(axis) | PsfKind::UniformBox1D { axis, .. } => {
            let n = match axis {
                Axis::Horizontal => img.width(),
                Axis::Vertical => img.height(),
            };
            let plan = FourierPlan::new(n)?;
            let h = psf_spectrum_1d(psf, &plan)?;
            filter_along_axis(&plan, img, axis, &h, false)
        }
    }
}
