//! Multi-threaded RRRL for 1D blur.
//!
//! For a 1D PSF the sharpening term only couples pixels along the blur axis,
//! so lines parallel to the PSF can be processed independently. Worker
//! threads own contiguous blocks of such lines for the whole run; the
//! coordinating thread computes the 2D diffusion term. Three barriers per
//! iteration separate reading `uᵏ`, publishing `D(uᵏ)` and writing `uᵏ⁺¹`.

use std::sync::{Barrier, Mutex, RwLock};
use std::thread;

use crate::deconv::iteration::{combine, sharpening_terms};
use crate::deconv::pipeline::{Deconvolver, Scenario};
use crate::deconv::regularizer::diffusion_term;
use crate::error::{Error, Result};
use crate::image::{clamp_floor, Image};
use crate::params::DeconvParams;
use crate::psf::{Axis, Psf};

/// Splits `lines` into at most `workers` contiguous blocks starting at even
/// indices, so that line pairing inside the FFT convolver is unaffected.
fn partition(lines: usize, workers: usize) -> Vec<(usize, usize)> {
    let pairs = lines.div_ceil(2);
    let workers = workers.clamp(1, pairs.max(1));
    let mut blocks = Vec::with_capacity(workers);
    let mut start = 0;
    for i in 0..workers {
        let end_pair = pairs * (i + 1) / workers;
        let end = (2 * end_pair).min(lines);
        if end > start {
            blocks.push((start, end));
        }
        start = end;
    }
    blocks
}

fn extract(img: &Image, axis: Axis, (a, b): (usize, usize)) -> Image {
    let (w, h) = (img.width(), img.height());
    match axis {
        Axis::Vertical => {
            let bw = b - a;
            let mut out = Vec::with_capacity(bw * h);
            for y in 0..h {
                out.extend_from_slice(&img.row(y)[a..b]);
            }
            Image::from_raw(bw, h, out)
        }
        Axis::Horizontal => Image::from_raw(w, b - a, img.as_slice()[a * w..b * w].to_vec()),
    }
}

fn insert(dst: &mut Image, block: &Image, axis: Axis, (a, b): (usize, usize)) {
    let w = dst.width();
    match axis {
        Axis::Vertical => {
            let bw = b - a;
            let data = dst.as_mut_slice();
            for y in 0..block.height() {
                data[y * w + a..y * w + b].copy_from_slice(&block.as_slice()[y * bw..(y + 1) * bw]);
            }
        }
        Axis::Horizontal => dst.as_mut_slice()[a * w..b * w].copy_from_slice(block.as_slice()),
    }
}

impl Deconvolver {
    /// WR³L with the RRRL iterations spread over `workers` threads. The result
    /// does not depend on `workers`.
    pub fn run_parallel(&self, f: &Image, workers: usize) -> Result<Image> {
        let axis = self
            .psf()
            .axis()
            .filter(|_| self.scenario() != Scenario::Fourier2D)
            .ok_or_else(|| Error::invalid("parallel RRRL needs a 1D PSF in a 1D scenario"))?;
        if workers == 0 {
            return Err(Error::invalid("worker count must be at least 1"));
        }
        let params = *self.params();
        let u0 = self.initial_iterate(f)?;
        let f = clamp_floor(f, params.floor)?;
        if params.iterations == 0 {
            return Ok(u0);
        }
        let (width, height) = self.dims();
        let lines = match axis {
            Axis::Vertical => width,
            Axis::Horizontal => height,
        };
        let blocks = partition(lines, workers);

        let u = RwLock::new(u0);
        let diffusion: RwLock<Option<Image>> = RwLock::new(None);
        let barrier = Barrier::new(blocks.len() + 1);
        let failure: Mutex<Option<Error>> = Mutex::new(None);
        let op = self.operator();
        let lut = self.lut();

        thread::scope(|s| {
            for &block in &blocks {
                let (u, diffusion, barrier, failure, f) = (&u, &diffusion, &barrier, &failure, &f);
                s.spawn(move || {
                    let f_blk = extract(f, axis, block);
                    for _ in 0..params.iterations {
                        barrier.wait();
                        let u_blk = extract(&u.read().unwrap(), axis, block);
                        let terms = sharpening_terms(&u_blk, &f_blk, op, lut, &params);
                        barrier.wait();
                        let next = terms.map(|t| {
                            let d = diffusion.read().unwrap();
                            let d_blk = d.as_ref().map(|d| extract(d, axis, block));
                            combine(&u_blk, &t.numerator, &t.denominator, d_blk.as_ref(), params.alpha).0
                        });
                        barrier.wait();
                        match next {
                            Ok(next) => insert(&mut u.write().unwrap(), &next, axis, block),
                            Err(e) => {
                                failure.lock().unwrap().get_or_insert(e);
                            }
                        }
                    }
                });
            }
            for _ in 0..params.iterations {
                barrier.wait();
                if params.alpha > 0.0 {
                    let d = diffusion_term(&u.read().unwrap(), params.eps_reg);
                    match d {
                        Ok(d) => *diffusion.write().unwrap() = Some(d),
                        Err(e) => {
                            failure.lock().unwrap().get_or_insert(e);
                        }
                    }
                }
                barrier.wait();
                barrier.wait();
            }
        });

        if let Some(e) = failure.into_inner().unwrap() {
            return Err(e);
        }
        Ok(u.into_inner().unwrap())
    }
}

/// Parallel WR³L for a 1D PSF; the scenario follows [`Scenario::auto`].
pub fn rrrl_deblur_parallel(f: &Image, psf: &Psf, params: &DeconvParams, workers: usize) -> Result<Image> {
    let d = Deconvolver::new(psf, f.width(), f.height(), *params, Scenario::auto(psf))?;
    d.run_parallel(f, workers)
}
