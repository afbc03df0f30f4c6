//! Spatial-domain convolution with constant continuation at the boundary.
//!
//! Reads outside the image take the value of the nearest boundary pixel
//! (corner pixels for diagonal reads).

use crate::error::{Error, Result};
use crate::fft::check_support;
use crate::image::Image;
use crate::psf::{Axis, Psf, PsfKind};

/// Running sums are recomputed from scratch after this many sliding updates.
const RESUM_INTERVAL: usize = 4096;

/// Direct-summation convolution.
pub fn spatial_convolve(img: &Image, psf: &Psf) -> Result<Image> {
    check_support(psf, img.width(), img.height())?;
    let (w, h) = (img.width(), img.height());
    let taps: Vec<(isize, isize, f64)> = psf.taps().collect();
    // margins such that x - dx stays inside the padded grid
    let left = taps.iter().map(|t| t.0).max().unwrap_or(0).max(0) as usize;
    let right = taps.iter().map(|t| -t.0).max().unwrap_or(0).max(0) as usize;
    let top = taps.iter().map(|t| t.1).max().unwrap_or(0).max(0) as usize;
    let bottom = taps.iter().map(|t| -t.1).max().unwrap_or(0).max(0) as usize;
    let pw = w + left + right;
    let ph = h + top + bottom;
    let mut pad = vec![0.0; pw * ph];
    for py in 0..ph {
        let sy = (py as isize - top as isize).clamp(0, h as isize - 1) as usize;
        let src = img.row(sy);
        let dst = &mut pad[py * pw..(py + 1) * pw];
        dst[..left].fill(src[0]);
        dst[left..left + w].copy_from_slice(src);
        dst[left + w..].fill(src[w - 1]);
    }
    let mut out = vec![0.0; w * h];
    for &(dx, dy, v) in &taps {
        if v == 0.0 {
            continue;
        }
        let ox = (left as isize - dx) as usize;
        let oy = (top as isize - dy) as usize;
        for y in 0..h {
            let src = &pad[(y + oy) * pw + ox..(y + oy) * pw + ox + w];
            let dst = &mut out[y * w..(y + 1) * w];
            for (d, s) in dst.iter_mut().zip(src) {
                *d += v * s;
            }
        }
    }
    Ok(Image::from_raw(w, h, out))
}

/// Operation tally of the sliding-window box filter.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BoxOpCounts {
    /// Terms summed directly to initialize windows.
    pub init_terms: usize,
    /// Additions and subtractions spent on sliding updates and end taps.
    pub update_ops: usize,
    /// Number of output pixels produced by sliding updates.
    pub updated_pixels: usize,
    pub resummations: usize,
}

trait Tally {
    fn init(&mut self, terms: usize);
    fn update(&mut self, ops: usize);
    fn resum(&mut self);
}

struct NoTally;

impl Tally for NoTally {
    #[inline(always)]
    fn init(&mut self, _: usize) {}
    #[inline(always)]
    fn update(&mut self, _: usize) {}
    #[inline(always)]
    fn resum(&mut self) {}
}

impl Tally for BoxOpCounts {
    fn init(&mut self, terms: usize) {
        self.init_terms += terms;
    }
    fn update(&mut self, ops: usize) {
        self.update_ops += ops;
        self.updated_pixels += 1;
    }
    fn resum(&mut self) {
        self.resummations += 1;
    }
}

/// Geometry of a box kernel: window `[y − before, y + after]` around output `y`.
#[derive(Debug, Clone, Copy)]
struct BoxWindow {
    before: usize,
    after: usize,
    inv_len: f64,
    /// Weight of each end tap; `None` for integer lengths.
    end: Option<f64>,
}

impl BoxWindow {
    fn of(psf: &Psf) -> Result<(Axis, BoxWindow)> {
        let PsfKind::UniformBox1D { axis, length } = psf.kind() else {
            return Err(Error::invalid(format!("box filter requires a uniform box PSF, got {psf}")));
        };
        let m = psf.weights().len();
        let c = psf.center_1d();
        let end = (length.fract() != 0.0).then(|| psf.weights()[0]);
        Ok((
            axis,
            BoxWindow {
                before: m - 1 - c,
                after: c,
                inv_len: 1.0 / length,
                end,
            },
        ))
    }

    fn is_identity(&self) -> bool {
        self.before == 0 && self.after == 0 && self.end.is_none()
    }
}

/// Sliding-window convolution with a uniform box PSF.
///
/// Costs `O(window)` per line for the first output and a constant number of
/// additions per further output, independent of the blur length.
pub fn box_convolve(img: &Image, psf: &Psf) -> Result<Image> {
    let (axis, win) = BoxWindow::of(psf)?;
    check_support(psf, img.width(), img.height())?;
    if win.is_identity() {
        return Ok(img.clone());
    }
    Ok(match axis {
        Axis::Vertical => box_vertical(img, win, &mut NoTally),
        Axis::Horizontal => box_horizontal(img, win, &mut NoTally),
    })
}

/// [`box_convolve`] with an operation tally, for verifying the cost model.
pub fn box_convolve_instrumented(img: &Image, psf: &Psf) -> Result<(Image, BoxOpCounts)> {
    let (axis, win) = BoxWindow::of(psf)?;
    check_support(psf, img.width(), img.height())?;
    let mut counts = BoxOpCounts::default();
    let out = match axis {
        Axis::Vertical => box_vertical(img, win, &mut counts),
        Axis::Horizontal => box_horizontal(img, win, &mut counts),
    };
    Ok((out, counts))
}

#[inline]
fn clamp_index(i: isize, n: usize) -> usize {
    i.clamp(0, n as isize - 1) as usize
}

/// Vertical box filter: a single top-to-bottom sweep keeps one running sum per
/// column, so every row access is contiguous.
fn box_vertical<T: Tally>(img: &Image, win: BoxWindow, tally: &mut T) -> Image {
    let (w, h) = (img.width(), img.height());
    let before = win.before as isize;
    let after = win.after as isize;
    let row = |i: isize| img.row(clamp_index(i, h));
    // interior of the window excludes the end taps for fractional lengths
    let (lo_off, hi_off) = if win.end.is_some() { (1, 1) } else { (0, 0) };
    let init = |y: isize, sums: &mut [f64], tally: &mut T| {
        sums.fill(0.0);
        for i in (y - before + lo_off)..=(y + after - hi_off) {
            for (s, v) in sums.iter_mut().zip(row(i)) {
                *s += v;
            }
        }
        tally.init(((after - hi_off) - (-before + lo_off) + 1).max(0) as usize * w);
    };
    let mut sums = vec![0.0; w];
    let mut out = vec![0.0; w * h];
    init(0, &mut sums, tally);
    let mut since_resum = 0;
    for y in 0..h as isize {
        if y > 0 {
            if since_resum == RESUM_INTERVAL {
                init(y, &mut sums, tally);
                tally.resum();
                since_resum = 0;
            } else {
                // window slides by one: gains index y+after-hi_off, loses y-1-before+lo_off
                let enter = row(y + after - hi_off);
                let leave = row(y - 1 - before + lo_off);
                for ((s, a), b) in sums.iter_mut().zip(enter).zip(leave) {
                    *s += a - b;
                }
                since_resum += 1;
            }
        }
        let dst = &mut out[y as usize * w..(y as usize + 1) * w];
        match win.end {
            None => {
                for (d, s) in dst.iter_mut().zip(&sums) {
                    *d = s * win.inv_len;
                }
                if y > 0 {
                    for _ in 0..w {
                        tally.update(2);
                    }
                }
            }
            Some(e) => {
                let lo = row(y - before);
                let hi = row(y + after);
                for (((d, s), a), b) in dst.iter_mut().zip(&sums).zip(lo).zip(hi) {
                    *d = s * win.inv_len + e * (a + b);
                }
                if y > 0 {
                    for _ in 0..w {
                        tally.update(3);
                    }
                }
            }
        }
    }
    Image::from_raw(w, h, out)
}

fn box_horizontal<T: Tally>(img: &Image, win: BoxWindow, tally: &mut T) -> Image {
    let (w, h) = (img.width(), img.height());
    let (before, after) = (win.before, win.after);
    let mut line = vec![0.0; before + w + after];
    let mut out = vec![0.0; w * h];
    let (lo_off, hi_off) = if win.end.is_some() { (1, 1) } else { (0, 0) };
    for y in 0..h {
        let src = img.row(y);
        line[..before].fill(src[0]);
        line[before..before + w].copy_from_slice(src);
        line[before + w..].fill(src[w - 1]);
        // output x covers padded indices [x, x + before + after]
        let init = |x: usize, tally: &mut T| {
            let range = x + lo_off..x + before + after + 1 - hi_off;
            tally.init(range.len());
            line[range].iter().sum::<f64>()
        };
        let mut sum = init(0, tally);
        let mut since_resum = 0;
        let dst = &mut out[y * w..(y + 1) * w];
        for x in 0..w {
            if x > 0 {
                if since_resum == RESUM_INTERVAL {
                    sum = init(x, tally);
                    tally.resum();
                    since_resum = 0;
                } else {
                    sum += line[x + before + after - hi_off] - line[x - 1 + lo_off];
                    since_resum += 1;
                }
            }
            dst[x] = match win.end {
                None => {
                    if x > 0 {
                        tally.update(2);
                    }
                    sum * win.inv_len
                }
                Some(e) => {
                    if x > 0 {
                        tally.update(3);
                    }
                    sum * win.inv_len + e * (line[x] + line[x + before + after])
                }
            };
        }
    }
    Image::from_raw(w, h, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_image(seed: u64, w: usize, h: usize) -> Image {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Image::from_fn(w, h, |_, _| rng.gen_range(0.0..255.0))
    }

    /// Straightforward per-pixel loop with explicit index clamping.
    fn clamped_reference(img: &Image, psf: &Psf) -> Image {
        let (w, h) = (img.width() as isize, img.height() as isize);
        Image::from_fn(img.width(), img.height(), |x, y| {
            let mut acc = 0.0;
            for (dx, dy, v) in psf.taps() {
                if v == 0.0 {
                    continue;
                }
                let sx = (x as isize - dx).clamp(0, w - 1) as usize;
                let sy = (y as isize - dy).clamp(0, h - 1) as usize;
                acc += v * img.get(sx, sy);
            }
            acc
        })
    }

    #[test]
    fn delta_is_identity() {
        let img = random_image(1, 9, 7);
        assert_eq!(spatial_convolve(&img, &Psf::delta()).unwrap(), img);
    }

    #[test]
    fn constant_image_is_preserved() {
        let img = Image::filled(20, 12, 42.0);
        for psf in [
            Psf::linear_motion(11.0, 33.0).unwrap(),
            Psf::uniform_box(Axis::Horizontal, 7.5).unwrap(),
            Psf::general_1d(Axis::Vertical, vec![0.1, 0.2, 0.7], 0).unwrap(),
        ] {
            let out = spatial_convolve(&img, &psf).unwrap();
            assert!(out.max_abs_diff(&img) < 1e-12);
        }
    }

    #[test]
    fn matches_clamped_reference_exactly() {
        let img = random_image(2, 32, 32);
        let psf = Psf::general_1d(Axis::Vertical, vec![0.1, 0.3, 0.2, 0.25, 0.15], 1).unwrap();
        assert_eq!(spatial_convolve(&img, &psf).unwrap(), clamped_reference(&img, &psf));
        let psf = Psf::linear_motion(7.0, 60.0).unwrap();
        assert_eq!(spatial_convolve(&img, &psf).unwrap(), clamped_reference(&img, &psf));
        let psf = Psf::general_2d(3, 2, 2, 0, vec![0.1, 0.2, 0.3, 0.1, 0.2, 0.1]).unwrap();
        assert_eq!(spatial_convolve(&img, &psf).unwrap(), clamped_reference(&img, &psf));
    }

    #[test]
    fn oversized_psf_is_rejected() {
        let img = Image::zeros(8, 4);
        let psf = Psf::uniform_box(Axis::Vertical, 5.0).unwrap();
        assert!(spatial_convolve(&img, &psf).is_err());
        assert!(box_convolve(&img, &psf).is_err());
    }

    #[test]
    fn box_requires_box_kind() {
        let img = Image::zeros(8, 8);
        let psf = Psf::general_1d(Axis::Vertical, vec![0.5, 0.5], 0).unwrap();
        assert!(matches!(box_convolve(&img, &psf), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn box_matches_direct_summation() {
        for (i, len) in [1.0, 2.0, 5.0, 6.5, 21.5, 27.0].into_iter().enumerate() {
            for axis in [Axis::Vertical, Axis::Horizontal] {
                let img = random_image(10 + i as u64, 48, 40);
                let psf = Psf::uniform_box(axis, len).unwrap();
                let fast = box_convolve(&img, &psf).unwrap();
                let slow = spatial_convolve(&img, &psf).unwrap();
                assert!(fast.max_abs_diff(&slow) < 1e-9, "len {len} {axis:?}");
                let adj = psf.adjoint();
                let fast = box_convolve(&img, &adj).unwrap();
                let slow = spatial_convolve(&img, &adj).unwrap();
                assert!(fast.max_abs_diff(&slow) < 1e-9, "adjoint len {len} {axis:?}");
            }
        }
    }

    #[test]
    fn box_length_one_is_identity() {
        let img = random_image(3, 16, 16);
        let psf = Psf::uniform_box(Axis::Vertical, 1.0).unwrap();
        assert_eq!(box_convolve(&img, &psf).unwrap(), img);
    }

    #[test]
    fn update_cost_is_independent_of_length() {
        let img = random_image(4, 64, 128);
        let mut per_pixel = Vec::new();
        for len in [3.0, 9.0, 27.0, 63.0, 4.5, 21.5, 62.5] {
            for axis in [Axis::Vertical, Axis::Horizontal] {
                let psf = Psf::uniform_box(axis, len).unwrap();
                let (_, c) = box_convolve_instrumented(&img, &psf).unwrap();
                let updated = match axis {
                    Axis::Vertical => 64 * 127,
                    Axis::Horizontal => 128 * 63,
                };
                assert_eq!(c.updated_pixels, updated);
                let ops = c.update_ops as f64 / c.updated_pixels as f64;
                // two for the running sum, one more to fold in the fractional ends
                assert!(ops <= 3.0 + 1e-12);
                per_pixel.push((len.fract() == 0.0, ops));
            }
        }
        for (integer, ops) in per_pixel {
            assert_eq!(ops, if integer { 2.0 } else { 3.0 });
        }
    }

    #[test]
    fn running_sum_drift_is_bounded() {
        let img = random_image(5, 4, 512);
        for len in [27.0, 21.5] {
            let psf = Psf::uniform_box(Axis::Vertical, len).unwrap();
            let fast = box_convolve(&img, &psf).unwrap();
            let slow = spatial_convolve(&img, &psf).unwrap();
            for x in 0..4 {
                let (a, b) = (fast.get(x, 511), slow.get(x, 511));
                assert!(((a - b) / b).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn resummation_kicks_in_on_long_lines() {
        let img = random_image(6, 5000, 1);
        let psf = Psf::uniform_box(Axis::Horizontal, 9.0).unwrap();
        let (fast, c) = box_convolve_instrumented(&img, &psf).unwrap();
        assert_eq!(c.resummations, 1);
        assert!(fast.max_abs_diff(&spatial_convolve(&img, &psf).unwrap()) < 1e-9);
    }

    #[test]
    fn blur_then_adjoint_is_autocorrelation() {
        let img = random_image(7, 40, 40);
        let psf = Psf::general_2d(3, 3, 1, 0, vec![0.1, 0.2, 0.05, 0.3, 0.0, 0.1, 0.05, 0.15, 0.05]).unwrap();
        // a(o) = Σ_p h(p) h(p − o)
        let taps: Vec<_> = psf.taps().collect();
        let mut acc = std::collections::BTreeMap::new();
        for &(px, py, hp) in &taps {
            for &(qx, qy, hq) in &taps {
                *acc.entry((py - qy, px - qx)).or_insert(0.0) += hp * hq;
            }
        }
        let weights: Vec<f64> = (-2..=2)
            .flat_map(|dy| (-2..=2).map(move |dx| (dy, dx)))
            .map(|k| acc.get(&k).copied().unwrap_or(0.0))
            .collect();
        let auto = Psf::general_2d(5, 5, 2, 2, weights).unwrap();
        let two_pass = spatial_convolve(&spatial_convolve(&img, &psf).unwrap(), &psf.adjoint()).unwrap();
        let one_pass = spatial_convolve(&img, &auto).unwrap();
        for y in 4..36 {
            for x in 4..36 {
                assert!((two_pass.get(x, y) - one_pass.get(x, y)).abs() < 1e-8);
            }
        }
    }
}
