//! Point-spread functions.
//!
//! A [`Psf`] stores its weights on a small support grid together with the
//! position of the origin pixel inside that grid. Convolution follows the
//! usual convention `(u * h)(x) = Σ_o h(o) u(x − o)` where `o` runs over the
//! offsets of the support relative to the origin.

use std::fmt;
use std::path::Path;

use log::warn;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    Horizontal,
    Vertical,
}

impl Axis {
    pub fn parse(token: &str) -> Result<Axis> {
        match token.to_ascii_lowercase().as_str() {
            "h" | "x" | "horizontal" | "0" => Ok(Axis::Horizontal),
            "v" | "y" | "vertical" | "90" => Ok(Axis::Vertical),
            other => Err(Error::invalid(format!(
                "unsupported blur axis `{other}`: 1D blurs must be aligned with a \
                 coordinate axis (h or v); use a 2D PSF file for oblique motion"
            ))),
        }
    }

    pub fn short_name(self) -> &'static str {
        match self {
            Axis::Horizontal => "h",
            Axis::Vertical => "v",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PsfKind {
    General2D,
    General1D(Axis),
    /// Uniform linear motion of the given length in pixels.
    UniformBox1D { axis: Axis, length: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Psf {
    kind: PsfKind,
    width: usize,
    height: usize,
    center_x: usize,
    center_y: usize,
    weights: Vec<f64>,
}

const NORMALIZATION_TOLERANCE: f64 = 1e-3;

/// Uniform box kernel for a (possibly fractional) blur length.
///
/// Integer lengths give `m` taps of `1/m`. Fractional lengths give
/// `⌊L⌋ + 2` taps: interior taps `1/L` and two end taps sharing the
/// fractional remainder, so the kernel stays symmetric.
pub fn materialize_box_kernel(length: f64) -> Result<Vec<f64>> {
    if !(length >= 1.0) || !length.is_finite() {
        return Err(Error::invalid(format!("box length must be >= 1, got {length}")));
    }
    let whole = length.floor();
    let frac = length - whole;
    let m = whole as usize;
    if frac == 0.0 {
        return Ok(vec![1.0 / length; m]);
    }
    let end = frac / (2.0 * length);
    let mut w = Vec::with_capacity(m + 2);
    w.push(end);
    w.extend(std::iter::repeat(1.0 / length).take(m));
    w.push(end);
    Ok(w)
}

fn normalize(weights: &mut [f64]) -> Result<f64> {
    if let Some(w) = weights.iter().find(|w| !(**w >= 0.0) || !w.is_finite()) {
        return Err(Error::invalid(format!("PSF weights must be finite and non-negative, found {w}")));
    }
    let sum: f64 = weights.iter().sum();
    if !(sum > 0.0) {
        return Err(Error::invalid("PSF weights sum to zero"));
    }
    let factor = 1.0 / sum;
    for w in weights.iter_mut() {
        *w *= factor;
    }
    Ok(factor)
}

impl Psf {
    /// General 2D kernel, `weights` row-major on a `width × height` grid whose
    /// origin sits at `(center_x, center_y)`. Weights are renormalized to unit sum.
    pub fn general_2d(
        width: usize,
        height: usize,
        center_x: usize,
        center_y: usize,
        mut weights: Vec<f64>,
    ) -> Result<Psf> {
        if width == 0 || height == 0 || weights.len() != width * height {
            return Err(Error::invalid(format!(
                "2D PSF of {width}x{height} needs {} weights, got {}",
                width * height,
                weights.len()
            )));
        }
        if center_x >= width || center_y >= height {
            return Err(Error::invalid("PSF center lies outside its support"));
        }
        normalize(&mut weights)?;
        Ok(Psf {
            kind: PsfKind::General2D,
            width,
            height,
            center_x,
            center_y,
            weights,
        })
    }

    pub fn general_1d(axis: Axis, mut weights: Vec<f64>, center: usize) -> Result<Psf> {
        if weights.is_empty() || center >= weights.len() {
            return Err(Error::invalid("1D PSF needs weights and a center inside the support"));
        }
        normalize(&mut weights)?;
        Ok(Self::line(PsfKind::General1D(axis), axis, weights, center))
    }

    pub fn uniform_box(axis: Axis, length: f64) -> Result<Psf> {
        let weights = materialize_box_kernel(length)?;
        let center = (weights.len() - 1) / 2;
        Ok(Self::line(PsfKind::UniformBox1D { axis, length }, axis, weights, center))
    }

    /// The identity kernel.
    pub fn delta() -> Psf {
        Psf {
            kind: PsfKind::General2D,
            width: 1,
            height: 1,
            center_x: 0,
            center_y: 0,
            weights: vec![1.0],
        }
    }

    /// Rasterized uniform linear motion of `length` pixels at `angle_deg`
    /// (counter-clockwise from the x axis, y pointing down in the image).
    pub fn linear_motion(length: f64, angle_deg: f64) -> Result<Psf> {
        if !(length >= 1.0) || !length.is_finite() {
            return Err(Error::invalid(format!("motion length must be >= 1, got {length}")));
        }
        let theta = angle_deg.to_radians();
        let (dx, dy) = (theta.cos(), -theta.sin());
        let radius = (length / 2.0).ceil() as usize + 1;
        let side = 2 * radius + 1;
        let mut grid = vec![0.0; side * side];
        let samples = (16.0 * length).ceil() as usize + 1;
        for s in 0..samples {
            let t = -length / 2.0 + length * s as f64 / (samples - 1) as f64;
            let px = radius as f64 + t * dx;
            let py = radius as f64 + t * dy;
            let (x0, y0) = (px.floor(), py.floor());
            let (fx, fy) = (px - x0, py - y0);
            let (x0, y0) = (x0 as usize, y0 as usize);
            grid[y0 * side + x0] += (1.0 - fx) * (1.0 - fy);
            grid[y0 * side + x0 + 1] += fx * (1.0 - fy);
            grid[(y0 + 1) * side + x0] += (1.0 - fx) * fy;
            grid[(y0 + 1) * side + x0 + 1] += fx * fy;
        }
        Psf::general_2d(side, side, radius, radius, grid)?.trimmed()
    }

    fn line(kind: PsfKind, axis: Axis, weights: Vec<f64>, center: usize) -> Psf {
        let n = weights.len();
        let (width, height, center_x, center_y) = match axis {
            Axis::Horizontal => (n, 1, center, 0),
            Axis::Vertical => (1, n, 0, center),
        };
        Psf {
            kind,
            width,
            height,
            center_x,
            center_y,
            weights,
        }
    }

    /// Drops all-zero border rows and columns of a 2D support.
    fn trimmed(self) -> Result<Psf> {
        let (w, h) = (self.width, self.height);
        let nz = |x: usize, y: usize| self.weights[y * w + x] > 0.0;
        let x0 = (0..w).find(|&x| (0..h).any(|y| nz(x, y))).unwrap_or(0);
        let x1 = (0..w).rev().find(|&x| (0..h).any(|y| nz(x, y))).unwrap_or(w - 1);
        let y0 = (0..h).find(|&y| (0..w).any(|x| nz(x, y))).unwrap_or(0);
        let y1 = (0..h).rev().find(|&y| (0..w).any(|x| nz(x, y))).unwrap_or(h - 1);
        // keep the origin inside the support
        let (x0, x1) = (x0.min(self.center_x), x1.max(self.center_x));
        let (y0, y1) = (y0.min(self.center_y), y1.max(self.center_y));
        let (nw, nh) = (x1 - x0 + 1, y1 - y0 + 1);
        let mut weights = Vec::with_capacity(nw * nh);
        for y in y0..=y1 {
            weights.extend_from_slice(&self.weights[y * w + x0..=y * w + x1]);
        }
        Psf::general_2d(nw, nh, self.center_x - x0, self.center_y - y0, weights)
    }

    pub fn kind(&self) -> PsfKind {
        self.kind
    }

    /// Blur axis for 1D kinds.
    pub fn axis(&self) -> Option<Axis> {
        match self.kind {
            PsfKind::General2D => None,
            PsfKind::General1D(a) | PsfKind::UniformBox1D { axis: a, .. } => Some(a),
        }
    }

    pub fn is_box(&self) -> bool {
        matches!(self.kind, PsfKind::UniformBox1D { .. })
    }

    pub fn box_length(&self) -> Option<f64> {
        match self.kind {
            PsfKind::UniformBox1D { length, .. } => Some(length),
            _ => None,
        }
    }

    /// Support width in pixels.
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn center(&self) -> (usize, usize) {
        (self.center_x, self.center_y)
    }

    /// Row-major weights on the support grid.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// For 1D kinds: the origin index along the blur axis.
    pub fn center_1d(&self) -> usize {
        match self.axis() {
            Some(Axis::Vertical) => self.center_y,
            _ => self.center_x,
        }
    }

    /// `(dx, dy, weight)` for every support pixel, offsets relative to the origin.
    pub fn taps(&self) -> impl Iterator<Item = (isize, isize, f64)> + '_ {
        let (w, cx, cy) = (self.width, self.center_x as isize, self.center_y as isize);
        self.weights.iter().enumerate().map(move |(i, &v)| {
            ((i % w) as isize - cx, (i / w) as isize - cy, v)
        })
    }

    /// The adjoint kernel `h*(x) = h(−x)`.
    pub fn adjoint(&self) -> Psf {
        let weights: Vec<f64> = self.weights.iter().rev().copied().collect();
        Psf {
            kind: self.kind,
            width: self.width,
            height: self.height,
            center_x: self.width - 1 - self.center_x,
            center_y: self.height - 1 - self.center_y,
            weights,
        }
    }

    /// The same kernel seen as a general 2D PSF.
    pub fn to_general_2d(&self) -> Psf {
        Psf {
            kind: PsfKind::General2D,
            ..self.clone()
        }
    }

    /// Parses the text PSF format.
    ///
    /// ```text
    /// 2D w h cx cy   followed by w*h weights
    /// 1D axis n c    followed by n weights
    /// BOX axis length
    /// ```
    pub fn parse(text: &str) -> Result<Psf> {
        let mut tokens = text.split_whitespace();
        let tag = tokens.next().ok_or_else(|| Error::Format("empty PSF description".into()))?;
        fn num<T: std::str::FromStr>(tok: Option<&str>, what: &str) -> Result<T> {
            let tok = tok.ok_or_else(|| Error::Format(format!("PSF header is missing {what}")))?;
            tok.parse()
                .map_err(|_| Error::Format(format!("cannot parse {what} from `{tok}`")))
        }
        let (psf, raw_sum) = match tag.to_ascii_uppercase().as_str() {
            "2D" => {
                let w: usize = num(tokens.next(), "width")?;
                let h: usize = num(tokens.next(), "height")?;
                let cx: usize = num(tokens.next(), "center x")?;
                let cy: usize = num(tokens.next(), "center y")?;
                let weights = parse_weights(&mut tokens, w * h)?;
                let sum = weights.iter().sum::<f64>();
                (Psf::general_2d(w, h, cx, cy, weights)?, sum)
            }
            "1D" => {
                let axis = Axis::parse(tokens.next().unwrap_or(""))?;
                let n: usize = num(tokens.next(), "tap count")?;
                let c: usize = num(tokens.next(), "center")?;
                let weights = parse_weights(&mut tokens, n)?;
                let sum = weights.iter().sum::<f64>();
                (Psf::general_1d(axis, weights, c)?, sum)
            }
            "BOX" => {
                let axis = Axis::parse(tokens.next().unwrap_or(""))?;
                let length: f64 = num(tokens.next(), "length")?;
                (Psf::uniform_box(axis, length)?, 1.0)
            }
            other => return Err(Error::Format(format!("unknown PSF tag `{other}`"))),
        };
        if tokens.next().is_some() {
            return Err(Error::Format("trailing data after PSF weights".into()));
        }
        let factor = 1.0 / raw_sum;
        if (factor - 1.0).abs() > NORMALIZATION_TOLERANCE {
            warn!("PSF weights summed to {raw_sum}; renormalized by factor {factor:.6}");
        }
        Ok(psf)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Psf> {
        let text = std::fs::read_to_string(path)?;
        Psf::parse(&text)
    }

    /// Renders the kernel in the text format accepted by [`Psf::parse`].
    pub fn to_text(&self) -> String {
        let mut s = match self.kind {
            PsfKind::UniformBox1D { axis, length } => {
                return format!("BOX {} {}\n", axis.short_name(), length)
            }
            PsfKind::General1D(axis) => {
                format!("1D {} {} {}\n", axis.short_name(), self.weights.len(), self.center_1d())
            }
            PsfKind::General2D => format!(
                "2D {} {} {} {}\n",
                self.width, self.height, self.center_x, self.center_y
            ),
        };
        for row in self.weights.chunks(self.width) {
            let line: Vec<String> = row.iter().map(|w| format!("{w:e}")).collect();
            s.push_str(&line.join(" "));
            s.push('\n');
        }
        s
    }
}

fn parse_weights<'a>(tokens: &mut impl Iterator<Item = &'a str>, n: usize) -> Result<Vec<f64>> {
    (0..n)
        .map(|i| {
            let tok = tokens
                .next()
                .ok_or_else(|| Error::Format(format!("expected {n} weights, found {i}")))?;
            tok.parse::<f64>()
                .map_err(|_| Error::Format(format!("bad PSF weight `{tok}`")))
        })
        .collect()
}

impl fmt::Display for Psf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            PsfKind::UniformBox1D { axis, length } => write!(f, "box:{}:{}", axis.short_name(), length),
            PsfKind::General1D(axis) => write!(f, "1d:{}:{}", axis.short_name(), self.weights.len()),
            PsfKind::General2D => write!(f, "2d:{}x{}", self.width, self.height),
        }
    }
}
