//! Synthetic degradation and quality measurement.
//!
//! Blur is always applied in the spatial domain with constant continuation,
//! never through the periodic Fourier path used by the deconvolvers. Noise
//! comes from ChaCha8 seeded with a `u64`, so corpora are reproducible on
//! every platform.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::conv::spatial_convolve;
use crate::error::{Error, Result};
use crate::image::Image;
use crate::psf::Psf;

/// Blurs `g` by direct summation, optionally rounding to 8-bit grey levels.
pub fn synth_blur(g: &Image, psf: &Psf, quantize: bool) -> Result<Image> {
    let out = spatial_convolve(g, psf)?;
    Ok(if quantize { out.quantized() } else { out })
}

fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Adds i.i.d. Gaussian noise and clips to `[0, 255]`.
pub fn add_gaussian_noise(img: &Image, sigma: f64, seed: u64) -> Result<Image> {
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(Error::invalid(format!("noise sigma must be non-negative, got {sigma}")));
    }
    if sigma == 0.0 {
        return Ok(img.clone());
    }
    let normal = Normal::new(0.0, sigma).map_err(|e| Error::invalid(e.to_string()))?;
    let mut rng = rng_for(seed);
    let mut out = img.clone();
    for v in out.as_mut_slice() {
        *v = (*v + normal.sample(&mut rng)).clamp(0.0, 255.0);
    }
    Ok(out)
}

/// Replaces each pixel with probability `density` by a uniform value on `[0, 255]`.
pub fn add_impulse_noise(img: &Image, density: f64, seed: u64) -> Result<Image> {
    if !(0.0..=1.0).contains(&density) {
        return Err(Error::invalid(format!("impulse density must lie in [0, 1], got {density}")));
    }
    let mut rng = rng_for(seed);
    let mut out = img.clone();
    for v in out.as_mut_slice() {
        // two draws per pixel keep the stream aligned regardless of hits
        let hit = rng.gen::<f64>() < density;
        let replacement = rng.gen_range(0.0..=255.0);
        if hit {
            *v = replacement;
        }
    }
    Ok(out)
}

fn population_variance(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let (n, sum) = values.clone().fold((0usize, 0.0), |(n, s), v| (n + 1, s + v));
    let mean = sum / n as f64;
    values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64
}

/// `10 log₁₀(var(u) / var(u − u₀))` in dB, using population variances.
///
/// Returns `+∞` when `u − u₀` is constant and `−∞` when `u` is constant.
///
/// # Panics
/// If the images differ in size.
pub fn snr(u: &Image, u0: &Image) -> f64 {
    assert!(u.same_shape(u0), "SNR of differently sized images");
    let diff = u.as_slice().iter().zip(u0.as_slice()).map(|(a, b)| a - b);
    let var_diff = population_variance(diff);
    if var_diff == 0.0 {
        return f64::INFINITY;
    }
    let var_u = population_variance(u.as_slice().iter().copied());
    if var_u == 0.0 {
        return f64::NEG_INFINITY;
    }
    10.0 * (var_u / var_diff).log10()
}

/// Noise applied after blurring.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseSpec {
    None,
    Gaussian { sigma: f64 },
    Impulse { density: f64 },
}

impl NoiseSpec {
    pub fn apply(&self, img: &Image, seed: u64) -> Result<Image> {
        match *self {
            NoiseSpec::None => Ok(img.clone()),
            NoiseSpec::Gaussian { sigma } => add_gaussian_noise(img, sigma, seed),
            NoiseSpec::Impulse { density } => add_impulse_noise(img, density, seed),
        }
    }
}

impl FromStr for NoiseSpec {
    type Err = Error;

    /// `none`, `gauss:<sigma>` or `impulse:<density>`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, arg) = s.split_once(':').unwrap_or((s, ""));
        let value = || {
            arg.parse::<f64>()
                .map_err(|_| Error::invalid(format!("bad noise level in `{s}`")))
        };
        match kind.to_ascii_lowercase().as_str() {
            "none" if arg.is_empty() => Ok(NoiseSpec::None),
            "gauss" | "gaussian" => Ok(NoiseSpec::Gaussian { sigma: value()? }),
            "impulse" | "sp" => Ok(NoiseSpec::Impulse { density: value()? }),
            _ => Err(Error::invalid(format!("unknown noise spec `{s}`"))),
        }
    }
}

impl fmt::Display for NoiseSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let text = match self {
            NoiseSpec::None => "none".to_owned(),
            NoiseSpec::Gaussian { sigma } => format!("gauss:{sigma}"),
            NoiseSpec::Impulse { density } => format!("impulse:{density}"),
        };
        f.pad(&text)
    }
}

/// Blur, noise and optional 8-bit quantization in one go.
pub fn degrade(g: &Image, psf: &Psf, noise: NoiseSpec, seed: u64, quantize: bool) -> Result<Image> {
    let blurred = synth_blur(g, psf, quantize)?;
    let noisy = noise.apply(&blurred, seed)?;
    Ok(if quantize { noisy.quantized() } else { noisy })
}

/// One line of a corpus manifest.
#[derive(Debug, Clone, PartialEq)]
pub struct ManifestEntry {
    pub output: String,
    pub source: String,
    pub psf: String,
    pub noise: NoiseSpec,
    pub seed: u64,
    pub clipped: bool,
}

impl ManifestEntry {
    /// Tab-separated `key=value` fields.
    pub fn to_line(&self) -> String {
        format!(
            "output={}\tsource={}\tpsf={}\tnoise={}\tseed={}\tclip={}",
            self.output, self.source, self.psf, self.noise, self.seed, self.clipped
        )
    }

    pub fn parse(line: &str) -> Result<Self> {
        let get = |key: &str| -> Result<String> {
            line.split('\t')
                .find_map(|kv| kv.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
                .map(str::to_owned)
                .ok_or_else(|| Error::Format(format!("manifest line lacks `{key}`")))
        };
        Ok(Self {
            output: get("output")?,
            source: get("source")?,
            psf: get("psf")?,
            noise: get("noise")?.parse()?,
            seed: get("seed")?
                .parse()
                .map_err(|_| Error::Format("bad manifest seed".into()))?,
            clipped: get("clip")? == "true",
        })
    }
}

/// Deterministic grey-value test scene with a bright sky, a dark figure on
/// a textured ground, thin structures and smooth shading; a stand-in for
/// classic photographic test images.
pub fn test_scene(width: usize, height: usize) -> Image {
    let mut rng = rng_for(0x5eed);
    let texture: Vec<f64> = (0..width * height).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let (w, h) = (width as f64, height as f64);
    Image::from_fn(width, height, |x, y| {
        let (u, v) = (x as f64 / w, y as f64 / h);
        let horizon = 0.62 + 0.04 * (6.0 * u).sin();
        let mut val = if v < horizon {
            // sky brightening towards the top, a distant building block
            let mut s = 200.0 - 60.0 * v;
            if (0.68..0.86).contains(&u) && v > horizon - 0.18 {
                s = 150.0 + if ((u * 60.0).floor() as i64 + (v * 40.0).floor() as i64) % 3 == 0 { 25.0 } else { 0.0 };
            }
            s
        } else {
            // ground with coarse grass texture
            110.0 + 25.0 * texture[y * width + x] + 15.0 * (40.0 * u).sin() * (30.0 * v).cos()
        };
        // figure: head, torso, legs
        let head = ((u - 0.35) / 0.06).powi(2) + ((v - 0.22) / 0.075).powi(2) < 1.0;
        let torso = (0.26..0.45).contains(&u) && (0.29..0.62).contains(&v) && (u - 0.355).abs() < 0.09 - 0.08 * (v - 0.29);
        let legs = (0.62..0.92).contains(&v) && ((u - 0.31).abs() < 0.025 || (u - 0.4).abs() < 0.025);
        if head || torso || legs {
            val = 25.0 + 10.0 * texture[y * width + x];
        }
        // tripod: thin slanted lines
        for (x0, slope) in [(0.55, 0.25), (0.6, 0.0), (0.65, -0.25)] {
            let lx = x0 + slope * (v - 0.45);
            if v > 0.45 && v < 0.95 && (u - lx).abs() < 0.006 {
                val = 40.0;
            }
        }
        // camera body
        if (0.54..0.66).contains(&u) && (0.36..0.45).contains(&v) {
            val = 60.0;
        }
        val.clamp(0.0, 255.0)
    })
}
