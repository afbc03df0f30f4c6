use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use crate::deconv::iteration::{rl_step, rrrl_step, SharpeningState};
use crate::deconv::lut::DivergenceLut;
use crate::deconv::operator::{check_k, BlurOperator, BoxBlur, Convolver, FourierBlur1D, FourierBlur2D};
use crate::error::{Error, Result};
use crate::fft::{FourierPlan, Plan2D};
use crate::image::{clamp_floor, Image};
use crate::params::DeconvParams;
use crate::psf::{Axis, Psf, PsfKind};

/// How convolutions are realized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scenario {
    /// 1D Wiener filter, sliding-window box filter in the iterations.
    Box1D,
    /// 1D Wiener filter and 1D FFT convolutions along the blur axis.
    Fourier1D,
    /// 2D Wiener filter and 2D FFT convolutions.
    Fourier2D,
}

impl Scenario {
    /// Box1D for box PSFs, Fourier1D for other 1D PSFs, Fourier2D otherwise.
    pub fn auto(psf: &Psf) -> Scenario {
        match psf.kind() {
            PsfKind::UniformBox1D { .. } => Scenario::Box1D,
            PsfKind::General1D(_) => Scenario::Fourier1D,
            PsfKind::General2D => Scenario::Fourier2D,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Box1D => "box1d",
            Scenario::Fourier1D => "fourier1d",
            Scenario::Fourier2D => "fourier2d",
        }
    }

    pub const ALL: [Scenario; 3] = [Scenario::Box1D, Scenario::Fourier1D, Scenario::Fourier2D];
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "box" | "box1d" => Ok(Scenario::Box1D),
            "fourier1d" => Ok(Scenario::Fourier1D),
            "fourier2d" | "fourier" => Ok(Scenario::Fourier2D),
            other => Err(Error::invalid(format!("unknown scenario `{other}`"))),
        }
    }
}

/// Wall-clock times of one pipeline run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct StageTimes {
    pub wiener: Duration,
    pub iterations: Vec<Duration>,
    pub total: Duration,
}

impl StageTimes {
    pub fn rrrl_total(&self) -> Duration {
        self.iterations.iter().sum()
    }
}

/// Fourier realization used for the Wiener step.
#[derive(Debug, Clone)]
enum WienerStage {
    Line(FourierBlur1D),
    Plane(FourierBlur2D),
}

impl WienerStage {
    fn apply(&self, f: &Image, k: f64) -> Result<Image> {
        match self {
            WienerStage::Line(op) => op.wiener(f, k),
            WienerStage::Plane(op) => op.wiener(f, k),
        }
    }
}

/// Precomputed deconvolution setup for one PSF, image size and scenario.
///
/// Construction builds the FFT tables, the PSF spectrum and the divergence
/// lookup table; the spectrum is shared between the Wiener step and the
/// Fourier-based iterations.
#[derive(Debug, Clone)]
pub struct Deconvolver {
    scenario: Scenario,
    params: DeconvParams,
    psf: Psf,
    width: usize,
    height: usize,
    wiener: WienerStage,
    /// Iteration convolver when it differs from the Wiener stage.
    box_op: Option<Convolver>,
    lut: DivergenceLut,
}

impl Deconvolver {
    pub fn new(psf: &Psf, width: usize, height: usize, params: DeconvParams, scenario: Scenario) -> Result<Self> {
        params.validate()?;
        if psf.width() > width || psf.height() > height {
            return Err(Error::invalid(format!(
                "PSF support {}x{} exceeds image {width}x{height}",
                psf.width(),
                psf.height()
            )));
        }
        let line_len = |axis: Axis| match axis {
            Axis::Horizontal => width,
            Axis::Vertical => height,
        };
        let (wiener, box_op) = match scenario {
            Scenario::Box1D => {
                let axis = match psf.kind() {
                    PsfKind::UniformBox1D { axis, .. } => axis,
                    _ => return Err(Error::invalid(format!("box scenario requires a box PSF, got {psf}"))),
                };
                let line = FourierBlur1D::new(psf, line_len(axis))?;
                (WienerStage::Line(line), Some(Convolver::Box(BoxBlur::new(psf)?)))
            }
            Scenario::Fourier1D => {
                let axis = psf
                    .axis()
                    .ok_or_else(|| Error::invalid("fourier1d scenario requires a 1D PSF"))?;
                (WienerStage::Line(FourierBlur1D::new(psf, line_len(axis))?), None)
            }
            Scenario::Fourier2D => (
                WienerStage::Plane(FourierBlur2D::new(&psf.to_general_2d(), width, height)?),
                None,
            ),
        };
        Ok(Self {
            scenario,
            params,
            psf: psf.clone(),
            width,
            height,
            wiener,
            box_op,
            lut: DivergenceLut::new(),
        })
    }

    pub fn scenario(&self) -> Scenario {
        self.scenario
    }

    pub fn params(&self) -> &DeconvParams {
        &self.params
    }

    pub fn psf(&self) -> &Psf {
        &self.psf
    }

    pub fn lut(&self) -> &DivergenceLut {
        &self.lut
    }

    pub(crate) fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    /// The convolver used inside the iterations.
    pub fn operator(&self) -> &dyn BlurOperator {
        match (&self.box_op, &self.wiener) {
            (Some(op), _) => op,
            (None, WienerStage::Line(op)) => op,
            (None, WienerStage::Plane(op)) => op,
        }
    }

    fn check_input(&self, f: &Image) -> Result<()> {
        if f.width() != self.width || f.height() != self.height {
            return Err(Error::invalid(format!(
                "image is {}x{}, deconvolver was set up for {}x{}",
                f.width(),
                f.height(),
                self.width,
                self.height
            )));
        }
        Ok(())
    }

    pub fn wiener(&self, f: &Image) -> Result<Image> {
        self.check_input(f)?;
        self.wiener.apply(f, self.params.wiener_k)
    }

    /// Plain RL started from the floored observation.
    pub fn richardson_lucy(&self, f: &Image, iterations: usize) -> Result<Image> {
        self.check_input(f)?;
        let f = clamp_floor(f, self.params.floor)?;
        let op = self.operator();
        let mut u = f.clone();
        for _ in 0..iterations {
            u = rl_step(&u, &f, op)?;
        }
        Ok(u)
    }

    /// RRRL iterations from `initial` (floored before use).
    pub fn rrrl(&self, f: &Image, initial: &Image, iterations: usize) -> Result<Image> {
        self.check_input(f)?;
        let f = clamp_floor(f, self.params.floor)?;
        let mut state = SharpeningState::new(clamp_floor(initial, self.params.floor)?)?;
        for _ in 0..iterations {
            rrrl_step(&mut state, &f, self.operator(), &self.lut, &self.params)?;
        }
        Ok(state.iterate)
    }

    /// Wiener filter followed by `params.iterations` RRRL steps.
    pub fn run(&self, f: &Image) -> Result<Image> {
        Ok(self.run_timed(f)?.0)
    }

    pub fn run_timed(&self, f: &Image) -> Result<(Image, StageTimes)> {
        self.check_input(f)?;
        let start = Instant::now();
        let wiener = self.wiener.apply(f, self.params.wiener_k)?;
        let f = clamp_floor(f, self.params.floor)?;
        let mut state = SharpeningState::new(clamp_floor(&wiener, self.params.floor)?)?;
        let wiener_done = Instant::now();
        let mut times = StageTimes {
            wiener: wiener_done - start,
            ..StageTimes::default()
        };
        let mut last = wiener_done;
        for _ in 0..self.params.iterations {
            rrrl_step(&mut state, &f, self.operator(), &self.lut, &self.params)?;
            let now = Instant::now();
            times.iterations.push(now - last);
            last = now;
        }
        times.total = last - start;
        Ok((state.iterate, times))
    }

    /// Wiener output clamped to the floor: the starting point of the iterations.
    pub(crate) fn initial_iterate(&self, f: &Image) -> Result<Image> {
        clamp_floor(&self.wiener(f)?, self.params.floor)
    }
}

/// Wiener filter with a 2D transform.
pub fn wiener_2d(f: &Image, psf: &Psf, k: f64, plan: &Plan2D) -> Result<Image> {
    check_k(k)?;
    if plan.width() != f.width() || plan.height() != f.height() {
        return Err(Error::invalid("2D plan does not match image"));
    }
    FourierBlur2D::new(&psf.to_general_2d(), f.width(), f.height())?.wiener(f, k)
}

/// Wiener filter along the axis of a 1D PSF, one 1D transform per line.
pub fn wiener_1d(f: &Image, psf: &Psf, k: f64, plan: &FourierPlan) -> Result<Image> {
    check_k(k)?;
    FourierBlur1D::new(psf, plan.len())?.wiener(f, k)
}

/// The combined Wiener + RRRL pipeline.
pub fn wr3l(f: &Image, psf: &Psf, params: &DeconvParams, scenario: Scenario) -> Result<Image> {
    Deconvolver::new(psf, f.width(), f.height(), *params, scenario)?.run(f)
}
