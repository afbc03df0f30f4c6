//! Command-line front end: `blur`, `deblur`, `snr` and `bench`.
//!
//! Exit codes: 0 success, 1 usage error, 2 runtime error.

use std::ffi::OsString;
use std::fs::OpenOptions;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bench::{bench_pipeline, report, BenchConfig, ReportFormat};
use crate::deconv::{Deconvolver, Scenario};
use crate::error::{Error, Result};
use crate::params::DeconvParams;
use crate::pgm;
use crate::psf::{Axis, Psf};
use crate::synth::{degrade, snr, ManifestEntry, NoiseSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "wr3l", version, about = "Robust deconvolution of grey-value images with known blur")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Blur an image and add noise.
    Blur(BlurArgs),
    /// Restore a blurred image.
    Deblur(DeblurArgs),
    /// Print the SNR of an image with respect to a reference, in dB.
    Snr { restored: PathBuf, reference: PathBuf },
    /// Time the full deblurring pipeline.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
struct BlurArgs {
    input: PathBuf,
    output: PathBuf,
    /// box:<axis>:<length>, line:<angle>:<length>, file:<path> or delta
    #[arg(long)]
    psf: String,
    /// none, gauss:<sigma> or impulse:<density>
    #[arg(long, default_value = "none")]
    noise: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Manifest to append to; defaults to manifest.tsv next to the output.
    #[arg(long)]
    manifest: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Wiener,
    Rl,
    Rrrl,
    Wr3l,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ScenarioArg {
    Auto,
    Box,
    Fourier1d,
    Fourier2d,
}

impl ScenarioArg {
    fn resolve(self, psf: &Psf) -> Scenario {
        match self {
            ScenarioArg::Auto => Scenario::auto(psf),
            ScenarioArg::Box => Scenario::Box1D,
            ScenarioArg::Fourier1d => Scenario::Fourier1D,
            ScenarioArg::Fourier2d => Scenario::Fourier2D,
        }
    }
}

#[derive(Debug, Args)]
struct ParamArgs {
    #[arg(long)]
    psf: String,
    /// Wiener filter constant.
    #[arg(long, default_value_t = 0.006)]
    k: f64,
    #[arg(long, default_value_t = 0.003)]
    alpha: f64,
    #[arg(long, default_value_t = 5)]
    iters: usize,
    #[arg(long, default_value_t = 1.0)]
    eps_data: f64,
    #[arg(long, default_value_t = 0.01)]
    eps_reg: f64,
    #[arg(long, default_value_t = 0.1)]
    floor: f64,
    #[arg(long, value_enum, default_value = "auto")]
    scenario: ScenarioArg,
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

impl ParamArgs {
    fn params(&self) -> DeconvParams {
        DeconvParams {
            wiener_k: self.k,
            alpha: self.alpha,
            iterations: self.iters,
            eps_data: self.eps_data,
            eps_reg: self.eps_reg,
            floor: self.floor,
            ..DeconvParams::default()
        }
    }
}

#[derive(Debug, Args)]
struct DeblurArgs {
    input: PathBuf,
    output: PathBuf,
    #[arg(long, value_enum, default_value = "wr3l")]
    method: Method,
    #[command(flatten)]
    params: ParamArgs,
    /// Print per-stage timings.
    #[arg(long)]
    time: bool,
}

#[derive(Debug, Args)]
struct BenchArgs {
    input: PathBuf,
    #[command(flatten)]
    params: ParamArgs,
    /// Only the full pipeline can be benchmarked.
    #[arg(long, value_enum, default_value = "wr3l")]
    method: Method,
    #[arg(long, default_value_t = 100)]
    runs: usize,
    #[arg(long, default_value_t = 0)]
    warmup: usize,
    #[arg(long, default_value = "human")]
    format: String,
}

/// Parses the command-line PSF notation.
pub fn parse_psf_spec(spec: &str) -> Result<Psf> {
    let parts: Vec<&str> = spec.split(':').collect();
    let number = |s: &str| -> Result<f64> {
        s.parse()
            .map_err(|_| Error::invalid(format!("bad number `{s}` in PSF spec `{spec}`")))
    };
    match parts.as_slice() {
        ["delta"] => Ok(Psf::delta()),
        ["box", axis, len] => Psf::uniform_box(Axis::parse(axis)?, number(len)?),
        ["line", angle, len] => Psf::linear_motion(number(len)?, number(angle)?),
        ["file", ..] => Psf::load(&spec["file:".len()..]),
        _ => Err(Error::invalid(format!(
            "unrecognized PSF spec `{spec}` (expected box:<axis>:<len>, line:<angle>:<len>, file:<path>)"
        ))),
    }
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidParameter(_) => EXIT_USAGE,
        _ => EXIT_RUNTIME,
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn execute(command: Command, out: &mut dyn Write) -> Result<()> {
    match command {
        Command::Blur(a) => blur(a),
        Command::Deblur(a) => deblur(a, out),
        Command::Snr { restored, reference } => {
            let (u, u0) = (pgm::read(&restored)?, pgm::read(&reference)?);
            if !u.same_shape(&u0) {
                return Err(Error::contract(format!(
                    "image sizes differ: {}x{} vs {}x{}",
                    u.width(),
                    u.height(),
                    u0.width(),
                    u0.height()
                )));
            }
            writeln!(out, "{}", format_snr(snr(&u, &u0)))?;
            Ok(())
        }
        Command::Bench(a) => bench(a, out),
    }
}

pub fn format_snr(db: f64) -> String {
    if db == f64::INFINITY {
        "inf".into()
    } else if db == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{db:.2}")
    }
}

fn blur(a: BlurArgs) -> Result<()> {
    let psf = parse_psf_spec(&a.psf)?;
    let noise: NoiseSpec = a.noise.parse()?;
    let g = pgm::read(&a.input)?;
    let degraded = degrade(&g, &psf, noise, a.seed, true)?;
    pgm::write(&a.output, &degraded)?;
    let manifest = a
        .manifest
        .unwrap_or_else(|| a.output.with_file_name("manifest.tsv"));
    let entry = ManifestEntry {
        output: display(&a.output),
        source: display(&a.input),
        psf: a.psf,
        noise,
        seed: a.seed,
        clipped: true,
    };
    let mut file = OpenOptions::new().create(true).append(true).open(manifest)?;
    writeln!(file, "{}", entry.to_line())?;
    Ok(())
}

fn display(p: &Path) -> String {
    p.display().to_string()
}

fn deblur(a: DeblurArgs, out: &mut dyn Write) -> Result<()> {
    let psf = parse_psf_spec(&a.params.psf)?;
    let params = a.params.params();
    let f = pgm::read(&a.input)?;
    let scenario = a.params.scenario.resolve(&psf);
    let threads = a.params.threads;
    if threads == 0 {
        return Err(Error::invalid("--threads must be at least 1"));
    }
    if threads > 1 && a.method != Method::Wr3l {
        return Err(Error::invalid("--threads applies to --method wr3l only"));
    }
    let d = Deconvolver::new(&psf, f.width(), f.height(), params, scenario)?;
    log::info!("deblurring {} with {} ({scenario})", a.input.display(), psf);
    let start = std::time::Instant::now();
    let restored = match a.method {
        Method::Wiener => d.wiener(&f)?,
        Method::Rl => d.richardson_lucy(&f, params.iterations)?,
        Method::Rrrl => d.rrrl(&f, &f, params.iterations)?,
        Method::Wr3l if threads > 1 => d.run_parallel(&f, threads)?,
        Method::Wr3l => {
            let (u, times) = d.run_timed(&f)?;
            if a.time {
                writeln!(out, "wiener_ms {:.3}", times.wiener.as_secs_f64() * 1e3)?;
                for (i, t) in times.iterations.iter().enumerate() {
                    writeln!(out, "rrrl_iteration_{}_ms {:.3}", i + 1, t.as_secs_f64() * 1e3)?;
                }
                writeln!(out, "rrrl_total_ms {:.3}", times.rrrl_total().as_secs_f64() * 1e3)?;
            }
            u
        }
    };
    if a.time {
        writeln!(out, "total_ms {:.3}", start.elapsed().as_secs_f64() * 1e3)?;
    }
    pgm::write(&a.output, &restored)
}

fn bench(a: BenchArgs, out: &mut dyn Write) -> Result<()> {
    if a.method != Method::Wr3l {
        return Err(Error::invalid("bench times the wr3l pipeline only"));
    }
    let format: ReportFormat = a.format.parse()?;
    let psf = parse_psf_spec(&a.params.psf)?;
    let f = pgm::read(&a.input)?;
    let config = BenchConfig {
        runs: a.runs,
        warmup: a.warmup,
        threads: a.params.threads,
    };
    let scenario = a.params.scenario.resolve(&psf);
    let stats = bench_pipeline(&f, &psf, &a.params.params(), scenario, config)?;
    write!(out, "{}", report(&stats, format))?;
    Ok(())
}
