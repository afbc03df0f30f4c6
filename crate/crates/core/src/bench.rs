//! Repeated timing of the deblurring pipeline.

use std::fmt::Write as _;
use std::str::FromStr;
use std::time::{Duration, Instant};

use crate::deconv::{Deconvolver, Scenario};
use crate::error::{Error, Result};
use crate::image::Image;
use crate::params::DeconvParams;
use crate::psf::Psf;

/// Sample statistics in milliseconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub mean: f64,
    /// Sample standard deviation (n − 1 denominator); zero for a single run.
    pub std: f64,
    pub min: f64,
    pub max: f64,
}

impl Summary {
    pub fn from_samples(samples: &[f64]) -> Option<Summary> {
        if samples.is_empty() {
            return None;
        }
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let std = if samples.len() > 1 {
            (samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        let min = samples.iter().copied().fold(f64::INFINITY, f64::min);
        let max = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Some(Summary { mean, std, min, max })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Wiener,
    /// Mean duration of one RRRL iteration within a run.
    RrrlIteration,
    RrrlTotal,
    Total,
}

impl Stage {
    pub const ALL: [Stage; 4] = [Stage::Wiener, Stage::RrrlIteration, Stage::RrrlTotal, Stage::Total];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Wiener => "wiener",
            Stage::RrrlIteration => "rrrl_iteration",
            Stage::RrrlTotal => "rrrl_total",
            Stage::Total => "total",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimingStats {
    pub runs: usize,
    pub scenario: Scenario,
    /// Per-stage statistics; stages that were not measured are absent.
    pub stages: Vec<(Stage, Summary)>,
}

impl TimingStats {
    pub fn stage(&self, stage: Stage) -> Option<Summary> {
        self.stages.iter().find(|(s, _)| *s == stage).map(|&(_, s)| s)
    }

    pub fn total(&self) -> Summary {
        self.stage(Stage::Total).expect("total is always measured")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BenchConfig {
    pub runs: usize,
    pub warmup: usize,
    /// More than one thread times the parallel pipeline; only totals are
    /// reported then.
    pub threads: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self { runs: 100, warmup: 1, threads: 1 }
    }
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

/// Times `runs` full pipeline runs after `warmup` untimed ones. Plan and
/// table construction happen once, before timing starts.
pub fn bench_pipeline(
    f: &Image,
    psf: &Psf,
    params: &DeconvParams,
    scenario: Scenario,
    config: BenchConfig,
) -> Result<TimingStats> {
    if config.runs == 0 {
        return Err(Error::invalid("benchmark needs at least one run"));
    }
    if config.threads == 0 {
        return Err(Error::invalid("thread count must be positive"));
    }
    let deconv = Deconvolver::new(psf, f.width(), f.height(), *params, scenario)?;
    for _ in 0..config.warmup {
        deconv.run(f)?;
    }
    let mut wiener = Vec::with_capacity(config.runs);
    let mut per_iter = Vec::with_capacity(config.runs);
    let mut rrrl = Vec::with_capacity(config.runs);
    let mut total = Vec::with_capacity(config.runs);
    for _ in 0..config.runs {
        if config.threads > 1 {
            let start = Instant::now();
            deconv.run_parallel(f, config.threads)?;
            total.push(ms(start.elapsed()));
            continue;
        }
        let (_, t) = deconv.run_timed(f)?;
        wiener.push(ms(t.wiener));
        if !t.iterations.is_empty() {
            per_iter.push(ms(t.rrrl_total()) / t.iterations.len() as f64);
        }
        rrrl.push(ms(t.rrrl_total()));
        total.push(ms(t.total));
    }
    let stages = [
        (Stage::Wiener, wiener),
        (Stage::RrrlIteration, per_iter),
        (Stage::RrrlTotal, rrrl),
        (Stage::Total, total),
    ]
    .into_iter()
    .filter_map(|(stage, samples)| Summary::from_samples(&samples).map(|s| (stage, s)))
    .collect();
    Ok(TimingStats { runs: config.runs, scenario, stages })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Human,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "human" | "text" => Ok(ReportFormat::Human),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(Error::invalid(format!("unknown report format `{other}`"))),
        }
    }
}

pub const CSV_HEADER: &str = "scenario,stage,runs,mean_ms,std_ms,min_ms,max_ms";

pub fn report(stats: &TimingStats, format: ReportFormat) -> String {
    let mut out = String::new();
    match format {
        ReportFormat::Csv => {
            out.push_str(CSV_HEADER);
            out.push('\n');
            for (stage, s) in &stats.stages {
                let _ = writeln!(
                    out,
                    "{},{},{},{:.3},{:.3},{:.3},{:.3}",
                    stats.scenario.name(),
                    stage.name(),
                    stats.runs,
                    s.mean,
                    s.std,
                    s.min,
                    s.max
                );
            }
        }
        ReportFormat::Human => {
            let _ = writeln!(out, "scenario {} ({} runs)", stats.scenario, stats.runs);
            for (stage, s) in &stats.stages {
                let _ = writeln!(
                    out,
                    "  {:<15} {:>10.3} ms  ± {:.3}  [{:.3} .. {:.3}]",
                    stage.name(),
                    s.mean,
                    s.std,
                    s.min,
                    s.max
                );
            }
        }
    }
    out
}

/// One parsed CSV report row.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub scenario: String,
    pub stage: String,
    pub runs: usize,
    pub summary: Summary,
}

pub fn parse_csv(text: &str) -> Result<Vec<CsvRow>> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    if lines.next().map(str::trim) != Some(CSV_HEADER) {
        return Err(Error::Format("missing CSV header".into()));
    }
    lines
        .map(|line| {
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 7 {
                return Err(Error::Format(format!("expected 7 columns: `{line}`")));
            }
            let num = |i: usize| -> Result<f64> {
                cols[i].parse().map_err(|_| Error::Format(format!("bad number `{}`", cols[i])))
            };
            Ok(CsvRow {
                scenario: cols[0].to_owned(),
                stage: cols[1].to_owned(),
                runs: cols[2].parse().map_err(|_| Error::Format("bad run count".into()))?,
                summary: Summary { mean: num(3)?, std: num(4)?, min: num(5)?, max: num(6)? },
            })
        })
        .collect()
}
