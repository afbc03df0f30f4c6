//! Times Wiener + 5 RRRL iterations in the three convolution scenarios and
//! prints CSV.
//!
//!     cargo run --release --example benchmark -- [runs]

use wr3l::bench::{bench_pipeline, report, BenchConfig, ReportFormat};
use wr3l::deconv::Scenario;
use wr3l::synth::{synth_blur, test_scene};
use wr3l::{Axis, DeconvParams, Psf};

fn main() -> wr3l::Result<()> {
    let runs = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(100);
    let psf = Psf::uniform_box(Axis::Vertical, 27.0)?;
    for size in [256, 512] {
        let f = synth_blur(&test_scene(size, size), &psf, true)?;
        for scenario in Scenario::ALL {
            let cfg = BenchConfig { runs, warmup: 1, threads: 1 };
            let stats = bench_pipeline(&f, &psf, &DeconvParams::default(), scenario, cfg)?;
            println!("# {size}x{size}");
            print!("{}", report(&stats, ReportFormat::Csv));
        }
    }
    Ok(())
}
