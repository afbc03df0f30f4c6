//! RRRL iterations spread over worker threads; the output is identical to
//! the serial run.

use std::time::Instant;

use wr3l::deconv::{rrrl_deblur_parallel, wr3l, Scenario};
use wr3l::synth::{degrade, test_scene, NoiseSpec};
use wr3l::{Axis, DeconvParams, Psf};

fn main() -> wr3l::Result<()> {
    let g = test_scene(512, 512);
    let psf = Psf::uniform_box(Axis::Vertical, 27.0)?;
    let f = degrade(&g, &psf, NoiseSpec::Gaussian { sigma: 2.0 }, 5, true)?;
    let params = DeconvParams::default();

    let t = Instant::now();
    let serial = wr3l(&f, &psf, &params, Scenario::Box1D)?;
    println!("serial:    {:7.1} ms", t.elapsed().as_secs_f64() * 1e3);
    for workers in [1, 2, 4, 8] {
        let t = Instant::now();
        let par = rrrl_deblur_parallel(&f, &psf, &params, workers)?;
        println!(
            "{workers} workers: {:7.1} ms, max diff {:.1e}",
            t.elapsed().as_secs_f64() * 1e3,
            par.max_abs_diff(&serial)
        );
    }
    Ok(())
}
