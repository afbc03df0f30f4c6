//! Sliding-window box filter: same result as direct summation, cost per
//! pixel independent of the kernel length.

use std::time::Instant;

use wr3l::conv::{box_convolve_instrumented, spatial_convolve};
use wr3l::synth::test_scene;
use wr3l::{Axis, Psf};

fn main() -> wr3l::Result<()> {
    let img = test_scene(512, 512);
    println!("{:>6} {:>12} {:>10} {:>10} {:>12}", "length", "ops/pixel", "box ms", "direct ms", "max diff");
    for length in [3.0, 9.0, 21.5, 27.0, 63.0] {
        let psf = Psf::uniform_box(Axis::Vertical, length)?;
        let t = Instant::now();
        let (fast, counts) = box_convolve_instrumented(&img, &psf)?;
        let fast_ms = t.elapsed().as_secs_f64() * 1e3;
        let t = Instant::now();
        let slow = spatial_convolve(&img, &psf)?;
        let slow_ms = t.elapsed().as_secs_f64() * 1e3;
        println!(
            "{length:>6} {:>12.2} {fast_ms:>10.2} {slow_ms:>10.2} {:>12.2e}",
            counts.update_ops as f64 / counts.updated_pixels as f64,
            fast.max_abs_diff(&slow)
        );
    }
    Ok(())
}
