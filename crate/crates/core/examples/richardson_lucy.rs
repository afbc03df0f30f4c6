//! Plain Richardson-Lucy under noise: quality first rises, then falls as
//! noise gets amplified.

use wr3l::deconv::{rl_step, Deconvolver, Scenario};
use wr3l::image::clamp_floor;
use wr3l::synth::{degrade, snr, test_scene, NoiseSpec};
use wr3l::{Axis, DeconvParams, Psf};

fn main() -> wr3l::Result<()> {
    let g = test_scene(256, 256);
    let psf = Psf::uniform_box(Axis::Horizontal, 11.0)?;
    let f = degrade(&g, &psf, NoiseSpec::Gaussian { sigma: 8.0 }, 3, true)?;
    let d = Deconvolver::new(&psf, 256, 256, DeconvParams::default(), Scenario::Box1D)?;
    let f = clamp_floor(&f, 0.1)?;

    let mut u = f.clone();
    let mut best = (0, snr(&u, &g));
    for k in 1..=150 {
        u = rl_step(&u, &f, d.operator())?;
        let s = snr(&u, &g);
        if s > best.1 {
            best = (k, s);
        }
        if k % 25 == 0 {
            println!("iteration {k:>3}: {s:.2} dB");
        }
    }
    println!("best: {:.2} dB at iteration {}", best.1, best.0);
    Ok(())
}
