//! Wiener deconvolution for several values of K, on a blurred and noisy
//! synthetic image.

use wr3l::deconv::{Deconvolver, Scenario};
use wr3l::synth::{degrade, snr, test_scene, NoiseSpec};
use wr3l::{Axis, DeconvParams, Psf};

fn main() -> wr3l::Result<()> {
    let g = test_scene(256, 256);
    let psf = Psf::uniform_box(Axis::Horizontal, 21.0)?;
    let f = degrade(&g, &psf, NoiseSpec::Gaussian { sigma: 2.0 }, 1, true)?;
    println!("blurred: {:.2} dB", snr(&f, &g));
    for k in [1e-4, 1e-3, 0.006, 0.06, 0.16] {
        let params = DeconvParams::default().with_wiener_k(k);
        for scenario in [Scenario::Fourier1D, Scenario::Fourier2D] {
            let d = Deconvolver::new(&psf, 256, 256, params, scenario)?;
            println!("K = {k:<7} {scenario:<10} {:.2} dB", snr(&d.wiener(&f)?, &g));
        }
    }
    Ok(())
}
