//! Real 2D FFT of an image, its inverse, and periodic convolution.

use wr3l::fft::{fft2_forward, fft2_inverse, fourier_convolve, Plan2D};
use wr3l::synth::test_scene;
use wr3l::Psf;

fn main() -> wr3l::Result<()> {
    let img = test_scene(256, 256);
    let plan = Plan2D::new(256, 256)?;
    let spectrum = fft2_forward(&plan, &img)?;
    let dc = spectrum.at(0, 0).re / img.len() as f64;
    println!("mean via DC coefficient: {dc:.4} (direct {:.4})", img.mean());

    let back = fft2_inverse(&plan, &spectrum)?;
    println!("round-trip error: {:.2e}", back.max_abs_diff(&img));

    let psf = Psf::linear_motion(15.0, 30.0)?;
    let blurred = fourier_convolve(&img, &psf)?;
    println!("periodic blur with {psf}: mean {:.4}", blurred.mean());
    Ok(())
}
