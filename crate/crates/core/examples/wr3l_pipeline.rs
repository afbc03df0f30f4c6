//! Full pipeline: degrade a test scene, compare Wiener, RRRL and WR3L, and
//! write the images as PGM.
//!
//!     cargo run --release --example wr3l_pipeline -- [out_dir]

use std::path::PathBuf;

use wr3l::deconv::{Deconvolver, Scenario};
use wr3l::synth::{degrade, snr, test_scene, NoiseSpec};
use wr3l::{pgm, Axis, DeconvParams, Psf};

fn main() -> wr3l::Result<()> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| ".".into()));
    let g = test_scene(256, 256);
    let psf = Psf::uniform_box(Axis::Horizontal, 21.0)?;

    for (noise, k) in [
        (NoiseSpec::None, 0.006),
        (NoiseSpec::Gaussian { sigma: 5.0 }, 0.06),
        (NoiseSpec::Impulse { density: 0.15 }, 0.16),
    ] {
        let f = degrade(&g, &psf, noise, 7, true)?;
        let params = DeconvParams::default().with_wiener_k(k);
        let d = Deconvolver::new(&psf, 256, 256, params, Scenario::auto(&psf))?;
        let wiener = d.wiener(&f)?;
        let rrrl = d.rrrl(&f, &f, 30)?;
        let (restored, times) = d.run_timed(&f)?;
        println!(
            "{noise:<13} blurred {:5.2}  wiener {:5.2}  rrrl(30) {:5.2}  wr3l {:5.2} dB  ({:.1} ms)",
            snr(&f, &g),
            snr(&wiener, &g),
            snr(&rrrl, &g),
            snr(&restored, &g),
            times.total.as_secs_f64() * 1e3
        );
        let tag = noise.to_string().replace(':', "_");
        pgm::write(out.join(format!("blurred_{tag}.pgm")), &f)?;
        pgm::write(out.join(format!("restored_{tag}.pgm")), &restored)?;
    }
    pgm::write(out.join("original.pgm"), &g)?;
    Ok(())
}
