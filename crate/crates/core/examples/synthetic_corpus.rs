//! Generates a small degraded corpus with a manifest.
//!
//!     cargo run --example synthetic_corpus -- corpus/

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use wr3l::synth::{degrade, snr, test_scene, ManifestEntry, NoiseSpec};
use wr3l::{pgm, Axis, Psf};

fn main() -> wr3l::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "corpus".into()));
    fs::create_dir_all(&dir)?;
    let source = dir.join("scene.pgm");
    let g = test_scene(256, 256);
    pgm::write(&source, &g)?;

    let mut manifest = fs::File::create(dir.join("manifest.tsv"))?;
    let psfs = [
        ("box:h:21", Psf::uniform_box(Axis::Horizontal, 21.0)?),
        ("box:v:27", Psf::uniform_box(Axis::Vertical, 27.0)?),
        ("line:45:21", Psf::linear_motion(21.0, 45.0)?),
    ];
    let noises = ["none", "gauss:5", "impulse:0.15"];
    for (i, (name, psf)) in psfs.iter().enumerate() {
        for (j, noise) in noises.iter().enumerate() {
            let noise: NoiseSpec = noise.parse()?;
            let seed = (10 * i + j) as u64;
            let f = degrade(&g, psf, noise, seed, true)?;
            let file = dir.join(format!("item_{i}{j}.pgm"));
            pgm::write(&file, &f)?;
            let entry = ManifestEntry {
                output: file.display().to_string(),
                source: source.display().to_string(),
                psf: name.to_string(),
                noise,
                seed,
                clipped: true,
            };
            writeln!(manifest, "{}", entry.to_line())?;
            println!("{}  {name:<10} {noise:<13} {:.2} dB", file.display(), snr(&f, &g));
        }
    }
    Ok(())
}
