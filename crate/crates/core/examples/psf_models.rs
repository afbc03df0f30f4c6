//! PSF construction: uniform boxes, rasterized motion, text files, and the
//! adjoint.

use wr3l::{Axis, Psf};

fn show(psf: &Psf) {
    let (cx, cy) = psf.center();
    println!("{psf}  {}x{}  center ({cx}, {cy})", psf.width(), psf.height());
    for y in 0..psf.height() {
        let row: Vec<String> = (0..psf.width())
            .map(|x| format!("{:.3}", psf.weights()[y * psf.width() + x]))
            .collect();
        println!("  {}", row.join(" "));
    }
}

fn main() -> wr3l::Result<()> {
    show(&Psf::uniform_box(Axis::Horizontal, 5.0)?);
    show(&Psf::uniform_box(Axis::Horizontal, 4.5)?);
    show(&Psf::linear_motion(5.0, 45.0)?);

    let skewed = Psf::parse("1D h 4 0\n0.4 0.3 0.2 0.1\n")?;
    show(&skewed);
    show(&skewed.adjoint());
    print!("{}", skewed.to_text());
    Ok(())
}
