//! TV diffusion term `D = div(Ψ'(|∇u|²) ∇u)` with `Ψ(s²) = √(s² + ε²)`.
//!
//! The discretization is the exact negative gradient of the discrete energy
//! computed by [`tv_energy`]. Every pair of horizontally or vertically
//! adjacent pixels contributes `¼ Ψ(a² + b²)`, where `a` is the difference
//! across the pair and `b` is the mean of the central differences along the
//! pair at both pixels. Indices are clamped at the boundary, which yields
//! homogeneous Neumann conditions.

use crate::error::{Error, Result};
use crate::image::Image;

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("TV smoothing must be positive, got {eps}")))
    }
}

/// Visits every neighbor pair. The callback gets the two pixel indices, the
/// four indices entering the tangential difference `(p+, p−, q+, q−)`,
/// the normal difference and the tangential difference.
#[inline]
fn for_each_edge(u: &Image, mut visit: impl FnMut(usize, usize, [usize; 4], f64, f64)) {
    let (w, h) = (u.width(), u.height());
    let v = u.as_slice();
    for y in 0..h {
        let yp = (y + 1).min(h - 1);
        let ym = y.saturating_sub(1);
        for x in 0..w.saturating_sub(1) {
            let (p, q) = (y * w + x, y * w + x + 1);
            let t = [yp * w + x, ym * w + x, yp * w + x + 1, ym * w + x + 1];
            let a = v[q] - v[p];
            let b = 0.25 * (v[t[0]] - v[t[1]] + v[t[2]] - v[t[3]]);
            visit(p, q, t, a, b);
        }
    }
    for y in 0..h.saturating_sub(1) {
        for x in 0..w {
            let xp = (x + 1).min(w - 1);
            let xm = x.saturating_sub(1);
            let (p, q) = (y * w + x, (y + 1) * w + x);
            let t = [y * w + xp, y * w + xm, (y + 1) * w + xp, (y + 1) * w + xm];
            let a = v[q] - v[p];
            let b = 0.25 * (v[t[0]] - v[t[1]] + v[t[2]] - v[t[3]]);
            visit(p, q, t, a, b);
        }
    }
}

/// Discrete TV energy whose negative gradient is [`diffusion_term`].
pub fn tv_energy(u: &Image, eps_reg: f64) -> Result<f64> {
    check_eps(eps_reg)?;
    let eps2 = eps_reg * eps_reg;
    let mut e = 0.0;
    for_each_edge(u, |_, _, _, a, b| e += 0.25 * (a * a + b * b + eps2).sqrt());
    Ok(e)
}

/// Signed diffusion field of the TV regularizer.
pub fn diffusion_term(u: &Image, eps_reg: f64) -> Result<Image> {
    check_eps(eps_reg)?;
    let eps2 = eps_reg * eps_reg;
    let mut d = vec![0.0; u.len()];
    for_each_edge(u, |p, q, t, a, b| {
        // ½ Ψ'(s²) with Ψ'(s²) = 1 / (2√(s² + ε²))
        let k = 0.25 / (a * a + b * b + eps2).sqrt();
        let ka = k * a;
        d[p] += ka;
        d[q] -= ka;
        let kb = 0.25 * k * b;
        d[t[0]] -= kb;
        d[t[1]] += kb;
        d[t[2]] -= kb;
        d[t[3]] += kb;
    });
    Ok(Image::from_raw(u.width(), u.height(), d))
}
