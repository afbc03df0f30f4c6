//! Lookup-table evaluation of the information divergence against the
//! direct formula.

use std::time::Instant;

use wr3l::deconv::{r1_direct, DivergenceLut};

fn main() {
    let lut = DivergenceLut::new();
    println!("{:>12} {:>14} {:>14} {:>10}", "s", "table", "direct", "error");
    for s in [1e-6, 1e-3, 0.1, 0.5, 1.0, 2.0, 10.0, 64.9, 100.0] {
        let (a, b) = (lut.r1(s), r1_direct(s));
        println!("{s:>12} {a:>14.8} {b:>14.8} {:>10.1e}", (a - b).abs());
    }
    println!("(beyond s = 65 the table continues linearly)");

    let n = 1_000_000;
    let ratios: Vec<f64> = (0..n).map(|i| 1e-3 + 60.0 * i as f64 / n as f64).collect();
    let t = Instant::now();
    let table: f64 = ratios.iter().map(|&s| lut.divergence(100.0, 100.0 * s)).sum();
    let table_t = t.elapsed();
    let t = Instant::now();
    let direct: f64 = ratios.iter().map(|&s| 100.0 * r1_direct(s)).sum();
    let direct_t = t.elapsed();
    println!("10^6 evaluations: table {table_t:?}, direct {direct_t:?} (sums {table:.3} / {direct:.3})");
}
