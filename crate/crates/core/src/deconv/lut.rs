//! Table-driven evaluation of the information divergence
//! `r_f(s) = s − f − f ln(s/f) = f · r₁(s/f)` with `r₁(s) = s − 1 − ln s`.
//!
//! The table holds `r₁` at 1024 equally spaced nodes per binary octave. The
//! node index and interpolation fraction come straight from the bits of an
//! `f64`, so a lookup costs a shift, a mask and one linear interpolation.

/// Nodes per octave, as a number of leading mantissa bits.
const NODE_BITS: u32 = 10;
const FRACTION_BITS: u32 = 52 - NODE_BITS;
const FRACTION_MASK: u64 = (1 << FRACTION_BITS) - 1;
const FRACTION_SCALE: f64 = 1.0 / (1u64 << FRACTION_BITS) as f64;

/// Smallest tabulated argument, 2^-20.
pub const LUT_MIN: f64 = 9.5367431640625e-7;
/// Beyond this argument `r₁` is continued linearly.
pub const LUT_MAX: f64 = 65.0;

#[inline]
pub fn r1_direct(s: f64) -> f64 {
    s - 1.0 - s.ln()
}

#[derive(Debug, Clone)]
pub struct DivergenceLut {
    table: Vec<f64>,
    base: u64,
    linear_slope: f64,
    linear_intercept: f64,
}

impl Default for DivergenceLut {
    fn default() -> Self {
        Self::new()
    }
}

impl DivergenceLut {
    pub fn new() -> Self {
        let base = LUT_MIN.to_bits() >> FRACTION_BITS;
        let top = (LUT_MAX.to_bits() >> FRACTION_BITS) + 1;
        let table = (base..=top)
            .map(|k| r1_direct(f64::from_bits(k << FRACTION_BITS)))
            .collect();
        // match value and slope of r₁ at LUT_MAX
        let linear_slope = 1.0 - 1.0 / LUT_MAX;
        let linear_intercept = r1_direct(LUT_MAX) - linear_slope * LUT_MAX;
        Self {
            table,
            base,
            linear_slope,
            linear_intercept,
        }
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    /// `r₁(s)` for `s > 0`.
    #[inline]
    pub fn r1(&self, s: f64) -> f64 {
        if s > LUT_MAX {
            return self.linear_slope * s + self.linear_intercept;
        }
        if s < LUT_MIN {
            return r1_direct(s);
        }
        let bits = s.to_bits();
        let idx = ((bits >> FRACTION_BITS) - self.base) as usize;
        let t = (bits & FRACTION_MASK) as f64 * FRACTION_SCALE;
        let lo = self.table[idx];
        lo + t * (self.table[idx + 1] - lo)
    }

    /// `r_f(s) = f · r₁(s/f)` for `f > 0`, `s > 0`.
    #[inline]
    pub fn divergence(&self, f: f64, s: f64) -> f64 {
        f * self.r1(s / f)
    }
}
