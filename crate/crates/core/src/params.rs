use crate::error::{Error, Result};

/// Penalizer applied to the information divergence in the data term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DataTerm {
    /// Regularized L1, `Φ(z) = √(z + ε²)`.
    Robust,
    /// `Φ(z) = z`, giving unit weights; RRRL then reduces to plain RL when α = 0.
    Identity,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeconvParams {
    /// Wiener filter constant `K`.
    pub wiener_k: f64,
    /// Weight of the TV regularizer.
    pub alpha: f64,
    pub iterations: usize,
    /// Smoothing of the robust data penalizer.
    pub eps_data: f64,
    /// Smoothing of the TV diffusivity.
    pub eps_reg: f64,
    /// Positivity floor applied to inputs of the multiplicative iterations.
    pub floor: f64,
    pub data_term: DataTerm,
}

impl Default for DeconvParams {
    fn default() -> Self {
        Self {
            wiener_k: 0.006,
            alpha: 0.003,
            iterations: 5,
            eps_data: 1.0,
            eps_reg: 0.01,
            floor: 0.1,
            data_term: DataTerm::Robust,
        }
    }
}

impl DeconvParams {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64, name: &str| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::invalid(format!("{name} must be positive, got {v}")))
            }
        };
        positive(self.wiener_k, "wiener_k")?;
        positive(self.eps_data, "eps_data")?;
        positive(self.eps_reg, "eps_reg")?;
        positive(self.floor, "floor")?;
        if !(self.alpha >= 0.0) || !self.alpha.is_finite() {
            return Err(Error::invalid(format!("alpha must be non-negative, got {}", self.alpha)));
        }
        Ok(())
    }

    pub fn with_iterations(mut self, iterations: usize) -> Self {
        self.iterations = iterations;
        self
    }

    pub fn with_wiener_k(mut self, k: f64) -> Self {
        self.wiener_k = k;
        self
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }
}
