use crate::error::{check_param, Result};

/// Parameters of the semilinear model: dimension `n`, order `σ`, Riesz order
/// `α`, power `p` and data-space exponent `m` (`m = 2` is the pure L² regime).
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ModelParams {
    pub n: usize,
    pub sigma: f64,
    pub alpha: f64,
    pub p: f64,
    pub m: f64,
}

impl ModelParams {
    pub fn new(n: usize, sigma: f64, alpha: f64, p: f64, m: f64) -> Result<Self> {
        let params = Self {
            n,
            sigma,
            alpha,
            p,
            m,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        check_param("n", self.n as f64, self.n >= 1, "[1, ∞)")?;
        check_param("sigma", self.sigma, self.sigma >= 1.0, "[1, ∞)")?;
        check_param(
            "alpha",
            self.alpha,
            self.alpha > 0.0 && self.alpha < self.n as f64,
            "(0, n)",
        )?;
        check_param("p", self.p, self.p > 1.0, "(1, ∞)")?;
        check_param("m", self.m, (1.0..=2.0).contains(&self.m), "[1, 2]")?;
        Ok(())
    }

    /// Linear decay rate `(n/2σ)(1/m - 1/2)` of the L² norm.
    pub fn base_rate(&self) -> f64 {
        self.n as f64 / (2.0 * self.sigma) * (1.0 / self.m - 0.5)
    }
}
