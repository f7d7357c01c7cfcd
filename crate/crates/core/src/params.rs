use crate::error::{Result, SketchError};

/// Default constant in `α = ⌈c_α ε^{-5/3}⌉`.
pub const DEFAULT_C_ALPHA: f64 = 2.0;
/// Default constant in `β = ⌈c_β ε^{-8/5}⌉`.
pub const DEFAULT_C_BETA: f64 = 2.0;
/// Default constant in the replica count of the median query.
pub const DEFAULT_C_MED: f64 = 8.0;

/// Inputs must satisfy `w_max / w_min ≤ n^POLY_WEIGHT_EXPONENT`.
pub const POLY_WEIGHT_EXPONENT: i32 = 8;

/// Accuracy and confidence targets plus the sampling constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SketchParams {
    pub eps: f64,
    pub delta: f64,
    pub c_alpha: f64,
    pub c_beta: f64,
    pub c_med: f64,
}

impl SketchParams {
    pub fn new(eps: f64, delta: f64) -> Result<Self> {
        let params = Self {
            eps,
            delta,
            c_alpha: DEFAULT_C_ALPHA,
            c_beta: DEFAULT_C_BETA,
            c_med: DEFAULT_C_MED,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn with_constants(mut self, c_alpha: f64, c_beta: f64) -> Result<Self> {
        self.c_alpha = c_alpha;
        self.c_beta = c_beta;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let open_unit = |x: f64| x > 0.0 && x < 1.0;
        if !open_unit(self.eps) {
            return Err(SketchError::InvalidParameter(format!(
                "eps must lie in (0, 1), got {}",
                self.eps
            )));
        }
        if !open_unit(self.delta) {
            return Err(SketchError::InvalidParameter(format!(
                "delta must lie in (0, 1), got {}",
                self.delta
            )));
        }
        for (name, c) in [("c_alpha", self.c_alpha), ("c_beta", self.c_beta), ("c_med", self.c_med)] {
            if !(c.is_finite() && c > 0.0) {
                return Err(SketchError::InvalidParameter(format!(
                    "{name} must be positive, got {c}"
                )));
            }
        }
        Ok(())
    }

    /// Per-heavy-vertex draw count of the basic sketch.
    pub fn alpha(&self) -> usize {
        ((self.c_alpha * self.eps.powf(-5.0 / 3.0)).ceil() as usize).max(1)
    }

    /// Per-vertex in-arc draw count of the improved sketch.
    pub fn beta(&self) -> usize {
        ((self.c_beta * self.eps.powf(-8.0 / 5.0)).ceil() as usize).max(1)
    }

    /// Preprocessing threshold of the basic sketch, `c_α ε^{1/3}`, capped at
    /// 1 since no cut has conductance above 1.
    pub fn h_basic(&self) -> f64 {
        (self.c_alpha * self.eps.cbrt()).min(1.0)
    }

    /// Odd replica count `2⌈(c_med/2) ln(1/δ)⌉ + 1` for the median query.
    pub fn replicas(&self) -> usize {
        2 * ((self.c_med / 2.0) * (1.0 / self.delta).ln()).ceil() as usize + 1
    }
}
