//! The reverse Huber ("berhu") penalty.
//!
//! Minimizing the perspective term `x²/(γz) + μz` over `z ∈ [0, 1]` gives a
//! penalty that is linear near the origin and quadratic in the tails:
//!
//! ```text
//! B(x) = 2|x|·√(μ/γ)     if |x| ≤ √(γμ)
//!        x²/γ + μ        otherwise
//! ```
//!
//! with minimizing indicator `z*(x) = min(1, |x|/√(γμ))`. Eliminating `z` this
//! way turns the perspective relaxation into a smooth loss plus a separable
//! penalty whose prox is available in closed form.

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BerhuPenalty {
    mu: f64,
    gamma: f64,
}

impl BerhuPenalty {
    /// `mu = 0` is accepted and degenerates to the ridge penalty `x²/γ`.
    pub fn new(mu: f64, gamma: f64) -> Result<Self> {
        if !(mu >= 0.0 && mu.is_finite()) {
            return Err(invalid(format!("berhu mu must be finite and >= 0, got {mu}")));
        }
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(invalid(format!("berhu gamma must be finite and > 0, got {gamma}")));
        }
        Ok(Self { mu, gamma })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// `√(γμ)`: where the linear and quadratic pieces meet.
    pub fn knot(&self) -> f64 {
        (self.gamma * self.mu).sqrt()
    }

    /// Slope of the linear piece, `2√(μ/γ)`.
    fn slope(&self) -> f64 {
        2.0 * (self.mu / self.gamma).sqrt()
    }

    pub fn value(&self, x: f64) -> f64 {
        let ax = x.abs();
        if ax <= self.knot() {
            ax * self.slope()
        } else {
            x * x / self.gamma + self.mu
        }
    }

    /// The minimizing indicator `min(1, |x|/√(γμ))`; with `μ = 0` it is 1 on nonzeros.
    pub fn indicator(&self, x: f64) -> f64 {
        let knot = self.knot();
        if x == 0.0 {
            0.0
        } else if knot == 0.0 {
            1.0
        } else {
            (x.abs() / knot).min(1.0)
        }
    }

    /// `argmin_x t·B(x) + ½(x − v)²`.
    ///
    /// Soft-thresholds by `t·2√(μ/γ)` while the result stays inside the linear
    /// piece, and shrinks by `1/(1 + 2t/γ)` beyond it. The two branches meet at
    /// `|v| = √(γμ) + 2t√(μ/γ)`, where both give `√(γμ)`.
    pub fn prox(&self, t: f64, v: f64) -> f64 {
        let av = v.abs();
        let thresh = t * self.slope();
        let out = if av <= thresh {
            0.0
        } else if av <= self.knot() + thresh {
            av - thresh
        } else {
            av / (1.0 + 2.0 * t / self.gamma)
        };
        out.copysign(v)
    }
}

/// Prox of the pure ridge term `t·x²/γ`.
pub(crate) fn ridge_prox(gamma: f64, t: f64, v: f64) -> f64 {
    v / (1.0 + 2.0 * t / gamma)
}
