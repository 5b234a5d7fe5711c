//! Confocal elliptic coordinates `x + iy = c cos(α - iβ)`.
//!
//! Curves of constant `β` are confocal ellipses with foci at `(±c, 0)`,
//! curves of constant `α` confocal hyperbolas. The membrane boundary is the
//! ellipse `β = β₀`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack on `β ≤ β₀` so that boundary points count as inside.
const BOUNDARY_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EllipseGeometry {
    c: f64,
    beta0: f64,
    semi_major: f64,
    semi_minor: f64,
}

impl EllipseGeometry {
    /// Ellipse with semi-axes `a > b > 0` on the x and y axes.
    pub fn from_semiaxes(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && b > 0.0 && a > b) {
            return Err(Error::InvalidGeometry(format!(
                "semi-axes must satisfy a > b > 0, got a = {a}, b = {b}"
            )));
        }
        let c = ((a - b) * (a + b)).sqrt();
        let beta0 = (b / a).atanh();
        Ok(Self {
            c,
            beta0,
            semi_major: a,
            semi_minor: b,
        })
    }

    /// Ellipse from the focal half-distance and boundary coordinate.
    pub fn from_focal(c: f64, beta0: f64) -> Result<Self> {
        if !(c.is_finite() && beta0.is_finite() && c > 0.0 && beta0 > 0.0) {
            return Err(Error::InvalidGeometry(format!(
                "need c > 0 and beta0 > 0, got c = {c}, beta0 = {beta0}"
            )));
        }
        Ok(Self {
            c,
            beta0,
            semi_major: c * beta0.cosh(),
            semi_minor: c * beta0.sinh(),
        })
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn beta0(&self) -> f64 {
        self.beta0
    }

    pub fn semi_major(&self) -> f64 {
        self.semi_major
    }

    pub fn semi_minor(&self) -> f64 {
        self.semi_minor
    }

    pub fn to_cartesian(&self, p: EllipticPoint) -> (f64, f64) {
        (
            self.c * p.beta.cosh() * p.alpha.cos(),
            self.c * p.beta.sinh() * p.alpha.sin(),
        )
    }

    /// Inverse map through the complex arccosine, with `β >= 0` and
    /// `α ∈ (-π, π]`. On the focal segment (`y = 0`, `|x| < c`) the limit
    /// from `y → 0⁺` is taken, so `α ∈ [0, π]` there.
    pub fn to_elliptic(&self, x: f64, y: f64) -> EllipticPoint {
        let y = if y == 0.0 { 0.0 } else { y };
        let w = Complex64::new(x / self.c, y / self.c).acos();
        let (mut alpha, mut beta) = (w.re, -w.im);
        if beta < 0.0 {
            alpha = -alpha;
            beta = -beta;
        }
        if beta == 0.0 {
            alpha = alpha.abs();
        }
        if alpha <= -std::f64::consts::PI {
            alpha += 2.0 * std::f64::consts::PI;
        }
        EllipticPoint { alpha, beta }
    }

    pub fn inside_boundary(&self, x: f64, y: f64) -> bool {
        self.to_elliptic(x, y).beta <= self.beta0 + BOUNDARY_SLACK
    }
}

/// A point in confocal elliptic coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EllipticPoint {
    pub alpha: f64,
    pub beta: f64,
}
