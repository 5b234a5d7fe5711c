//! Radial (modified) Mathieu functions as solutions of the initial value
//! problem `y'' = (a - 2q cosh 2β) y`.
//!
//! With `Ce(β) = ce(iβ)` and `Se(β) = -i se(iβ)` the angular normalization
//! carries over to initial data: `Ce(0) = 1, Ce'(0) = 0` and
//! `Se(0) = 0, Se'(0) = 1`. The equation is integrated by recentred Taylor
//! series on a uniform mesh. Every node keeps its local coefficients, and
//! any point of `[0, beta_max]` is one polynomial evaluation away.

use num_complex::Complex64;

use super::Parity;
use crate::error::{Error, Result};

const MAX_ORDER: usize = 64;
const MAX_STEP: f64 = 0.1;
/// Product of local frequency and step size.
const STEP_PHASE: f64 = 0.5;
/// Evaluation may run this far (relative) past `beta_max`.
const OVERSHOOT: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct RadialSolution {
    step: f64,
    beta_max: f64,
    /// Taylor coefficients in the local variable `β - j·step`.
    nodes: Vec<Vec<Complex64>>,
}

impl RadialSolution {
    pub fn new(parity: Parity, char_value: Complex64, q: Complex64, beta_max: f64) -> Result<Self> {
        if !(beta_max.is_finite() && beta_max >= 0.0) {
            return Err(Error::OutOfRange(format!("radial range {beta_max}")));
        }
        if !(char_value.is_finite() && q.is_finite()) {
            return Err(Error::NonFinite("radial equation parameters".into()));
        }
        let kk = (char_value.re.abs() + 2.0 * q.re.abs() * (2.0 * beta_max).cosh())
            .sqrt()
            .max(1.0);
        let steps = ((beta_max / (STEP_PHASE / kk).min(MAX_STEP)).ceil() as usize).max(1);
        let step = beta_max / steps as f64;

        let (mut y, mut dy) = match parity {
            Parity::Even => (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)),
            Parity::Odd => (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)),
        };
        let mut nodes = Vec::with_capacity(steps);
        for j in 0..steps {
            let coeffs = local_series(char_value, q, j as f64 * step, y, dy, step);
            let (v, d) = horner(&coeffs, step);
            if !(v.is_finite() && d.is_finite()) {
                return Err(Error::NonFinite(format!(
                    "radial integration at beta = {}",
                    (j + 1) as f64 * step
                )));
            }
            nodes.push(coeffs);
            y = v;
            dy = d;
        }
        Ok(Self {
            step,
            beta_max,
            nodes,
        })
    }

    pub fn beta_max(&self) -> f64 {
        self.beta_max
    }

    /// Value and β-derivative at `beta`.
    pub fn eval(&self, beta: f64) -> Result<(Complex64, Complex64)> {
        if !(beta >= 0.0 && beta <= self.beta_max * (1.0 + OVERSHOOT) + f64::MIN_POSITIVE) {
            return Err(Error::OutOfRange(format!(
                "beta = {beta} outside [0, {}]",
                self.beta_max
            )));
        }
        if self.step == 0.0 {
            return Ok(horner(&self.nodes[0], 0.0));
        }
        let j = ((beta / self.step).floor() as usize).min(self.nodes.len() - 1);
        Ok(horner(&self.nodes[j], beta - j as f64 * self.step))
    }
}

/// Taylor coefficients of the solution about `beta0` given value and slope.
fn local_series(
    a: Complex64,
    q: Complex64,
    beta0: f64,
    y0: Complex64,
    dy0: Complex64,
    h: f64,
) -> Vec<Complex64> {
    // cosh(2(β0 + t)) = C cosh 2t + S sinh 2t
    let ch = (2.0 * beta0).cosh();
    let sh = (2.0 * beta0).sinh();
    let mut f = Vec::with_capacity(MAX_ORDER);
    let mut pow = 1.0;
    for n in 0..MAX_ORDER {
        if n > 0 {
            pow *= 2.0 / n as f64;
        }
        let trig = if n % 2 == 0 { ch } else { sh };
        let mut fn_ = -2.0 * q * (pow * trig);
        if n == 0 {
            fn_ += a;
        }
        f.push(fn_);
    }

    let scale = y0.norm() + dy0.norm() * h;
    let mut c = Vec::with_capacity(MAX_ORDER);
    c.push(y0);
    c.push(dy0);
    let mut small = 0;
    for n in 0..MAX_ORDER - 2 {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..=n {
            acc += f[i] * c[n - i];
        }
        let next = acc / ((n + 2) * (n + 1)) as f64;
        c.push(next);
        if next.norm() * h.powi((n + 2) as i32) <= 1e-18 * scale {
            small += 1;
            if small >= 3 {
                break;
            }
        } else {
            small = 0;
        }
    }
    c
}

fn horner(c: &[Complex64], t: f64) -> (Complex64, Complex64) {
    let mut v = Complex64::new(0.0, 0.0);
    let mut d = Complex64::new(0.0, 0.0);
    for (n, cn) in c.iter().enumerate().rev() {
        v = v * t + cn;
        if n > 0 {
            d = d * t + cn * n as f64;
        }
    }
    (v, d)
}
