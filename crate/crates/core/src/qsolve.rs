//! Mode parameters `q_{g,k}` of the fixed elliptic membrane.
//!
//! A mode `Ce_g(q; β) ce_g(q; α)` (or `Se·se`) vanishes on the boundary
//! `β = β₀` exactly when `q` is a root of `Q(q) = Ce_g(q; β₀)` (resp.
//! `Se_g`). Roots are located by a sign scan in `q`, then polished by Newton's
//! method whose derivative comes from a single evaluation at `q + ih`:
//! for analytic `Q` that is real on the real axis,
//! `Im Q(q + ih) / h = Q'(q) + O(h²)` with no subtractive cancellation.
//! Each root is certified by counting the radial zeros in `(0, β₀]`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::EllipseGeometry;
use crate::mathieu::{self, ModeIndex, Parity};

/// Samples per radial zero count.
const ZERO_COUNT_SAMPLES: usize = 512;
/// A radial zero within this relative distance past `β₀` counts as on it.
const ZERO_SLACK: f64 = 1e-5;
/// Certificate: `|Q(q)|` must fall below this fraction of the local scan
/// amplitude.
const RESIDUAL_FRACTION: f64 = 1e-9;
/// Halvings of the scan step tried when a root fails its zero count.
const RESCANS: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Scan ceiling.
    pub q_max: f64,
    pub scan_step: f64,
    /// Relative tolerance on Newton steps.
    pub newton_tol: f64,
    pub max_newton_iters: usize,
    /// Complex step relative to `max(1, q)`.
    pub h_rel: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            q_max: 120.0,
            scan_step: 0.25,
            newton_tol: 1e-11,
            max_newton_iters: 30,
            h_rel: 1e-10,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [self.q_max, self.scan_step, self.newton_tol, self.h_rel]
            .iter()
            .all(|v| v.is_finite() && *v > 0.0);
        if !positive || self.max_newton_iters == 0 {
            return Err(Error::InvalidConfig(
                "solver settings must be positive".into(),
            ));
        }
        if self.h_rel >= f64::EPSILON.sqrt() {
            return Err(Error::InvalidConfig(format!(
                "complex step {} must stay below sqrt(eps)",
                self.h_rel
            )));
        }
        Ok(())
    }
}

/// A solved drum mode: `β₀` is the `k`-th radial zero at this `q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeSpec {
    pub index: ModeIndex,
    pub k: usize,
    pub q: f64,
    /// `a_g(q)` or `b_g(q)`.
    pub char_value: f64,
    pub beta0: f64,
    /// `√q`, i.e. the frequency factor per unit focal distance.
    pub lambda: f64,
    pub material_m: f64,
    pub newton_iters: usize,
    /// `|Q(q)|` at the returned root.
    pub residual: f64,
}

impl ModeSpec {
    /// Mode at a known `q` (for instance a tabulated value), without
    /// solving or certification.
    pub fn at(index: ModeIndex, k: usize, q: f64, beta0: f64) -> Result<Self> {
        Ok(Self {
            index,
            k,
            q,
            char_value: mathieu::char_value(index, q)?,
            beta0,
            lambda: q.max(0.0).sqrt(),
            material_m: 1.0,
            newton_iters: 0,
            residual: f64::NAN,
        })
    }
}

/// Which function Newton's method drives to zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    Plain,
    /// `2√q` times the boundary value for odd families.
    Scaled,
}

/// `Ce_g(q; β₀)` or `Se_g(q; β₀)`, analytic in `q`.
pub fn boundary_value(index: ModeIndex, q: Complex64, beta0: f64) -> Result<Complex64> {
    let sol = mathieu::radial_solution(index, q, beta0)?;
    Ok(sol.eval(beta0)?.0)
}

fn objective_value(
    index: ModeIndex,
    q: Complex64,
    beta0: f64,
    obj: Objective,
) -> Result<Complex64> {
    let v = boundary_value(index, q, beta0)?;
    Ok(match (obj, index.parity()) {
        (Objective::Scaled, Parity::Odd) => 2.0 * q.sqrt() * v,
        _ => v,
    })
}

/// Scan objective: the boundary value, multiplied by `2√q` for odd
/// families.
pub fn scaled_boundary_value(index: ModeIndex, q: f64, beta0: f64) -> Result<f64> {
    if q.is_nan() || q <= 0.0 {
        return Err(Error::OutOfRange(format!(
            "scaled boundary value needs q > 0, got {q}"
        )));
    }
    Ok(objective_value(index, Complex64::new(q, 0.0), beta0, Objective::Scaled)?.re)
}

/// Value and derivative of `f` at real `x` from one evaluation at `x + ih`.
pub fn complex_step_derivative<F>(f: F, x: f64, h: f64) -> Result<(f64, f64)>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    if !(h > 0.0 && h.is_finite() && x.is_finite()) {
        return Err(Error::OutOfRange(format!(
            "complex step at x = {x}, h = {h}"
        )));
    }
    let v = f(Complex64::new(x, h))?;
    if !v.is_finite() {
        return Err(Error::NonFinite(format!("f({x} + {h}i)")));
    }
    Ok((v.re, v.im / h))
}

/// Sign-change bracket of the scan objective.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bracket {
    /// 1-based ordinal of the sign change.
    pub k: usize,
    pub q_lo: f64,
    pub q_hi: f64,
    /// Largest unscaled `|Q|` over the samples between the neighbouring
    /// sign changes.
    pub amplitude: f64,
}

/// First `k_max` sign changes of the scan objective on `(0, q_max]`.
pub fn scan_brackets(
    index: ModeIndex,
    beta0: f64,
    k_max: usize,
    cfg: &SolverConfig,
) -> Result<Vec<Bracket>> {
    cfg.validate()?;
    if k_max == 0 {
        return Ok(Vec::new());
    }
    let n = (cfg.q_max / cfg.scan_step).floor() as usize;
    // (q, scaled, unscaled)
    let mut samples: Vec<(f64, f64, f64)> = Vec::new();
    let mut changes: Vec<usize> = Vec::new();
    for i in 1..=n {
        let q = i as f64 * cfg.scan_step;
        let raw = boundary_value(index, Complex64::new(q, 0.0), beta0)?.re;
        let scaled = match index.parity() {
            Parity::Odd => 2.0 * q.sqrt() * raw,
            Parity::Even => raw,
        };
        if !scaled.is_finite() {
            return Err(Error::NonFinite(format!("scan at q = {q}")));
        }
        if let Some(&(_, prev, _)) = samples.last() {
            if (prev >= 0.0) != (scaled >= 0.0) {
                changes.push(samples.len());
            }
        }
        samples.push((q, scaled, raw));
        // One extra sign change bounds the amplitude window of the last bracket.
        if changes.len() > k_max {
            break;
        }
    }
    if changes.len() < k_max {
        return Err(Error::TooFewBrackets {
            found: changes.len(),
            wanted: k_max,
            q_max: cfg.q_max,
        });
    }
    let brackets = (0..k_max)
        .map(|j| {
            let hi = changes[j];
            let start = if j == 0 { 0 } else { changes[j - 1] - 1 };
            let end = changes.get(j + 1).copied().unwrap_or(samples.len());
            let amplitude = samples[start..end]
                .iter()
                .fold(0.0_f64, |m, s| m.max(s.2.abs()));
            Bracket {
                k: j + 1,
                q_lo: samples[hi - 1].0,
                q_hi: samples[hi].0,
                amplitude,
            }
        })
        .collect();
    Ok(brackets)
}

/// Radial zeros of `Ce_g(q; ·)` / `Se_g(q; ·)` in `(0, beta_end]`, located
/// by sign changes on a uniform grid and refined by bisection.
pub fn radial_zeros(index: ModeIndex, q: f64, beta_end: f64) -> Result<Vec<f64>> {
    let sol = mathieu::radial_solution(index, Complex64::new(q, 0.0), beta_end)?;
    let f = |b: f64| -> Result<f64> { Ok(sol.eval(b)?.0.re) };
    let h = beta_end / ZERO_COUNT_SAMPLES as f64;
    let mut zeros = Vec::new();
    let mut prev_b = h;
    let mut prev = f(h)?;
    if prev == 0.0 {
        zeros.push(h);
    }
    for i in 2..=ZERO_COUNT_SAMPLES {
        let b = if i == ZERO_COUNT_SAMPLES {
            beta_end
        } else {
            i as f64 * h
        };
        let v = f(b)?;
        if v == 0.0 {
            zeros.push(b);
        } else if prev != 0.0 && (prev > 0.0) != (v > 0.0) {
            let (mut lo, mut hi, mut flo) = (prev_b, b, prev);
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                let fm = f(mid)?;
                if fm == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if (fm > 0.0) == (flo > 0.0) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            zeros.push(0.5 * (lo + hi));
        }
        prev_b = b;
        prev = v;
    }
    Ok(zeros)
}

/// Number of radial zeros in `(0, β₀]`; `β = 0` is never counted for the
/// odd family, and a zero just past `β₀` counts as lying on it.
pub fn radial_zero_count(index: ModeIndex, q: f64, beta0: f64) -> Result<usize> {
    Ok(radial_zeros(index, q, beta0 * (1.0 + ZERO_SLACK))?.len())
}

/// Polish a bracketed root with complex-step Newton, falling back to
/// bisection whenever a step would leave the current bracket.
pub fn refine_root(
    index: ModeIndex,
    bracket: &Bracket,
    beta0: f64,
    cfg: &SolverConfig,
) -> Result<ModeSpec> {
    refine_root_with(index, bracket, beta0, cfg, Objective::Plain)
}

pub fn refine_root_with(
    index: ModeIndex,
    bracket: &Bracket,
    beta0: f64,
    cfg: &SolverConfig,
    objective: Objective,
) -> Result<ModeSpec> {
    cfg.validate()?;
    let eval = |q: f64| -> Result<(f64, f64)> {
        let h = cfg.h_rel * q.abs().max(1.0);
        complex_step_derivative(|z| objective_value(index, z, beta0, objective), q, h)
    };

    let (mut lo, mut hi) = (bracket.q_lo, bracket.q_hi);
    let (f_lo, _) = eval(lo)?;
    let (f_hi, _) = eval(hi)?;
    let lo_positive = f_lo >= 0.0;
    let mut q = if f_lo == 0.0 {
        lo
    } else if f_hi == 0.0 {
        hi
    } else {
        lo - f_lo * (hi - lo) / (f_hi - f_lo)
    };

    let mut iterations = 0;
    let mut converged = false;
    while iterations < cfg.max_newton_iters {
        iterations += 1;
        let (v, d) = eval(q)?;
        if v == 0.0 {
            converged = true;
            break;
        }
        if (v >= 0.0) == lo_positive {
            lo = q;
        } else {
            hi = q;
        }
        let newton = q - v / d;
        let tol = cfg.newton_tol * q.abs().max(1.0);
        if (newton - q).abs() < tol {
            q = newton;
            converged = true;
            break;
        }
        let next = if newton.is_finite() && newton > lo.min(hi) && newton < hi.max(lo) {
            newton
        } else {
            0.5 * (lo + hi)
        };
        let step = (next - q).abs();
        q = next;
        if step < tol {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::RootNotConverged(cfg.max_newton_iters));
    }

    let residual = boundary_value(index, Complex64::new(q, 0.0), beta0)?
        .re
        .abs();
    let bound = RESIDUAL_FRACTION * bracket.amplitude;
    if residual >= bound {
        return Err(Error::ResidualTooLarge { q, residual, bound });
    }
    let found = radial_zero_count(index, q, beta0)?;
    if found != bracket.k {
        return Err(Error::ZeroCountMismatch {
            q,
            expected: bracket.k,
            found,
        });
    }
    Ok(ModeSpec {
        index,
        k: bracket.k,
        q,
        char_value: mathieu::char_value(index, q)?,
        beta0,
        lambda: q.sqrt(),
        material_m: 1.0,
        newton_iters: iterations,
        residual,
    })
}

/// Scan, refine and certify the `k`-th mode of one family, rescanning with
/// a finer step if the zero count disagrees.
pub fn solve_mode(index: ModeIndex, k: usize, beta0: f64, cfg: &SolverConfig) -> Result<ModeSpec> {
    if k == 0 {
        return Err(Error::OutOfRange("radial zero index k starts at 1".into()));
    }
    let mut cfg = *cfg;
    let mut attempt = 0;
    loop {
        let brackets = scan_brackets(index, beta0, k, &cfg)?;
        match refine_root(index, &brackets[k - 1], beta0, &cfg) {
            Err(Error::ZeroCountMismatch { .. }) if attempt < RESCANS => {
                attempt += 1;
                cfg.scan_step *= 0.5;
            }
            other => return other,
        }
    }
}

/// One cell of a `q` table.
#[derive(Debug, Clone, PartialEq)]
pub struct TableCell {
    pub g: u32,
    pub k: usize,
    pub result: Result<ModeSpec>,
}

/// Solve every `(g, k)` cell for one parity. Rows run in parallel; a
/// failing cell is reported in place without aborting the table.
pub fn build_table(
    parity: Parity,
    g_range: std::ops::RangeInclusive<u32>,
    k_range: std::ops::RangeInclusive<usize>,
    beta0: f64,
    cfg: &SolverConfig,
) -> Vec<TableCell> {
    let gs: Vec<u32> = g_range.collect();
    let ks: Vec<usize> = k_range.collect();
    let k_max = ks.iter().copied().max().unwrap_or(0);
    let rows: Vec<Vec<TableCell>> = gs
        .par_iter()
        .map(|&g| solve_row(parity, g, &ks, k_max, beta0, cfg))
        .collect();
    rows.into_iter().flatten().collect()
}

fn solve_row(
    parity: Parity,
    g: u32,
    ks: &[usize],
    k_max: usize,
    beta0: f64,
    cfg: &SolverConfig,
) -> Vec<TableCell> {
    let fail = |e: Error| -> Vec<TableCell> {
        ks.iter()
            .map(|&k| TableCell {
                g,
                k,
                result: Err(e.clone()),
            })
            .collect()
    };
    let index = match ModeIndex::new(parity, g) {
        Ok(i) => i,
        Err(e) => return fail(e),
    };
    if ks.contains(&0) {
        return fail(Error::OutOfRange("radial zero index k starts at 1".into()));
    }
    let brackets = match scan_brackets(index, beta0, k_max, cfg) {
        Ok(b) => b,
        Err(e) => return fail(e),
    };
    ks.iter()
        .map(|&k| {
            let result = match refine_root(index, &brackets[k - 1], beta0, cfg) {
                Err(Error::ZeroCountMismatch { .. }) => solve_mode(
                    index,
                    k,
                    beta0,
                    &SolverConfig {
                        scan_step: cfg.scan_step * 0.5,
                        ..*cfg
                    },
                ),
                other => other,
            };
            TableCell { g, k, result }
        })
        .collect()
}

/// Frequency factor `λ = √q / c` and the angular rate `2λm` of the time
/// factor `sin 2λmt`.
pub fn frequency(spec: &ModeSpec, geom: &EllipseGeometry) -> Result<(f64, f64)> {
    if geom.c().is_nan() || geom.c() <= 0.0 {
        return Err(Error::InvalidGeometry(
            "focal distance must be positive".into(),
        ));
    }
    let lambda = spec.q.max(0.0).sqrt() / geom.c();
    Ok((lambda, 2.0 * lambda * spec.material_m))
}
