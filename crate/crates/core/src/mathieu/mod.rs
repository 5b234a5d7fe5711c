//! Periodic Mathieu functions `ce_g`, `se_g` and their modified
//! counterparts `Ce_g`, `Se_g`.
//!
//! The angular functions are truncated Fourier series whose coefficients
//! come from the classical tridiagonal recurrence. They are normalized by
//! their behaviour at the origin rather than by a square integral:
//!
//! ```text
//! ce_g(q; 0) = 1,  ce_g'(q; 0) = 0,   se_g(q; 0) = 0,  se_g'(q; 0) = 1
//! ```
//!
//! and `Ce_g(q; β) = ce_g(q; iβ)`, `Se_g(q; β) = -i se_g(q; iβ)`.
//! All routines accept complex `q`.

mod radial;
mod recurrence;

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
pub use radial::RadialSolution;
use recurrence::{argmax_abs, Tridiagonal};

/// Hard cap on the number of retained Fourier coefficients.
pub const MAX_TRUNCATION: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn as_str(self) -> &'static str {
        match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Family of a Mathieu function: parity and integer order `g`.
///
/// Even functions exist for `g >= 0`, odd ones for `g >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawIndex")]
pub struct ModeIndex {
    parity: Parity,
    g: u32,
}

#[derive(Deserialize)]
struct RawIndex {
    parity: Parity,
    g: u32,
}

impl TryFrom<RawIndex> for ModeIndex {
    type Error = Error;
    fn try_from(raw: RawIndex) -> Result<Self> {
        ModeIndex::new(raw.parity, raw.g)
    }
}

impl ModeIndex {
    pub fn new(parity: Parity, g: u32) -> Result<Self> {
        if parity == Parity::Odd && g == 0 {
            return Err(Error::InvalidIndex("odd functions require g >= 1".into()));
        }
        Ok(Self { parity, g })
    }

    pub fn even(g: u32) -> Self {
        Self {
            parity: Parity::Even,
            g,
        }
    }

    /// # Panics
    /// If `g == 0`.
    pub fn odd(g: u32) -> Self {
        Self::new(Parity::Odd, g).expect("odd Mathieu functions start at g = 1")
    }

    pub fn parity(self) -> Parity {
        self.parity
    }

    pub fn g(self) -> u32 {
        self.g
    }

    pub fn basis(self) -> Basis {
        match (self.parity, self.g % 2) {
            (Parity::Even, 0) => Basis::CosEven,
            (Parity::Even, _) => Basis::CosOdd,
            (Parity::Odd, 0) => Basis::SinEven,
            (Parity::Odd, _) => Basis::SinOdd,
        }
    }

    /// Ascending rank of the characteristic value within its symmetry class.
    pub fn rank(self) -> usize {
        let g = self.g as usize;
        match self.basis() {
            Basis::SinEven => g / 2 - 1,
            _ => g / 2,
        }
    }
}

impl fmt::Display for ModeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} g={}", self.parity, self.g)
    }
}

/// Trigonometric basis of a series, fixed by parity and `g mod 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Basis {
    /// `cos(2nα)`, `n >= 0`
    CosEven,
    /// `cos((2n+1)α)`
    CosOdd,
    /// `sin(2nα)`, `n >= 1`
    SinEven,
    /// `sin((2n+1)α)`
    SinOdd,
}

impl Basis {
    /// Harmonic number of the `i`-th coefficient.
    pub fn harmonic(self, i: usize) -> u32 {
        let i = i as u32;
        match self {
            Basis::CosEven => 2 * i,
            Basis::CosOdd | Basis::SinOdd => 2 * i + 1,
            Basis::SinEven => 2 * i + 2,
        }
    }

    pub fn is_cosine(self) -> bool {
        matches!(self, Basis::CosEven | Basis::CosOdd)
    }

    fn kind(self) -> &'static str {
        if self.is_cosine() {
            "cosine"
        } else {
            "sine"
        }
    }
}

/// Limits for the truncated recurrence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MathieuConfig {
    /// Bound on `|last coefficient| / max |coefficient|`.
    pub tail_tol: f64,
    /// Relative change of the characteristic value allowed between
    /// truncations `N` and `2N`.
    pub doubling_tol: f64,
    pub max_truncation: usize,
    pub max_newton_iters: usize,
}

impl Default for MathieuConfig {
    fn default() -> Self {
        Self {
            tail_tol: 1e-14,
            doubling_tol: 1e-12,
            max_truncation: MAX_TRUNCATION,
            max_newton_iters: 50,
        }
    }
}

/// Converged truncation at real `q`.
#[derive(Debug, Clone)]
struct RealSolve {
    n: usize,
    a: f64,
    pivot: usize,
}

fn initial_truncation(g: u32, q: f64) -> usize {
    let by_q = (g as usize).div_ceil(2) + (2.0 * q.abs().max(1.0).sqrt()).ceil() as usize + 12;
    by_q.max(25)
}

fn solve_real(index: ModeIndex, q: f64, cfg: &MathieuConfig) -> Result<RealSolve> {
    if !q.is_finite() {
        return Err(Error::NonFinite(format!("q = {q}")));
    }
    let basis = index.basis();
    let rank = index.rank();
    let cap = cfg.max_truncation;
    let mut n = initial_truncation(index.g(), q).max(rank + 2).min(cap);
    let mut prev: Option<f64> = None;
    loop {
        let tri = Tridiagonal::new(basis, Complex64::new(q, 0.0), n);
        let a = tri.eigenvalue_by_rank(rank);
        let v = tri.inverse_iteration(a);
        let pivot = argmax_abs(&v);
        let tail = v[n - 1].abs() / v[pivot].abs();
        if let Some(p) = prev {
            if (a - p).abs() < cfg.doubling_tol * a.abs().max(1.0) && tail < cfg.tail_tol {
                return Ok(RealSolve { n, a, pivot });
            }
        }
        if n >= cap {
            return Err(Error::TruncationCap { q, cap });
        }
        prev = Some(a);
        n = (2 * n).min(cap);
    }
}

/// Characteristic value `a_g(q)` (even) or `b_g(q)` (odd) for real `q`.
pub fn char_value(index: ModeIndex, q: f64) -> Result<f64> {
    char_value_with(index, q, &MathieuConfig::default())
}

pub fn char_value_with(index: ModeIndex, q: f64, cfg: &MathieuConfig) -> Result<f64> {
    Ok(solve_real(index, q, cfg)?.a)
}

/// Analytic continuation of the characteristic value to complex `q`,
/// reached by Newton's method from `seed = char_value(index, Re q)`.
pub fn char_value_analytic(index: ModeIndex, q: Complex64, seed: f64) -> Result<Complex64> {
    let cfg = MathieuConfig::default();
    let solved = solve_real(index, q.re, &cfg)?;
    continue_char_value(index, q, seed, &solved, &cfg)
}

/// Newton steps this many times the tolerance that fail to shrink end the
/// iteration.
const STAGNATION: f64 = 1e4;

fn continue_char_value(
    index: ModeIndex,
    q: Complex64,
    seed: f64,
    solved: &RealSolve,
    cfg: &MathieuConfig,
) -> Result<Complex64> {
    if !q.is_finite() || !seed.is_finite() {
        return Err(Error::NonFinite(format!("q = {q}, seed = {seed}")));
    }
    let tri = Tridiagonal::new(index.basis(), q, solved.n);
    let tol = 4.0 * f64::EPSILON * seed.abs().max(1.0);
    let mut lambda = Complex64::new(seed, 0.0);
    let mut converged = false;
    let mut previous = f64::INFINITY;
    for _ in 0..cfg.max_newton_iters {
        let (f, df) = tri.split_residual(lambda, solved.pivot);
        let delta = f / df;
        if !delta.is_finite() {
            return Err(Error::NonFinite("characteristic value Newton step".into()));
        }
        lambda -= delta;
        let step = delta.norm();
        if step <= tol || (step <= STAGNATION * tol && step >= previous) {
            converged = true;
            break;
        }
        previous = step;
    }
    if !converged {
        return Err(Error::NoConvergence(cfg.max_newton_iters));
    }

    let moved = (lambda - seed).norm();
    if q.im == 0.0 && moved < cfg.doubling_tol * seed.abs().max(1.0) {
        return Ok(Complex64::new(seed, 0.0));
    }
    let allowed = 0.5 * neighbour_gap(index, q.re, solved.n, seed);
    if moved >= allowed {
        return Err(Error::BranchJump { moved, allowed });
    }
    Ok(lambda)
}

/// Distance from `a` to the nearest other eigenvalue of the same class.
fn neighbour_gap(index: ModeIndex, q: f64, n: usize, a: f64) -> f64 {
    let tri = Tridiagonal::new(index.basis(), Complex64::new(q, 0.0), n);
    let rank = index.rank();
    let mut gap = f64::INFINITY;
    if rank > 0 {
        gap = gap.min(a - tri.eigenvalue_by_rank(rank - 1));
    }
    if rank + 1 < n {
        gap = gap.min(tri.eigenvalue_by_rank(rank + 1) - a);
    }
    gap.abs()
}

/// Radial function `Ce_g(q; ·)` or `Se_g(q; ·)` on `[0, beta_max]`.
///
/// Needs only the characteristic value, so it skips the eigenvector.
pub fn radial_solution(index: ModeIndex, q: Complex64, beta_max: f64) -> Result<RadialSolution> {
    let cfg = MathieuConfig::default();
    let solved = solve_real(index, q.re, &cfg)?;
    let a = continue_char_value(index, q, solved.a, &solved, &cfg)?;
    RadialSolution::new(index.parity(), a, q, beta_max)
}

/// Normalized Fourier expansion of one Mathieu function.
#[derive(Debug, Clone, PartialEq)]
pub struct MathieuExpansion {
    index: ModeIndex,
    q: Complex64,
    char_value: Complex64,
    coeffs: Vec<Complex64>,
}

/// Expansion of the Mathieu function `index` at (possibly complex) `q`.
pub fn expansion(index: ModeIndex, q: Complex64) -> Result<MathieuExpansion> {
    expansion_with(index, q, &MathieuConfig::default())
}

pub fn expansion_with(
    index: ModeIndex,
    q: Complex64,
    cfg: &MathieuConfig,
) -> Result<MathieuExpansion> {
    let solved = solve_real(index, q.re, cfg)?;
    let lambda = continue_char_value(index, q, solved.a, &solved, cfg)?;
    let tri = Tridiagonal::new(index.basis(), q, solved.n);
    let mut coeffs = tri.eigenvector(lambda, solved.pivot);

    let basis = index.basis();
    let weight = |i: usize| -> f64 {
        if basis.is_cosine() {
            1.0
        } else {
            f64::from(basis.harmonic(i))
        }
    };
    let (sum, mass) = coeffs
        .iter()
        .enumerate()
        .fold((Complex64::new(0.0, 0.0), 0.0), |(s, m), (i, c)| {
            (s + c * weight(i), m + c.norm() * weight(i))
        });
    if !(sum.is_finite() && mass.is_finite()) || sum.norm() <= 1e-15 * mass {
        return Err(Error::DegenerateNormalization);
    }
    coeffs.iter_mut().for_each(|c| *c /= sum);

    Ok(MathieuExpansion {
        index,
        q,
        char_value: lambda,
        coeffs,
    })
}

impl MathieuExpansion {
    pub fn index(&self) -> ModeIndex {
        self.index
    }

    pub fn q(&self) -> Complex64 {
        self.q
    }

    /// `a_g(q)` or `b_g(q)`.
    pub fn char_value(&self) -> Complex64 {
        self.char_value
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn basis(&self) -> Basis {
        self.index.basis()
    }

    pub fn truncation(&self) -> usize {
        self.coeffs.len()
    }

    fn harmonics(&self) -> impl Iterator<Item = (f64, Complex64)> + '_ {
        let basis = self.basis();
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(i, c)| (f64::from(basis.harmonic(i)), *c))
    }

    /// Series value at real `alpha`, in whichever basis the expansion uses.
    pub fn angular(&self, alpha: f64) -> Complex64 {
        if self.basis().is_cosine() {
            self.harmonics().map(|(m, c)| c * (m * alpha).cos()).sum()
        } else {
            self.harmonics().map(|(m, c)| c * (m * alpha).sin()).sum()
        }
    }

    pub fn angular_prime(&self, alpha: f64) -> Complex64 {
        if self.basis().is_cosine() {
            self.harmonics()
                .map(|(m, c)| -c * m * (m * alpha).sin())
                .sum()
        } else {
            self.harmonics()
                .map(|(m, c)| c * m * (m * alpha).cos())
                .sum()
        }
    }

    fn expect(&self, parity: Parity) -> Result<()> {
        if self.index.parity() == parity {
            Ok(())
        } else {
            let wanted = match parity {
                Parity::Even => Basis::CosEven,
                Parity::Odd => Basis::SinEven,
            };
            Err(Error::BasisMismatch {
                found: self.basis().kind(),
                wanted: wanted.kind(),
            })
        }
    }

    pub fn ce(&self, alpha: f64) -> Result<Complex64> {
        self.expect(Parity::Even)?;
        Ok(self.angular(alpha))
    }

    pub fn se(&self, alpha: f64) -> Result<Complex64> {
        self.expect(Parity::Odd)?;
        Ok(self.angular(alpha))
    }

    pub fn ce_prime(&self, alpha: f64) -> Result<Complex64> {
        self.expect(Parity::Even)?;
        Ok(self.angular_prime(alpha))
    }

    pub fn se_prime(&self, alpha: f64) -> Result<Complex64> {
        self.expect(Parity::Odd)?;
        Ok(self.angular_prime(alpha))
    }

    /// Radial function by summing the hyperbolic series `Σ A_m cosh(mβ)`
    /// (or `Σ B_m sinh(mβ)`). Loses relative accuracy for large `q`; see
    /// [`RadialSolution`] for the well-conditioned route.
    pub fn radial_series(&self, beta: f64) -> Result<Complex64> {
        self.check_series_range(beta)?;
        Ok(if self.basis().is_cosine() {
            self.harmonics().map(|(m, c)| c * (m * beta).cosh()).sum()
        } else {
            self.harmonics().map(|(m, c)| c * (m * beta).sinh()).sum()
        })
    }

    pub fn radial_series_prime(&self, beta: f64) -> Result<Complex64> {
        self.check_series_range(beta)?;
        Ok(if self.basis().is_cosine() {
            self.harmonics()
                .map(|(m, c)| c * m * (m * beta).sinh())
                .sum()
        } else {
            self.harmonics()
                .map(|(m, c)| c * m * (m * beta).cosh())
                .sum()
        })
    }

    fn check_series_range(&self, beta: f64) -> Result<()> {
        if !(beta >= 0.0 && beta.is_finite()) {
            return Err(Error::OutOfRange(format!("beta = {beta}")));
        }
        let top = self.basis().harmonic(self.coeffs.len().saturating_sub(1));
        if f64::from(top) * beta > 700.0 {
            return Err(Error::Overflow {
                harmonic: top,
                beta,
            });
        }
        Ok(())
    }

    /// Radial solution on `[0, beta_max]` with this expansion's
    /// characteristic value.
    pub fn radial_solution(&self, beta_max: f64) -> Result<RadialSolution> {
        RadialSolution::new(self.index.parity(), self.char_value, self.q, beta_max)
    }

    fn radial_at(&self, beta: f64) -> Result<(Complex64, Complex64)> {
        if !(beta >= 0.0 && beta.is_finite()) {
            return Err(Error::OutOfRange(format!("beta = {beta}")));
        }
        self.radial_solution(beta)?.eval(beta)
    }

    /// `Ce_g(q; β)`.
    pub fn mod_ce(&self, beta: f64) -> Result<Complex64> {
        self.expect(Parity::Even)?;
        Ok(self.radial_at(beta)?.0)
    }

    /// `Se_g(q; β)`.
    pub fn mod_se(&self, beta: f64) -> Result<Complex64> {
        self.expect(Parity::Odd)?;
        Ok(self.radial_at(beta)?.0)
    }

    pub fn mod_ce_prime(&self, beta: f64) -> Result<Complex64> {
        self.expect(Parity::Even)?;
        Ok(self.radial_at(beta)?.1)
    }

    pub fn mod_se_prime(&self, beta: f64) -> Result<Complex64> {
        self.expect(Parity::Odd)?;
        Ok(self.radial_at(beta)?.1)
    }
}
