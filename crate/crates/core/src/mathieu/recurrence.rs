//! Truncated three-term recurrence for the Fourier coefficients of the
//! periodic Mathieu functions.
//!
//! Substituting a trigonometric series into `y'' + (a - 2q cos 2α) y = 0`
//! gives `(a - m²) A_m - q (A_{m-2} + A_{m+2}) = 0`, i.e. the eigenproblem
//! `T A = a A` for a tridiagonal `T` with the squared harmonics on the
//! diagonal and `q` off the diagonal. The four symmetry classes differ only
//! in the first row.

use num_complex::Complex64;

use super::Basis;

const TINY: f64 = 1e-300;

#[derive(Debug, Clone)]
pub(crate) struct Tridiagonal {
    pub diag: Vec<Complex64>,
    /// `sub[i] = T[i][i-1]`; `sub[0]` is unused.
    pub sub: Vec<Complex64>,
    /// `sup[i] = T[i][i+1]`; the last entry is unused.
    pub sup: Vec<Complex64>,
}

impl Tridiagonal {
    pub fn new(basis: Basis, q: Complex64, n: usize) -> Self {
        let mut diag: Vec<Complex64> = (0..n)
            .map(|i| {
                let m = f64::from(basis.harmonic(i));
                Complex64::new(m * m, 0.0)
            })
            .collect();
        let mut sub = vec![q; n];
        let sup = vec![q; n];
        sub[0] = Complex64::new(0.0, 0.0);
        match basis {
            Basis::CosEven if n > 1 => sub[1] = 2.0 * q,
            Basis::CosOdd => diag[0] += q,
            Basis::SinOdd => diag[0] -= q,
            _ => {}
        }
        Self { diag, sub, sup }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    /// Product `T[i][i-1] * T[i-1][i]`, the squared off-diagonal of the
    /// symmetrized matrix.
    fn off_product(&self, i: usize) -> f64 {
        (self.sub[i] * self.sup[i - 1]).re
    }

    /// Number of eigenvalues strictly below `x` (Sturm sequence on the
    /// real part). Valid for real `q`, where the symmetrized matrix is real
    /// symmetric.
    pub fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut t = 1.0;
        for i in 0..self.len() {
            let d = self.diag[i].re - x;
            t = if i == 0 {
                d
            } else {
                d - self.off_product(i) / t
            };
            if t == 0.0 {
                t = -f64::EPSILON * (self.diag[i].re.abs() + x.abs()).max(1.0);
            }
            if t < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn gershgorin(&self) -> (f64, f64) {
        let n = self.len();
        let e: Vec<f64> = (0..n)
            .map(|i| {
                if i == 0 {
                    0.0
                } else {
                    self.off_product(i).max(0.0).sqrt()
                }
            })
            .collect();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = e[i] + if i + 1 < n { e[i + 1] } else { 0.0 };
            lo = lo.min(self.diag[i].re - r);
            hi = hi.max(self.diag[i].re + r);
        }
        (lo - 1.0, hi + 1.0)
    }

    /// Eigenvalue of ascending rank `rank` (0-based) by bisection.
    pub fn eigenvalue_by_rank(&self, rank: usize) -> f64 {
        debug_assert!(rank < self.len());
        let (mut lo, mut hi) = self.gershgorin();
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > rank {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 2.0 * f64::EPSILON * lo.abs().max(hi.abs()) {
                break;
            }
        }
        0.5 * (lo + hi)
    }

    /// Real eigenvector for the (real) eigenvalue `lambda` by inverse
    /// iteration with a partially pivoted tridiagonal LU factorization.
    pub fn inverse_iteration(&self, lambda: f64) -> Vec<f64> {
        let n = self.len();
        let scale = self
            .diag
            .iter()
            .map(|d| d.re.abs())
            .fold(lambda.abs(), f64::max)
            .max(1.0);
        let mut dl: Vec<f64> = (1..n).map(|i| self.sub[i].re).collect();
        let mut d: Vec<f64> = self.diag.iter().map(|x| x.re - lambda).collect();
        let mut du: Vec<f64> = (0..n.saturating_sub(1)).map(|i| self.sup[i].re).collect();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];

        for i in 0..n.saturating_sub(1) {
            if d[i].abs() >= dl[i].abs() {
                if d[i] == 0.0 {
                    d[i] = f64::EPSILON * scale;
                }
                let fact = dl[i] / d[i];
                dl[i] = fact;
                d[i + 1] -= fact * du[i];
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] *= -fact;
                }
                swapped[i] = true;
            }
        }
        if n > 0 && d[n - 1] == 0.0 {
            d[n - 1] = f64::EPSILON * scale;
        }

        let mut x = vec![1.0; n];
        for _ in 0..3 {
            for i in 0..n.saturating_sub(1) {
                if swapped[i] {
                    x.swap(i, i + 1);
                }
                x[i + 1] -= dl[i] * x[i];
            }
            for i in (0..n).rev() {
                let mut v = x[i];
                if i + 1 < n {
                    v -= du[i] * x[i + 1];
                }
                if i + 2 < n {
                    v -= du2[i] * x[i + 2];
                }
                x[i] = v / d[i];
            }
            let norm = x.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
            if !(norm.is_finite() && norm > 0.0) {
                break;
            }
            x.iter_mut().for_each(|v| *v /= norm);
        }
        x
    }

    /// Continued-fraction characteristic function split at `pivot`.
    ///
    /// Returns the residual of row `pivot` when the coefficients above are
    /// obtained by the forward fraction and those below by the backward
    /// fraction, together with its derivative in `lambda`. Its zeros are the
    /// zeros of the truncated determinant.
    pub fn split_residual(&self, lambda: Complex64, pivot: usize) -> (Complex64, Complex64) {
        let (t, dt) = self.forward_ratios(lambda, pivot);
        let (r, dr) = self.backward_ratios(lambda, pivot);
        let j = pivot;
        let mut f = self.diag[j] - lambda;
        let mut df = Complex64::new(-1.0, 0.0);
        if j >= 1 {
            f += self.sub[j] * t[j];
            df += self.sub[j] * dt[j];
        }
        if j + 1 < self.len() {
            f += self.sup[j] * r[j + 1];
            df += self.sup[j] * dr[j + 1];
        }
        (f, df)
    }

    /// `t[i] = A_{i-1} / A_i` for `1 <= i <= pivot`, with derivatives.
    fn forward_ratios(&self, lambda: Complex64, pivot: usize) -> (Vec<Complex64>, Vec<Complex64>) {
        let zero = Complex64::new(0.0, 0.0);
        let mut t = vec![zero; pivot + 1];
        let mut dt = vec![zero; pivot + 1];
        for i in 1..=pivot {
            let k = i - 1;
            let mut den = self.diag[k] - lambda;
            let mut dden = Complex64::new(-1.0, 0.0);
            if k >= 1 {
                den += self.sub[k] * t[k];
                dden += self.sub[k] * dt[k];
            }
            let den = guard(den);
            t[i] = -self.sup[k] / den;
            dt[i] = self.sup[k] * dden / (den * den);
        }
        (t, dt)
    }

    /// `r[i] = A_i / A_{i-1}` for `pivot < i < n`, with derivatives.
    fn backward_ratios(&self, lambda: Complex64, pivot: usize) -> (Vec<Complex64>, Vec<Complex64>) {
        let n = self.len();
        let zero = Complex64::new(0.0, 0.0);
        let mut r = vec![zero; n + 1];
        let mut dr = vec![zero; n + 1];
        for i in (pivot + 1..n).rev() {
            let mut den = self.diag[i] - lambda;
            let mut dden = Complex64::new(-1.0, 0.0);
            if i + 1 < n {
                den += self.sup[i] * r[i + 1];
                dden += self.sup[i] * dr[i + 1];
            }
            let den = guard(den);
            r[i] = -self.sub[i] / den;
            dr[i] = self.sub[i] * dden / (den * den);
        }
        (r, dr)
    }

    /// Eigenvector for an (accurate) eigenvalue, scaled so that the pivot
    /// component is one. Every operation is analytic in `q` and `lambda`.
    pub fn eigenvector(&self, lambda: Complex64, pivot: usize) -> Vec<Complex64> {
        let n = self.len();
        let (t, _) = self.forward_ratios(lambda, pivot);
        let (r, _) = self.backward_ratios(lambda, pivot);
        let mut v = vec![Complex64::new(0.0, 0.0); n];
        v[pivot] = Complex64::new(1.0, 0.0);
        for i in (1..=pivot).rev() {
            v[i - 1] = t[i] * v[i];
        }
        for i in pivot + 1..n {
            v[i] = r[i] * v[i - 1];
        }
        v
    }
}

fn guard(z: Complex64) -> Complex64 {
    if z.norm() < TINY {
        Complex64::new(TINY, 0.0)
    } else {
        z
    }
}

/// Index of the largest-magnitude component.
pub(crate) fn argmax_abs(v: &[f64]) -> usize {
    v.iter()
        .enumerate()
        .fold((0, -1.0), |(bi, bv), (i, x)| {
            if x.abs() > bv {
                (i, x.abs())
            } else {
                (bi, bv)
            }
        })
        .0
}
