//! Standing modes `Ce·ce` / `Se·se` sampled on Cartesian grids.

mod contour;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use contour::{
    classify_and_count, extract_nodal_curves, marching_squares, CurveClass, NodalCounts, NodalCurve,
};

use crate::error::{Error, Result};
use crate::geometry::{EllipseGeometry, EllipticPoint};
use crate::mathieu::{self, MathieuExpansion, ModeIndex, Parity, RadialSolution};
use crate::qsolve::ModeSpec;

/// Minimum samples per grid axis.
pub const MIN_GRID: usize = 8;

/// A mode prepared for repeated point evaluation.
#[derive(Debug, Clone)]
pub struct Mode {
    spec: ModeSpec,
    geom: EllipseGeometry,
    angular: MathieuExpansion,
    radial: RadialSolution,
}

impl Mode {
    pub fn new(spec: &ModeSpec, geom: &EllipseGeometry) -> Result<Self> {
        if (spec.beta0 - geom.beta0()).abs() > 1e-12 * geom.beta0() {
            return Err(Error::InvalidGeometry(format!(
                "mode solved for beta0 = {}, geometry has {}",
                spec.beta0,
                geom.beta0()
            )));
        }
        let angular = mathieu::expansion(spec.index, Complex64::new(spec.q, 0.0))?;
        let radial = angular.radial_solution(geom.beta0())?;
        Ok(Self {
            spec: spec.clone(),
            geom: *geom,
            angular,
            radial,
        })
    }

    pub fn spec(&self) -> &ModeSpec {
        &self.spec
    }

    pub fn geometry(&self) -> &EllipseGeometry {
        &self.geom
    }

    /// Signs `(sx, sy)` with `u(-x, y) = sx·u(x, y)` and `u(x, -y) = sy·u(x, y)`.
    pub fn reflection_signs(&self) -> (f64, f64) {
        reflection_signs(self.spec.index)
    }

    /// Field value at an elliptic point with `β ≤ β₀`.
    pub fn value_elliptic(&self, p: EllipticPoint) -> Result<f64> {
        let beta = p.beta.min(self.geom.beta0());
        let (r, _) = self.radial.eval(beta)?;
        Ok(r.re * self.angular.angular(p.alpha).re)
    }

    /// Field value at a Cartesian point inside the membrane. Points on an
    /// axis that the mode's symmetry makes nodal return exactly zero.
    pub fn value(&self, x: f64, y: f64) -> Result<f64> {
        if !self.geom.inside_boundary(x, y) {
            return Err(Error::OutsideBoundary { x, y });
        }
        let (sx, sy) = self.reflection_signs();
        if (y == 0.0 && sy < 0.0) || (x == 0.0 && sx < 0.0) {
            return Ok(0.0);
        }
        self.value_elliptic(self.geom.to_elliptic(x, y))
    }
}

fn reflection_signs(index: ModeIndex) -> (f64, f64) {
    let g_odd = index.g() % 2 == 1;
    match index.parity() {
        Parity::Even => (if g_odd { -1.0 } else { 1.0 }, 1.0),
        Parity::Odd => (if g_odd { 1.0 } else { -1.0 }, -1.0),
    }
}

/// One-shot evaluation of a mode at `(x, y)`.
pub fn eval_mode_at(spec: &ModeSpec, geom: &EllipseGeometry, x: f64, y: f64) -> Result<f64> {
    Mode::new(spec, geom)?.value(x, y)
}

/// Sample lattice over the bounding box of the ellipse, or over its first
/// quadrant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
    pub quadrant: bool,
}

impl GridSpec {
    pub fn new(nx: usize, ny: usize, quadrant: bool) -> Result<Self> {
        if nx < MIN_GRID || ny < MIN_GRID {
            return Err(Error::InvalidConfig(format!(
                "grid must be at least {MIN_GRID}x{MIN_GRID}, got {nx}x{ny}"
            )));
        }
        Ok(Self { nx, ny, quadrant })
    }

    pub fn square(n: usize) -> Result<Self> {
        Self::new(n, n, false)
    }

    /// Abscissa of column `i`. Full grids are exactly symmetric about zero.
    pub fn x(&self, geom: &EllipseGeometry, i: usize) -> f64 {
        axis_coord(geom.semi_major(), i, self.nx, self.quadrant)
    }

    pub fn y(&self, geom: &EllipseGeometry, j: usize) -> f64 {
        axis_coord(geom.semi_minor(), j, self.ny, self.quadrant)
    }
}

fn axis_coord(half: f64, i: usize, n: usize, quadrant: bool) -> f64 {
    let last = (n - 1) as f64;
    if quadrant {
        half * i as f64 / last
    } else {
        half * (2.0 * i as f64 - last) / last
    }
}

/// Mode samples on a grid, row-major with `y` rows. Samples outside the
/// membrane hold NaN.
#[derive(Debug, Clone)]
pub struct ModeField {
    pub spec: ModeSpec,
    pub geom: EllipseGeometry,
    pub grid: GridSpec,
    pub values: Vec<f64>,
    pub mask: Vec<bool>,
}

impl ModeField {
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.grid.nx + i
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[self.index(i, j)]
    }

    pub fn inside(&self, i: usize, j: usize) -> bool {
        self.mask[self.index(i, j)]
    }

    pub fn x(&self, i: usize) -> f64 {
        self.grid.x(&self.geom, i)
    }

    pub fn y(&self, j: usize) -> f64 {
        self.grid.y(&self.geom, j)
    }

    pub fn max_abs(&self) -> f64 {
        self.values
            .iter()
            .filter(|v| v.is_finite())
            .fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Unfold a first-quadrant field onto the full ellipse by the mode's
    /// reflection symmetries.
    pub fn unfold_quadrant(&self) -> Result<ModeField> {
        if !self.grid.quadrant {
            return Err(Error::InvalidConfig("field is not a quadrant field".into()));
        }
        let (sx, sy) = reflection_signs(self.spec.index);
        let grid = GridSpec::new(2 * self.grid.nx - 1, 2 * self.grid.ny - 1, false)?;
        let (cx, cy) = (self.grid.nx - 1, self.grid.ny - 1);
        let mut values = Vec::with_capacity(grid.nx * grid.ny);
        let mut mask = Vec::with_capacity(grid.nx * grid.ny);
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                let (qi, qj) = (i.abs_diff(cx), j.abs_diff(cy));
                let mut sign = 1.0;
                if i < cx {
                    sign *= sx;
                }
                if j < cy {
                    sign *= sy;
                }
                let v = self.value(qi, qj);
                values.push(if v == 0.0 { 0.0 } else { sign * v });
                mask.push(self.inside(qi, qj));
            }
        }
        Ok(ModeField {
            spec: self.spec.clone(),
            geom: self.geom,
            grid,
            values,
            mask,
        })
    }

    /// Fraction of `Σu²` carried by samples whose elliptic coordinates
    /// satisfy `region`.
    pub fn energy_fraction<F>(&self, region: F) -> f64
    where
        F: Fn(EllipticPoint) -> bool,
    {
        let mut total = 0.0;
        let mut part = 0.0;
        for j in 0..self.grid.ny {
            for i in 0..self.grid.nx {
                let v = self.value(i, j);
                if !self.inside(i, j) || !v.is_finite() {
                    continue;
                }
                let e = v * v;
                total += e;
                if region(self.geom.to_elliptic(self.x(i), self.y(j))) {
                    part += e;
                }
            }
        }
        if total > 0.0 {
            part / total
        } else {
            0.0
        }
    }

    /// Energy share of the boundary band `β > band·β₀`.
    pub fn boundary_band_fraction(&self, band: f64) -> f64 {
        let cut = band * self.geom.beta0();
        self.energy_fraction(|p| p.beta > cut)
    }

    /// Energy share of the wedge `|α ∓ π/2| < half_width` about the minor axis.
    pub fn minor_axis_channel_fraction(&self, half_width: f64) -> f64 {
        let h = std::f64::consts::FRAC_PI_2;
        self.energy_fraction(|p| {
            (p.alpha - h).abs() < half_width || (p.alpha + h).abs() < half_width
        })
    }
}

/// Evaluate a mode on every grid sample inside the membrane.
pub fn eval_grid(spec: &ModeSpec, geom: &EllipseGeometry, grid: GridSpec) -> Result<ModeField> {
    let grid = GridSpec::new(grid.nx, grid.ny, grid.quadrant)?;
    let mode = Mode::new(spec, geom)?;
    let rows: Vec<Vec<(f64, bool)>> = (0..grid.ny)
        .into_par_iter()
        .map(|j| -> Result<Vec<(f64, bool)>> {
            let y = grid.y(geom, j);
            (0..grid.nx)
                .map(|i| {
                    let x = grid.x(geom, i);
                    if geom.inside_boundary(x, y) {
                        let v = mode.value(x, y)?;
                        if !v.is_finite() {
                            return Err(Error::NonFinite(format!("mode value at ({x}, {y})")));
                        }
                        Ok((v, true))
                    } else {
                        Ok((f64::NAN, false))
                    }
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let (values, mask) = rows.into_iter().flatten().unzip();
    Ok(ModeField {
        spec: spec.clone(),
        geom: *geom,
        grid,
        values,
        mask,
    })
}

/// Largest `|u|` over `n` equally spaced boundary points.
pub fn boundary_max(mode: &Mode, n: usize) -> Result<f64> {
    let beta0 = mode.geometry().beta0();
    (0..n).try_fold(0.0_f64, |m, i| {
        let alpha = -std::f64::consts::PI + 2.0 * std::f64::consts::PI * i as f64 / n as f64;
        Ok(m.max(
            mode.value_elliptic(EllipticPoint { alpha, beta: beta0 })?
                .abs(),
        ))
    })
}
