//! Zero-level nodal curves by marching squares, and their classification
//! as confocal ellipses, hyperbolas or the major axis.
//!
//! Nodal lines of a separable mode cross each other at right angles, and
//! marching squares resolves each crossing by turning the contour through
//! it. Chained polylines are therefore cut wherever their direction in
//! `(α, β)` switches between radial and angular before being classified.

use std::collections::HashMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::ModeField;
use crate::geometry::EllipseGeometry;

/// Curves with fewer segments than this are discarded.
const MIN_SEGMENTS: usize = 3;
/// Spread of `β` (relative to `β₀`) or `|α|` (relative to `π`) allowed
/// within one elliptic or hyperbolic curve, and the separation between
/// distinct nodal levels.
const SPREAD: f64 = 0.05;
/// Points with `|y|` below this fraction of the semi-minor axis lie on the
/// major axis.
const AXIS_TOL: f64 = 1e-6;
/// A segment is radial or angular when one displacement dominates the
/// other by this factor.
const DOMINANCE: f64 = 2.0;

/// A polyline in fractional grid coordinates `(i, j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    pub points: Vec<(f64, f64)>,
    pub closed: bool,
}

impl Polyline {
    pub fn segments(&self) -> usize {
        self.points.len().saturating_sub(1)
    }
}

/// Level curves of a row-major `nx × ny` sample array. Cells with a
/// non-finite corner are skipped; samples equal to `level` count as above
/// it, and saddle cells are resolved by the cell-centre average.
pub fn marching_squares(values: &[f64], nx: usize, ny: usize, level: f64) -> Vec<Polyline> {
    assert_eq!(values.len(), nx * ny, "sample array does not match grid");
    let at = |i: usize, j: usize| values[j * nx + i];
    let h_edge = |i: usize, j: usize| 2 * (j * nx + i);
    let v_edge = |i: usize, j: usize| 2 * (j * nx + i) + 1;

    let mut crossings: HashMap<usize, (f64, f64)> = HashMap::new();
    let mut segments: Vec<[usize; 2]> = Vec::new();
    let mut cross = |edge: usize, p: (f64, f64), a: f64, q: (f64, f64), b: f64| {
        crossings.entry(edge).or_insert_with(|| {
            let t = (level - a) / (b - a);
            (p.0 + t * (q.0 - p.0), p.1 + t * (q.1 - p.1))
        });
        edge
    };

    for j in 0..ny.saturating_sub(1) {
        for i in 0..nx.saturating_sub(1) {
            let v = [at(i, j), at(i + 1, j), at(i + 1, j + 1), at(i, j + 1)];
            if v.iter().any(|x| !x.is_finite()) {
                continue;
            }
            let up = v.map(|x| x >= level);
            let c = [
                (i as f64, j as f64),
                ((i + 1) as f64, j as f64),
                ((i + 1) as f64, (j + 1) as f64),
                (i as f64, (j + 1) as f64),
            ];
            // Edges in order bottom, right, top, left; edge e joins corners e and e+1.
            let ids = [
                h_edge(i, j),
                v_edge(i + 1, j),
                h_edge(i, j + 1),
                v_edge(i, j),
            ];
            let mut hit = Vec::with_capacity(4);
            for e in 0..4 {
                let f = (e + 1) % 4;
                if up[e] != up[f] {
                    hit.push(cross(ids[e], c[e], v[e], c[f], v[f]));
                }
            }
            match hit.len() {
                2 => segments.push([hit[0], hit[1]]),
                4 => {
                    let centre_up = v.iter().sum::<f64>() / 4.0 >= level;
                    if centre_up == up[0] {
                        // Corners 1 and 3 are cut off.
                        segments.push([hit[0], hit[1]]);
                        segments.push([hit[2], hit[3]]);
                    } else {
                        segments.push([hit[3], hit[0]]);
                        segments.push([hit[1], hit[2]]);
                    }
                }
                _ => {}
            }
        }
    }
    chain(&segments, &crossings)
}

fn chain(segments: &[[usize; 2]], crossings: &HashMap<usize, (f64, f64)>) -> Vec<Polyline> {
    let mut by_edge: HashMap<usize, Vec<usize>> = HashMap::new();
    for (s, seg) in segments.iter().enumerate() {
        for &e in seg {
            by_edge.entry(e).or_default().push(s);
        }
    }
    let mut used = vec![false; segments.len()];
    let mut out = Vec::new();

    let walk = |start: usize, from: usize, used: &mut Vec<bool>| -> Polyline {
        let mut edges = vec![from];
        let mut s = start;
        let mut edge = from;
        loop {
            used[s] = true;
            let next_edge = if segments[s][0] == edge {
                segments[s][1]
            } else {
                segments[s][0]
            };
            edges.push(next_edge);
            edge = next_edge;
            match by_edge[&edge].iter().find(|&&t| !used[t]) {
                Some(&t) => s = t,
                None => break,
            }
        }
        let closed = edges.len() > 2 && edges.first() == edges.last();
        let mut points: Vec<(f64, f64)> = Vec::with_capacity(edges.len());
        for e in &edges {
            let p = crossings[e];
            if points.last() != Some(&p) {
                points.push(p);
            }
        }
        Polyline { points, closed }
    };

    // Open chains start at an edge touched by a single segment.
    for s in 0..segments.len() {
        if used[s] {
            continue;
        }
        if let Some(&e) = segments[s].iter().find(|e| by_edge[e].len() == 1) {
            out.push(walk(s, e, &mut used));
        }
    }
    for s in 0..segments.len() {
        if !used[s] {
            out.push(walk(s, segments[s][0], &mut used));
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveClass {
    Elliptic,
    Hyperbolic,
    MajorAxis,
    Other,
}

/// A nodal curve in Cartesian coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodalCurve {
    pub points: Vec<(f64, f64)>,
    pub class: CurveClass,
    pub closed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodalCounts {
    pub elliptic: usize,
    pub hyperbolic: usize,
    pub major_axis: bool,
    pub other: usize,
}

impl NodalCounts {
    pub fn triple(&self) -> (usize, usize, bool) {
        (self.elliptic, self.hyperbolic, self.major_axis)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Direction {
    Axis,
    Radial,
    Angular,
    Unknown,
}

/// `(|α|, β)`: elliptic coordinates folded onto the upper half plane, where
/// they are continuous.
fn folded(geom: &EllipseGeometry, p: (f64, f64)) -> (f64, f64) {
    let e = geom.to_elliptic(p.0, p.1);
    (e.alpha.abs(), e.beta)
}

/// Zero-level nodal curves of a mode field, split at crossings and
/// classified.
pub fn extract_nodal_curves(field: &ModeField) -> Vec<NodalCurve> {
    let (nx, ny) = (field.grid.nx, field.grid.ny);
    let x0 = field.x(0);
    let dx = (field.x(nx - 1) - x0) / (nx - 1) as f64;
    let y0 = field.y(0);
    let dy = (field.y(ny - 1) - y0) / (ny - 1) as f64;
    let geom = &field.geom;
    let axis_tol = AXIS_TOL * geom.semi_minor();

    let mut curves = Vec::new();
    for line in marching_squares(&field.values, nx, ny, 0.0) {
        if line.segments() < MIN_SEGMENTS {
            continue;
        }
        let points: Vec<(f64, f64)> = line
            .points
            .iter()
            .map(|&(i, j)| {
                // Grid nodes map exactly; interior crossings interpolate.
                let x = if i.fract() == 0.0 {
                    field.x(i as usize)
                } else {
                    x0 + i * dx
                };
                let y = if j.fract() == 0.0 {
                    field.y(j as usize)
                } else {
                    y0 + j * dy
                };
                (x, y)
            })
            .collect();
        for (piece, closed) in split_by_direction(geom, &points, line.closed, axis_tol) {
            if piece.len() <= MIN_SEGMENTS {
                continue;
            }
            let class = classify(geom, &piece, axis_tol);
            curves.push(NodalCurve {
                points: piece,
                class,
                closed,
            });
        }
    }
    curves
}

fn split_by_direction(
    geom: &EllipseGeometry,
    points: &[(f64, f64)],
    closed: bool,
    axis_tol: f64,
) -> Vec<(Vec<(f64, f64)>, bool)> {
    let folded_pts: Vec<(f64, f64)> = points.iter().map(|&p| folded(geom, p)).collect();
    let n = points.len() - 1;
    let mut dirs: Vec<Direction> = (0..n)
        .map(|k| {
            let (p, q) = (points[k], points[k + 1]);
            if p.1.abs() <= axis_tol && q.1.abs() <= axis_tol {
                return Direction::Axis;
            }
            let da = (folded_pts[k + 1].0 - folded_pts[k].0).abs();
            let db = (folded_pts[k + 1].1 - folded_pts[k].1).abs();
            if db > DOMINANCE * da {
                Direction::Radial
            } else if da > DOMINANCE * db {
                Direction::Angular
            } else {
                Direction::Unknown
            }
        })
        .collect();

    // Ambiguous segments join a neighbouring radial or angular run, the
    // preceding one first. Junction segments next to the axis stay apart.
    fill_unknown(&mut dirs);
    dirs.reverse();
    fill_unknown(&mut dirs);
    dirs.reverse();

    // Runs as (direction, first segment, segment count).
    let mut runs: Vec<(Direction, usize, usize)> = Vec::new();
    for (k, &d) in dirs.iter().enumerate() {
        match runs.last_mut() {
            Some(r) if r.0 == d => r.2 += 1,
            _ => runs.push((d, k, 1)),
        }
    }
    // A single stray segment between two runs of one kind belongs to them.
    let mut k = 1;
    while k + 1 < runs.len() {
        if runs[k].2 == 1 && runs[k - 1].0 == runs[k + 1].0 {
            let merged = runs[k - 1].2 + runs[k].2 + runs[k + 1].2;
            runs[k - 1].2 = merged;
            runs.drain(k..=k + 1);
        } else {
            k += 1;
        }
    }

    if runs.len() == 1 {
        return vec![(points.to_vec(), closed)];
    }
    let mut pieces: Vec<Vec<(f64, f64)>> = runs
        .iter()
        .map(|&(_, start, len)| points[start..=start + len].to_vec())
        .collect();
    if closed && runs.first().map(|r| r.0) == runs.last().map(|r| r.0) {
        let head = pieces.remove(0);
        let tail = pieces.last_mut().expect("at least two runs");
        tail.extend_from_slice(&head[1..]);
    }
    pieces.into_iter().map(|p| (p, false)).collect()
}

fn fill_unknown(dirs: &mut [Direction]) {
    let mut last = Direction::Unknown;
    for d in dirs.iter_mut() {
        match *d {
            Direction::Unknown => *d = last,
            Direction::Axis => last = Direction::Unknown,
            known => last = known,
        }
    }
}

fn spread(values: impl Iterator<Item = f64>) -> f64 {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    });
    hi - lo
}

fn classify(geom: &EllipseGeometry, points: &[(f64, f64)], axis_tol: f64) -> CurveClass {
    if points.iter().all(|p| p.1.abs() <= axis_tol) {
        return CurveClass::MajorAxis;
    }
    // Spread is measured without the two endpoints of longer pieces.
    let body = if points.len() > 4 {
        &points[1..points.len() - 1]
    } else {
        points
    };
    let coords: Vec<(f64, f64)> = body.iter().map(|&p| folded(geom, p)).collect();
    let beta_spread = spread(coords.iter().map(|c| c.1)) / geom.beta0();
    let alpha_spread = spread(coords.iter().map(|c| c.0)) / PI;
    match (beta_spread < SPREAD, alpha_spread < SPREAD) {
        (true, true) if alpha_spread < beta_spread => CurveClass::Hyperbolic,
        (true, _) => CurveClass::Elliptic,
        (false, true) => CurveClass::Hyperbolic,
        (false, false) => CurveClass::Other,
    }
}

/// Number of distinct clusters among `levels` separated by more than `gap`.
fn count_levels(mut levels: Vec<f64>, gap: f64) -> usize {
    levels.sort_by(f64::total_cmp);
    levels.windows(2).filter(|w| w[1] - w[0] > gap).count() + usize::from(!levels.is_empty())
}

/// Count distinct elliptic (`β`) and hyperbolic (`|α|`) nodal levels.
/// Pieces of one nodal line cut apart at crossings count once.
pub fn classify_and_count(curves: &[NodalCurve], geom: &EllipseGeometry) -> NodalCounts {
    let mean = |c: &NodalCurve, pick: fn((f64, f64)) -> f64| {
        c.points.iter().map(|&p| pick(folded(geom, p))).sum::<f64>() / c.points.len() as f64
    };
    let elliptic: Vec<f64> = curves
        .iter()
        .filter(|c| c.class == CurveClass::Elliptic)
        .map(|c| mean(c, |p| p.1))
        .collect();
    let hyperbolic: Vec<f64> = curves
        .iter()
        .filter(|c| c.class == CurveClass::Hyperbolic)
        .map(|c| mean(c, |p| p.0))
        .collect();
    NodalCounts {
        elliptic: count_levels(elliptic, SPREAD * geom.beta0()),
        hyperbolic: count_levels(hyperbolic, SPREAD * PI),
        major_axis: curves.iter().any(|c| c.class == CurveClass::MajorAxis),
        other: curves
            .iter()
            .filter(|c| c.class == CurveClass::Other)
            .count(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(nx: usize, ny: usize, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        let mut v = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                v.push(f(i as f64, j as f64));
            }
        }
        v
    }

    #[test]
    fn circle_is_one_closed_curve() {
        let v = sample(21, 21, |x, y| {
            (x - 10.0).powi(2) + (y - 10.0).powi(2) - 36.0
        });
        let lines = marching_squares(&v, 21, 21, 0.0);
        assert_eq!(lines.len(), 1);
        assert!(lines[0].closed);
        for &(x, y) in &lines[0].points {
            let r = ((x - 10.0).powi(2) + (y - 10.0).powi(2)).sqrt();
            assert!((r - 6.0).abs() < 0.1, "r = {r}");
        }
    }

    #[test]
    fn straight_line_is_exact() {
        let v = sample(10, 8, |x, _| x - 4.3);
        let lines = marching_squares(&v, 10, 8, 0.0);
        assert_eq!(lines.len(), 1);
        assert!(!lines[0].closed);
        assert_eq!(lines[0].segments(), 7);
        assert!(lines[0].points.iter().all(|p| (p.0 - 4.3).abs() < 1e-12));
    }

    #[test]
    fn crossing_lines_yield_two_turning_chains() {
        let v = sample(11, 11, |x, y| (x - 5.5) * (y - 5.5));
        let lines = marching_squares(&v, 11, 11, 0.0);
        assert_eq!(lines.len(), 2);
        assert_eq!(lines.iter().map(Polyline::segments).sum::<usize>(), 20);
    }

    #[test]
    fn non_finite_cells_are_skipped() {
        let mut v = sample(10, 10, |x, _| x - 4.5);
        for j in 5..10 {
            for i in 0..10 {
                v[j * 10 + i] = f64::NAN;
            }
        }
        let lines = marching_squares(&v, 10, 10, 0.0);
        assert_eq!(lines.len(), 1);
        assert_eq!(lines[0].segments(), 4);
    }

    #[test]
    fn no_sign_change_no_curve() {
        let v = sample(9, 9, |x, y| 1.0 + x * y);
        assert!(marching_squares(&v, 9, 9, 0.0).is_empty());
    }

    #[test]
    fn level_clusters() {
        assert_eq!(count_levels(vec![], 0.1), 0);
        assert_eq!(count_levels(vec![0.5, 0.52, 0.49], 0.1), 1);
        assert_eq!(count_levels(vec![0.1, 0.5, 0.52, 0.9], 0.1), 3);
    }

    #[test]
    fn classification_of_exact_curves() {
        let geom = EllipseGeometry::from_semiaxes(5.0, 3.0).unwrap();
        let tol = AXIS_TOL * 3.0;
        let ellipse: Vec<(f64, f64)> = (0..20)
            .map(|k| {
                geom.to_cartesian(crate::geometry::EllipticPoint {
                    alpha: 0.1 * k as f64,
                    beta: 0.4,
                })
            })
            .collect();
        assert_eq!(classify(&geom, &ellipse, tol), CurveClass::Elliptic);
        let hyperbola: Vec<(f64, f64)> = (1..20)
            .map(|k| {
                geom.to_cartesian(crate::geometry::EllipticPoint {
                    alpha: 1.0,
                    beta: 0.03 * k as f64,
                })
            })
            .collect();
        assert_eq!(classify(&geom, &hyperbola, tol), CurveClass::Hyperbolic);
        let axis: Vec<(f64, f64)> = (0..10).map(|k| (k as f64 * 0.4 - 2.0, 0.0)).collect();
        assert_eq!(classify(&geom, &axis, tol), CurveClass::MajorAxis);
        let diagonal: Vec<(f64, f64)> =
            (0..10).map(|k| (k as f64 * 0.3, k as f64 * 0.25)).collect();
        assert_eq!(classify(&geom, &diagonal, tol), CurveClass::Other);
    }

    #[test]
    fn corner_path_splits_into_hyperbola_and_ellipse() {
        let geom = EllipseGeometry::from_semiaxes(5.0, 3.0).unwrap();
        let mut pts: Vec<(f64, f64)> = (1..=12)
            .rev()
            .map(|k| {
                geom.to_cartesian(crate::geometry::EllipticPoint {
                    alpha: 1.2,
                    beta: 0.5 * k as f64 / 12.0,
                })
            })
            .collect();
        pts.extend((1..=12).map(|k| {
            geom.to_cartesian(crate::geometry::EllipticPoint {
                alpha: 1.2 - 0.05 * k as f64,
                beta: 0.5 / 12.0,
            })
        }));
        let pieces = split_by_direction(&geom, &pts, false, 3e-6);
        assert_eq!(pieces.len(), 2);
        let classes: Vec<CurveClass> = pieces
            .iter()
            .map(|(p, _)| classify(&geom, p, 3e-6))
            .collect();
        assert_eq!(classes, vec![CurveClass::Hyperbolic, CurveClass::Elliptic]);
    }
}
