//! CSV, JSON and SVG writers.

use std::fmt::Write as _;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::mathieu::Parity;
use crate::modes::{marching_squares, CurveClass, ModeField, NodalCounts, NodalCurve};

/// `v` rounded to `digits` significant digits, in positional notation
/// unless the exponent is very large or small.
pub fn format_sig(v: f64, digits: usize) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    if v == 0.0 {
        return "0".to_string();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, v);
    let exp: i32 = sci
        .rsplit_once('e')
        .and_then(|(_, e)| e.parse().ok())
        .expect("scientific formatting has an exponent");
    if exp < -5 || exp >= digits as i32 {
        return sci;
    }
    format!("{:.*}", (digits as i32 - 1 - exp) as usize, v)
}

const Q_DIGITS: usize = 17;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub g: u32,
    pub k: usize,
    pub q: f64,
    pub char_value: f64,
    pub lambda: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableDocument {
    pub parity: Parity,
    pub beta0: f64,
    pub c: f64,
    pub rows: Vec<TableRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveDocument {
    pub parity: Parity,
    pub g: u32,
    pub k: usize,
    pub q: f64,
    pub char_value: f64,
    pub lambda: f64,
    pub angular_rate: f64,
    pub beta0: f64,
    pub c: f64,
    pub newton_iters: usize,
    pub residual: f64,
}

/// A sampled mode. `u` and `inside` are row-major with `y` rows; samples
/// outside the membrane have `u = null`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridDocument {
    pub parity: Parity,
    pub g: u32,
    pub k: usize,
    pub q: f64,
    pub char_value: f64,
    pub beta0: f64,
    pub c: f64,
    pub semi_major: f64,
    pub semi_minor: f64,
    pub nx: usize,
    pub ny: usize,
    pub quadrant: bool,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub u: Vec<Option<f64>>,
    pub inside: Vec<bool>,
}

impl GridDocument {
    pub fn from_field(field: &ModeField) -> Self {
        let spec = &field.spec;
        Self {
            parity: spec.index.parity(),
            g: spec.index.g(),
            k: spec.k,
            q: spec.q,
            char_value: spec.char_value,
            beta0: field.geom.beta0(),
            c: field.geom.c(),
            semi_major: field.geom.semi_major(),
            semi_minor: field.geom.semi_minor(),
            nx: field.grid.nx,
            ny: field.grid.ny,
            quadrant: field.grid.quadrant,
            x: (0..field.grid.nx).map(|i| field.x(i)).collect(),
            y: (0..field.grid.ny).map(|j| field.y(j)).collect(),
            u: field
                .values
                .iter()
                .zip(&field.mask)
                .map(|(&v, &m)| if m && v.is_finite() { Some(v) } else { None })
                .collect(),
            inside: field.mask.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodalDocument {
    pub parity: Parity,
    pub g: u32,
    pub k: usize,
    pub q: f64,
    pub counts: NodalCounts,
    pub curves: Vec<NodalCurve>,
}

pub fn write_json<T: Serialize>(out: &mut dyn Write, doc: &T) -> io::Result<()> {
    serde_json::to_writer(&mut *out, doc).map_err(io::Error::other)?;
    out.write_all(b"\n")
}

pub fn write_table_csv(out: &mut dyn Write, doc: &TableDocument) -> io::Result<()> {
    writeln!(out, "g,k,q,char_value,lambda")?;
    for r in &doc.rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            r.g,
            r.k,
            format_sig(r.q, Q_DIGITS),
            format_sig(r.char_value, Q_DIGITS),
            format_sig(r.lambda, Q_DIGITS)
        )?;
    }
    Ok(())
}

pub fn write_grid_csv(out: &mut dyn Write, doc: &GridDocument) -> io::Result<()> {
    writeln!(
        out,
        "# parity={} g={} k={} q={} char_value={} beta0={} c={}",
        doc.parity,
        doc.g,
        doc.k,
        format_sig(doc.q, Q_DIGITS),
        format_sig(doc.char_value, Q_DIGITS),
        doc.beta0,
        doc.c
    )?;
    writeln!(out, "x,y,u,inside")?;
    for (j, y) in doc.y.iter().enumerate() {
        for (i, x) in doc.x.iter().enumerate() {
            let n = j * doc.nx + i;
            let u = doc.u[n].map(|v| v.to_string()).unwrap_or_default();
            writeln!(out, "{x},{y},{u},{}", u8::from(doc.inside[n]))?;
        }
    }
    Ok(())
}

pub fn write_nodal_csv(out: &mut dyn Write, doc: &NodalDocument) -> io::Result<()> {
    let c = &doc.counts;
    writeln!(
        out,
        "# parity={} g={} k={} q={} elliptic={} hyperbolic={} major_axis={} other={}",
        doc.parity,
        doc.g,
        doc.k,
        format_sig(doc.q, Q_DIGITS),
        c.elliptic,
        c.hyperbolic,
        c.major_axis,
        c.other
    )?;
    writeln!(out, "curve,class,closed,x,y")?;
    for (n, curve) in doc.curves.iter().enumerate() {
        let class = match curve.class {
            CurveClass::Elliptic => "elliptic",
            CurveClass::Hyperbolic => "hyperbolic",
            CurveClass::MajorAxis => "major_axis",
            CurveClass::Other => "other",
        };
        for (x, y) in &curve.points {
            writeln!(out, "{n},{class},{},{x},{y}", curve.closed)?;
        }
    }
    Ok(())
}

/// Diverging palette for the ten bands between the eleven contour levels.
const PALETTE: [&str; 10] = [
    "#2166ac", "#4393c3", "#92c5de", "#d1e5f0", "#f7f7f7", "#f7f7f7", "#fddbc7", "#f4a582",
    "#d6604d", "#b2182b",
];
const PLOT_WIDTH: f64 = 560.0;
const MARGIN: f64 = 20.0;
/// Cells reach this far (in thousandths of a pixel) under the cells drawn
/// after them, hiding seams from pixel snapping.
const OVERLAP: i64 = 600;

/// Pixel coordinate in integer thousandths.
fn milli(v: f64) -> i64 {
    (v * 1000.0).round() as i64
}

fn fmt_milli(v: i64) -> String {
    let sign = if v < 0 { "-" } else { "" };
    format!("{sign}{}.{:03}", v.abs() / 1000, v.abs() % 1000)
}

fn band(v: f64, scale: f64) -> usize {
    let t = ((v / scale + 1.0) * 5.0).floor();
    t.clamp(0.0, 9.0) as usize
}

/// Filled contour plot at the levels `m·{-1, -0.8, …, 0.8, 1}`, `m = max|u|`,
/// with the zero contour and the membrane outline.
pub fn render_svg(field: &ModeField) -> String {
    let (nx, ny) = (field.grid.nx, field.grid.ny);
    let geom = &field.geom;
    let (x_lo, x_hi) = (field.x(0), field.x(nx - 1));
    let (y_lo, y_hi) = (field.y(0), field.y(ny - 1));
    let s = PLOT_WIDTH / (x_hi - x_lo);
    let width = PLOT_WIDTH + 2.0 * MARGIN;
    let height = (y_hi - y_lo) * s + 2.0 * MARGIN;
    let px = |x: f64| MARGIN + (x - x_lo) * s;
    let py = |y: f64| MARGIN + (y_hi - y) * s;
    let dx = (x_hi - x_lo) / (nx - 1) as f64;
    let dy = (y_hi - y_lo) / (ny - 1) as f64;
    let x_edge = |i: usize| (x_lo + (i as f64 - 0.5) * dx).clamp(x_lo, x_hi);
    let y_edge = |j: usize| (y_lo + (j as f64 - 0.5) * dy).clamp(y_lo, y_hi);
    let scale = match field.max_abs() {
        m if m > 0.0 => m,
        _ => 1.0,
    };

    let spec = &field.spec;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.3}" height="{height:.3}" viewBox="0 0 {width:.3} {height:.3}">"#
    );
    let _ = writeln!(
        svg,
        "<!-- {} g={} k={} q={} -->",
        spec.index.parity(),
        spec.index.g(),
        spec.k,
        format_sig(spec.q, Q_DIGITS)
    );
    let _ = writeln!(
        svg,
        r#"<rect x="0" y="0" width="{width:.3}" height="{height:.3}" fill="white"/>"#
    );

    let _ = writeln!(svg, r#"<g shape-rendering="crispEdges">"#);
    for j in 0..ny {
        let mut i = 0;
        while i < nx {
            if !field.inside(i, j) {
                i += 1;
                continue;
            }
            let b = band(field.value(i, j), scale);
            let start = i;
            while i < nx && field.inside(i, j) && band(field.value(i, j), scale) == b {
                i += 1;
            }
            let (l, r) = (milli(px(x_edge(start))), milli(px(x_edge(i))));
            let (t, btm) = (milli(py(y_edge(j + 1))), milli(py(y_edge(j))));
            let _ = writeln!(
                svg,
                r#"<rect x="{}" y="{}" width="{}" height="{}" fill="{}"/>"#,
                fmt_milli(l),
                fmt_milli(t - OVERLAP),
                fmt_milli(r - l + OVERLAP),
                fmt_milli(btm - t + OVERLAP),
                PALETTE[b]
            );
        }
    }
    let _ = writeln!(svg, "</g>");

    let _ = writeln!(svg, r#"<g fill="none" stroke="black" stroke-width="0.8">"#);
    for line in marching_squares(&field.values, nx, ny, 0.0) {
        if line.points.len() < 2 {
            continue;
        }
        let pts: Vec<String> = line
            .points
            .iter()
            .map(|&(i, j)| format!("{:.3},{:.3}", px(x_lo + i * dx), py(y_lo + j * dy)))
            .collect();
        let _ = writeln!(svg, r#"<polyline points="{}"/>"#, pts.join(" "));
    }
    let _ = writeln!(svg, "</g>");

    let (a, b) = (geom.semi_major(), geom.semi_minor());
    if field.grid.quadrant {
        let _ = writeln!(
            svg,
            r#"<path d="M {:.3} {:.3} A {:.3} {:.3} 0 0 0 {:.3} {:.3}" fill="none" stroke="black" stroke-width="1.5"/>"#,
            px(a),
            py(0.0),
            a * s,
            b * s,
            px(0.0),
            py(b)
        );
    } else {
        let _ = writeln!(
            svg,
            r#"<ellipse cx="{:.3}" cy="{:.3}" rx="{:.3}" ry="{:.3}" fill="none" stroke="black" stroke-width="1.5"/>"#,
            px(0.0),
            py(0.0),
            a * s,
            b * s
        );
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(format_sig(1.7353079670, 5), "1.7353");
        assert_eq!(format_sig(108.20930167, 5), "108.21");
        assert_eq!(format_sig(9.99996, 5), "10.000");
        assert_eq!(format_sig(-0.00123456, 3), "-0.00123");
        assert_eq!(format_sig(0.0, 17), "0");
        assert_eq!(format_sig(1.5e-9, 3), "1.50e-9");
        assert_eq!(format_sig(1.7353079670, 17).len(), 18);
    }

    #[test]
    fn seventeen_digits_round_trip() {
        for v in [1.7353079670318, 57.010533714911, 0.1 + 0.2, 108.20930167384] {
            assert_eq!(format_sig(v, 17).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn bands_cover_symmetric_range() {
        assert_eq!(band(-1.0, 1.0), 0);
        assert_eq!(band(-1e-9, 1.0), 4);
        assert_eq!(band(0.0, 1.0), 5);
        assert_eq!(band(1.0, 1.0), 9);
        assert_eq!(band(3.0, 1.0), 9);
    }

    #[test]
    fn milli_pixels() {
        assert_eq!(fmt_milli(milli(12.3456)), "12.346");
        assert_eq!(fmt_milli(milli(-0.5)), "-0.500");
        assert_eq!(fmt_milli(0), "0.000");
    }
}
