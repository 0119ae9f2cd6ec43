//! SVG pictures of planar constraint sets. Each restricted zone `B(u) ≤ 0` is
//! a translucent layer cut from a sample grid by marching squares, so the
//! unshaded part of the picture is the feasible region.

use std::fmt::Write as _;

use qcqpx_core::verify::BoundingBox;
use qcqpx_core::{ConstraintSet, SymMatrix};

use crate::{CliError, CliResult};

pub const DEFAULT_RESOLUTION: usize = 400;
pub const MIN_RESOLUTION: usize = 64;

const CANVAS: f64 = 600.0;
const MARGIN: f64 = 40.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
];

#[derive(Debug, Clone, PartialEq)]
pub struct RenderSpec {
    pub bbox: BoundingBox,
    /// Grid cells per axis.
    pub resolution: usize,
}

impl RenderSpec {
    pub fn new(bbox: BoundingBox, resolution: usize) -> CliResult<Self> {
        if bbox.dim() != 2 {
            return Err(CliError::usage(format!("render box must be 2-D, got {}-D", bbox.dim())));
        }
        if resolution < MIN_RESOLUTION {
            return Err(CliError::usage(format!(
                "resolution must be >= {MIN_RESOLUTION}, got {resolution}"
            )));
        }
        Ok(Self { bbox, resolution })
    }

    fn point(&self, i: usize, j: usize) -> [f64; 2] {
        let b = &self.bbox;
        let r = self.resolution as f64;
        [
            b.lo[0] + (b.hi[0] - b.lo[0]) * i as f64 / r,
            b.lo[1] + (b.hi[1] - b.lo[1]) * j as f64 / r,
        ]
    }

    fn to_px(&self, u: [f64; 2]) -> (f64, f64) {
        let b = &self.bbox;
        (
            MARGIN + (u[0] - b.lo[0]) / (b.hi[0] - b.lo[0]) * CANVAS,
            MARGIN + (b.hi[1] - u[1]) / (b.hi[1] - b.lo[1]) * CANVAS,
        )
    }
}

/// Constraint values at the `(res+1)²` grid vertices, `i` along `u₁`.
pub fn sample_grid(m: &SymMatrix, spec: &RenderSpec) -> Vec<f64> {
    let n = spec.resolution + 1;
    let mut out = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            let u = spec.point(i, j);
            out.push(m.quad_form(&[u[0], u[1], 1.0]));
        }
    }
    out
}

/// Number of 4-connected components of grid vertices inside the zone.
pub fn zone_components(m: &SymMatrix, spec: &RenderSpec) -> usize {
    let n = spec.resolution + 1;
    let inside: Vec<bool> = sample_grid(m, spec).iter().map(|v| *v <= 0.0).collect();
    let mut seen = vec![false; n * n];
    let mut count = 0;
    let mut stack = Vec::new();
    for start in 0..n * n {
        if !inside[start] || seen[start] {
            continue;
        }
        count += 1;
        seen[start] = true;
        stack.push(start);
        while let Some(p) = stack.pop() {
            let (i, j) = (p % n, p / n);
            let mut visit = |q: usize| {
                if inside[q] && !seen[q] {
                    seen[q] = true;
                    stack.push(q);
                }
            };
            if i > 0 {
                visit(p - 1);
            }
            if i + 1 < n {
                visit(p + 1);
            }
            if j > 0 {
                visit(p - n);
            }
            if j + 1 < n {
                visit(p + n);
            }
        }
    }
    count
}

fn lerp(a: [f64; 2], b: [f64; 2], fa: f64, fb: f64) -> [f64; 2] {
    let t = if fa == fb { 0.5 } else { fa / (fa - fb) };
    [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]
}

struct Layer {
    fill: String,
    edges: String,
    label_at: Option<[f64; 2]>,
}

fn push_poly(d: &mut String, spec: &RenderSpec, pts: &[[f64; 2]]) {
    for (k, p) in pts.iter().enumerate() {
        let (x, y) = spec.to_px(*p);
        let _ = write!(d, "{}{x:.2},{y:.2}", if k == 0 { "M" } else { "L" });
    }
    d.push('Z');
}

fn layer(m: &SymMatrix, spec: &RenderSpec) -> Layer {
    let n = spec.resolution + 1;
    let vals = sample_grid(m, spec);
    let f = |i: usize, j: usize| vals[j * n + i];
    let mut fill = String::new();
    let mut edges = String::new();
    let (mut sx, mut sy, mut cnt) = (0.0, 0.0, 0usize);
    for j in 0..spec.resolution {
        let mut run: Option<usize> = None;
        for i in 0..=spec.resolution {
            let full = i < spec.resolution && f(i, j) <= 0.0 && f(i + 1, j) <= 0.0 && f(i + 1, j + 1) <= 0.0 && f(i, j + 1) <= 0.0;
            if full {
                run.get_or_insert(i);
                let c = spec.point(i, j);
                sx += c[0];
                sy += c[1];
                cnt += 1;
                continue;
            }
            if let Some(start) = run.take() {
                let pts = [spec.point(start, j), spec.point(i, j), spec.point(i, j + 1), spec.point(start, j + 1)];
                push_poly(&mut fill, spec, &pts);
            }
            if i == spec.resolution {
                break;
            }
            let corners = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)];
            let fv: Vec<f64> = corners.iter().map(|&(a, b)| f(a, b)).collect();
            if fv.iter().all(|v| *v > 0.0) {
                continue;
            }
            let pv: Vec<[f64; 2]> = corners.iter().map(|&(a, b)| spec.point(a, b)).collect();
            let mut poly = Vec::with_capacity(8);
            let mut cross = Vec::with_capacity(4);
            for k in 0..4 {
                let l = (k + 1) % 4;
                if fv[k] <= 0.0 {
                    poly.push(pv[k]);
                }
                if (fv[k] <= 0.0) != (fv[l] <= 0.0) {
                    let p = lerp(pv[k], pv[l], fv[k], fv[l]);
                    poly.push(p);
                    cross.push(p);
                }
            }
            push_poly(&mut fill, spec, &poly);
            for pair in cross.chunks_exact(2) {
                let (x0, y0) = spec.to_px(pair[0]);
                let (x1, y1) = spec.to_px(pair[1]);
                let _ = write!(edges, "M{x0:.2},{y0:.2}L{x1:.2},{y1:.2}");
            }
        }
    }
    let label_at = (cnt > 0).then(|| [sx / cnt as f64, sy / cnt as f64]);
    Layer { fill, edges, label_at }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn axes(s: &mut String, spec: &RenderSpec) {
    let b = &spec.bbox;
    let size = CANVAS + 2.0 * MARGIN;
    let _ = writeln!(
        s,
        r##"<rect x="{MARGIN}" y="{MARGIN}" width="{CANVAS}" height="{CANVAS}" fill="none" stroke="#000" stroke-width="1"/>"##
    );
    if b.lo[1] < 0.0 && 0.0 < b.hi[1] {
        let (_, y) = spec.to_px([0.0, 0.0]);
        let _ = writeln!(
            s,
            r##"<line x1="{MARGIN}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#555" stroke-width="0.8"/>"##,
            MARGIN + CANVAS
        );
    }
    if b.lo[0] < 0.0 && 0.0 < b.hi[0] {
        let (x, _) = spec.to_px([0.0, 0.0]);
        let _ = writeln!(
            s,
            r##"<line x1="{x:.2}" y1="{MARGIN}" x2="{x:.2}" y2="{:.2}" stroke="#555" stroke-width="0.8"/>"##,
            MARGIN + CANVAS
        );
    }
    let text = |s: &mut String, x: f64, y: f64, anchor: &str, v: f64| {
        let _ = writeln!(
            s,
            r#"<text x="{x:.2}" y="{y:.2}" font-family="sans-serif" font-size="12" text-anchor="{anchor}">{}</text>"#,
            crate::fmt_num(v, 2)
        );
    };
    text(s, MARGIN, size - MARGIN + 16.0, "middle", b.lo[0]);
    text(s, MARGIN + CANVAS, size - MARGIN + 16.0, "middle", b.hi[0]);
    text(s, MARGIN - 4.0, MARGIN + CANVAS, "end", b.lo[1]);
    text(s, MARGIN - 4.0, MARGIN + 4.0, "end", b.hi[1]);
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="13" text-anchor="middle">u1</text>"#,
        MARGIN + CANVAS / 2.0,
        size - 8.0
    );
    let _ = writeln!(
        s,
        r#"<text x="12" y="{:.2}" font-family="sans-serif" font-size="13" text-anchor="middle">u2</text>"#,
        MARGIN + CANVAS / 2.0
    );
}

pub fn render_svg(set: &ConstraintSet, spec: &RenderSpec) -> CliResult<String> {
    if let Some(n) = set.dim() {
        if n != 3 {
            return Err(CliError::usage(format!("render needs 3x3 constraints (planar sets), got n = {n}")));
        }
    }
    let size = CANVAS + 2.0 * MARGIN;
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#
    );
    let _ = writeln!(s, r##"<rect width="100%" height="100%" fill="#fff"/>"##);
    let _ = writeln!(
        s,
        r#"<clipPath id="plot"><rect x="{MARGIN}" y="{MARGIN}" width="{CANVAS}" height="{CANVAS}"/></clipPath>"#
    );
    let mut labels = String::new();
    for (k, c) in set.constraints().iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let l = layer(&c.matrix, spec);
        let id = escape(&c.label);
        let _ = writeln!(s, r#"<g id="zone-{k}" clip-path="url(#plot)"><title>{id}</title>"#);
        if !l.fill.is_empty() {
            let _ = writeln!(
                s,
                r#"<path d="{}" fill="{color}" fill-opacity="0.3" stroke="none"/>"#,
                l.fill
            );
        }
        if !l.edges.is_empty() {
            let _ = writeln!(
                s,
                r#"<path d="{}" fill="none" stroke="{color}" stroke-width="1.2"/>"#,
                l.edges
            );
        }
        let _ = writeln!(s, "</g>");
        if let Some(p) = l.label_at {
            let (x, y) = spec.to_px(p);
            let _ = writeln!(
                labels,
                r#"<text x="{x:.2}" y="{y:.2}" font-family="sans-serif" font-size="12" fill="{color}" text-anchor="middle">{id}</text>"#
            );
        }
    }
    axes(&mut s, spec);
    s.push_str(&labels);
    let _ = writeln!(s, "</svg>");
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use qcqpx_core::instances::{instance_disk_ring, instance_strip};

    fn spec(lo: f64, hi: f64, res: usize) -> RenderSpec {
        RenderSpec::new(BoundingBox::square(lo, hi).unwrap(), res).unwrap()
    }

    #[test]
    fn rejects_low_resolution() {
        assert!(RenderSpec::new(BoundingBox::square(0.0, 1.0).unwrap(), 63).is_err());
    }

    #[test]
    fn empty_set_draws_axes_only() {
        let svg = render_svg(&ConstraintSet::new(Vec::new()).unwrap(), &spec(-2.0, 2.0, 64)).unwrap();
        assert!(svg.contains("<line"));
        assert!(!svg.contains("<g id=\"zone-"));
    }

    #[test]
    fn ring_has_one_layer_per_constraint() {
        let set = instance_disk_ring(0.5).unwrap();
        let svg = render_svg(&set, &spec(-2.0, 2.0, 100)).unwrap();
        assert_eq!(svg.matches("<g id=\"zone-").count(), 8);
        assert!(svg.ends_with("</svg>\n"));
    }

    #[test]
    fn zone_topology() {
        let set = instance_disk_ring(0.5).unwrap();
        let s = spec(-2.0, 2.0, 64);
        for m in set.matrices().take(7) {
            assert_eq!(zone_components(m, &s), 1);
        }
        // The exterior of the enclosing circle touches all four sides of the box.
        assert_eq!(zone_components(&set.constraints()[7].matrix, &s), 1);
        let strip = instance_strip();
        for m in strip.matrices() {
            assert_eq!(zone_components(m, &s), 1);
        }
    }

    #[test]
    fn disk_area_is_close() {
        let set = instance_disk_ring(0.5).unwrap();
        let s = spec(-1.0, 1.0, 200);
        let vals = sample_grid(&set.constraints()[6].matrix, &s);
        let frac = vals.iter().filter(|v| **v <= 0.0).count() as f64 / vals.len() as f64;
        let expect = std::f64::consts::PI * 0.25 / 4.0;
        assert!((frac - expect).abs() < 0.01, "{frac} vs {expect}");
    }
}
