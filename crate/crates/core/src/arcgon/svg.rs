//! Deterministic SVG rendering of arc-gons and point sets.

use std::f64::consts::PI;
use std::fmt::Write;

use super::{ArcGon, Vec2};

/// One drawable layer.
pub enum Layer<'a> {
    Region {
        body: &'a ArcGon,
        stroke: &'a str,
        fill: &'a str,
    },
    Points {
        points: &'a [Vec2],
        color: &'a str,
    },
}

/// Renders the layers into a standalone SVG document. The view box is the
/// data bounds plus a 5% margin; the y axis points up.
pub fn render(layers: &[Layer<'_>]) -> String {
    let mut lo = Vec2::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    let mut grow = |a: Vec2, b: Vec2| {
        lo = Vec2::new(lo.x.min(a.x), lo.y.min(a.y));
        hi = Vec2::new(hi.x.max(b.x), hi.y.max(b.y));
    };
    for layer in layers {
        match layer {
            Layer::Region { body, .. } => {
                if let Some((a, b)) = body.bounds() {
                    grow(a, b);
                }
            }
            Layer::Points { points, .. } => {
                for p in *points {
                    grow(*p, *p);
                }
            }
        }
    }
    if !lo.x.is_finite() {
        lo = Vec2::new(-1.0, -1.0);
        hi = Vec2::new(1.0, 1.0);
    }
    let span = (hi.x - lo.x).max(hi.y - lo.y).max(1e-9);
    let margin = 0.05 * span;
    let (x0, y0) = (lo.x - margin, -hi.y - margin);
    let (w, h) = (hi.x - lo.x + 2.0 * margin, hi.y - lo.y + 2.0 * margin);
    let stroke_w = span / 400.0;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{x0:.6} {y0:.6} {w:.6} {h:.6}">"#
    );
    for layer in layers {
        match layer {
            Layer::Region { body, stroke, fill } => {
                if let Some(d) = path_data(body, stroke_w) {
                    let _ = writeln!(
                        out,
                        r#"  <path d="{d}" stroke="{stroke}" fill="{fill}" fill-opacity="0.25" stroke-width="{stroke_w:.6}"/>"#
                    );
                }
            }
            Layer::Points { points, color } => {
                for p in *points {
                    let _ = writeln!(
                        out,
                        r#"  <circle cx="{:.6}" cy="{:.6}" r="{:.6}" fill="{color}"/>"#,
                        p.x,
                        -p.y,
                        2.0 * stroke_w
                    );
                }
            }
        }
    }
    out.push_str("</svg>\n");
    out
}

fn fmt_pt(p: Vec2) -> String {
    format!("{:.6} {:.6}", p.x, -p.y)
}

fn path_data(body: &ArcGon, stroke_w: f64) -> Option<String> {
    match body {
        ArcGon::Empty => None,
        ArcGon::SinglePoint(p) => {
            let r = 2.0 * stroke_w;
            let a = *p + Vec2::new(r, 0.0);
            let b = *p - Vec2::new(r, 0.0);
            Some(format!(
                "M {} A {r:.6} {r:.6} 0 1 0 {} A {r:.6} {r:.6} 0 1 0 {} Z",
                fmt_pt(a),
                fmt_pt(b),
                fmt_pt(a)
            ))
        }
        ArcGon::FullDisk(d) => {
            let r = d.radius;
            let a = d.center + Vec2::new(r, 0.0);
            let b = d.center - Vec2::new(r, 0.0);
            Some(format!(
                "M {} A {r:.6} {r:.6} 0 1 0 {} A {r:.6} {r:.6} 0 1 0 {} Z",
                fmt_pt(a),
                fmt_pt(b),
                fmt_pt(a)
            ))
        }
        ArcGon::Chain(arcs) => {
            let mut d = format!("M {}", fmt_pt(arcs[0].start_point()));
            for a in arcs {
                // counterclockwise in math coordinates is the negative sweep once y is flipped
                let large = u8::from(a.sweep > PI);
                let _ = write!(
                    d,
                    " A {r:.6} {r:.6} 0 {large} 0 {}",
                    fmt_pt(a.end_point()),
                    r = a.radius
                );
            }
            d.push_str(" Z");
            Some(d)
        }
    }
}
