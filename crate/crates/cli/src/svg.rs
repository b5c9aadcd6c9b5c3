//! Static SVG pictures of point sets and U-polygon instances.

use std::fmt::Write;

use anyhow::bail;
use cyclotomo::construct::UPolygonInstance;
use cyclotomo::geometry::{Point, PointSet};

#[derive(Debug, Clone, PartialEq)]
pub struct Palette {
    pub white: String,
    pub grey: String,
    pub interior: String,
    pub directions: String,
}

impl Default for Palette {
    fn default() -> Self {
        Palette {
            white: "#ffffff".into(),
            grey: "#9a9a9a".into(),
            interior: "#202020".into(),
            directions: "#c0392b".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenderSpec {
    pub width: u32,
    pub height: u32,
    /// Plane units per pixel.
    pub scale: f64,
    /// Plane point drawn at the canvas centre.
    pub origin: (f64, f64),
    pub palette: Palette,
    pub show_directions: bool,
}

impl RenderSpec {
    pub fn new(width: u32, height: u32, scale: f64) -> anyhow::Result<Self> {
        if width == 0 || height == 0 || !(scale > 0.0 && scale.is_finite()) {
            bail!("canvas size and scale must be positive");
        }
        Ok(RenderSpec {
            width,
            height,
            scale,
            origin: (0.0, 0.0),
            palette: Palette::default(),
            show_directions: true,
        })
    }

    /// 600×600 canvas with `points` centred and a 10% margin.
    pub fn fit(points: &PointSet) -> Self {
        let xy: Vec<(f64, f64)> = points.points.iter().map(Point::to_f64).collect();
        let (mut lo, mut hi) = ((f64::MAX, f64::MAX), (f64::MIN, f64::MIN));
        for &(x, y) in &xy {
            lo = (lo.0.min(x), lo.1.min(y));
            hi = (hi.0.max(x), hi.1.max(y));
        }
        let mut spec = RenderSpec::new(600, 600, 1.0 / 60.0).expect("valid");
        if !xy.is_empty() {
            let extent = (hi.0 - lo.0).max(hi.1 - lo.1).max(1e-9);
            spec.scale = extent / (0.8 * 600.0);
            spec.origin = ((lo.0 + hi.0) / 2.0, (lo.1 + hi.1) / 2.0);
        }
        spec
    }

    fn to_canvas(&self, (x, y): (f64, f64)) -> (f64, f64) {
        (
            f64::from(self.width) / 2.0 + (x - self.origin.0) / self.scale,
            f64::from(self.height) / 2.0 - (y - self.origin.1) / self.scale,
        )
    }
}

pub enum RenderInput<'a> {
    Points(&'a PointSet),
    Instance(&'a UPolygonInstance),
}

/// Twelve significant digits, shortest form.
fn num(x: f64) -> String {
    let rounded: f64 = format!("{x:.11e}").parse().expect("float");
    if rounded == 0.0 {
        "0".into()
    } else {
        rounded.to_string()
    }
}

fn circle(out: &mut String, spec: &RenderSpec, p: &Point, class: &str, fill: &str) {
    let (x, y) = spec.to_canvas(p.to_f64());
    let _ = writeln!(
        out,
        r##"    <circle class="{class}" cx="{}" cy="{}" r="4" fill="{fill}" stroke="#000000" stroke-width="1"/>"##,
        num(x),
        num(y)
    );
}

pub fn render_svg(input: &RenderInput<'_>, spec: &RenderSpec) -> String {
    let (w, h) = (spec.width, spec.height);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    if let (RenderInput::Instance(inst), true) = (input, spec.show_directions) {
        let pts: Vec<(f64, f64)> = inst.hull.iter().map(Point::to_f64).collect();
        let k = pts.len().max(1) as f64;
        let c = pts
            .iter()
            .fold((0.0, 0.0), |a, p| (a.0 + p.0 / k, a.1 + p.1 / k));
        let (cx, cy) = spec.to_canvas(c);
        let len = 0.45 * f64::from(w.min(h));
        out.push_str("  <g id=\"directions\">\n");
        for d in &inst.directions {
            let (dx, dy) = d.w.to_complex_f64();
            let r = dx.hypot(dy);
            let _ = writeln!(
                out,
                r#"    <line class="direction" x1="{}" y1="{}" x2="{}" y2="{}" stroke="{}" stroke-width="1"/>"#,
                num(cx),
                num(cy),
                num(cx + len * dx / r),
                num(cy - len * dy / r),
                spec.palette.directions
            );
        }
        out.push_str("  </g>\n");
    }
    out.push_str("  <g id=\"points\">\n");
    match input {
        RenderInput::Points(s) => {
            for p in &s.points {
                circle(&mut out, spec, p, "point", &spec.palette.interior);
            }
        }
        RenderInput::Instance(inst) => {
            if let Some(interior) = &inst.interior {
                for p in &interior.points {
                    circle(&mut out, spec, p, "interior", &spec.palette.interior);
                }
            }
            for p in &inst.white.points {
                circle(&mut out, spec, p, "white", &spec.palette.white);
            }
            for p in &inst.grey.points {
                circle(&mut out, spec, p, "grey", &spec.palette.grey);
            }
        }
    }
    out.push_str("  </g>\n</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_digits() {
        assert_eq!(num(1.0 / 3.0), "0.333333333333");
        assert_eq!(num(-0.0), "0");
        assert_eq!(num(300.0), "300");
        assert_eq!(num(123456.7890123456), "123456.789012");
    }

    #[test]
    fn bad_specs() {
        assert!(RenderSpec::new(0, 10, 1.0).is_err());
        assert!(RenderSpec::new(10, 10, 0.0).is_err());
        assert!(RenderSpec::new(10, 10, f64::NAN).is_err());
    }
}
