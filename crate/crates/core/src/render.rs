//! SVG pictures of instances, candidates and barriers.
//!
//! The y axis points up, as in the usual plane drawings. Coordinates are
//! rounded to six decimals when written, and output is byte-stable.

use std::fmt::Write as _;

use crate::geometry::{to_f64, Point, Polygon, Segment};
use crate::instance::{Instance, Shape};

/// Fill colors for object sets, cycled when there are more sets.
pub const PALETTE: [&str; 8] = ["#1f77b4", "#ff7f0e", "#2ca02c", "#9467bd", "#8c564b", "#e377c2", "#bcbd22", "#17becf"];

pub const BARRIER_COLOR: &str = "red";
const OBSTACLE_COLOR: &str = "#999999";
const CANDIDATE_COLOR: &str = "#aaaaaa";

#[derive(Debug, Clone, Default)]
pub struct Scene<'a> {
    pub barriers: &'a [Segment],
    pub candidates: &'a [Segment],
}

fn num(v: f64) -> String {
    let s = format!("{v:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

struct Frame {
    min_x: f64,
    max_y: f64,
    pad: f64,
    width: f64,
    height: f64,
    unit: f64,
}

impl Frame {
    fn of(ws: &Polygon) -> Frame {
        let xs: Vec<f64> = ws.vertices().iter().map(|p| to_f64(&p.x)).collect();
        let ys: Vec<f64> = ws.vertices().iter().map(|p| to_f64(&p.y)).collect();
        let fold = |v: &[f64], f: fn(f64, f64) -> f64, init: f64| v.iter().copied().fold(init, f);
        let (min_x, max_x) = (fold(&xs, f64::min, f64::INFINITY), fold(&xs, f64::max, f64::NEG_INFINITY));
        let (min_y, max_y) = (fold(&ys, f64::min, f64::INFINITY), fold(&ys, f64::max, f64::NEG_INFINITY));
        let extent = (max_x - min_x).max(max_y - min_y);
        let pad = 0.05 * extent;
        Frame {
            min_x,
            max_y,
            pad,
            width: max_x - min_x + 2.0 * pad,
            height: max_y - min_y + 2.0 * pad,
            unit: extent / 200.0,
        }
    }

    fn x(&self, p: &Point) -> String {
        num(to_f64(&p.x) - self.min_x + self.pad)
    }

    fn y(&self, p: &Point) -> String {
        num(self.max_y - to_f64(&p.y) + self.pad)
    }

    fn points(&self, poly: &Polygon) -> String {
        poly.vertices().iter().map(|p| format!("{},{}", self.x(p), self.y(p))).collect::<Vec<_>>().join(" ")
    }
}

fn shape(out: &mut String, f: &Frame, s: &Shape, fill: &str) {
    match s {
        Shape::Point(p) => {
            let _ = writeln!(out, r#"  <circle cx="{}" cy="{}" r="{}" fill="{fill}"/>"#, f.x(p), f.y(p), num(1.6 * f.unit));
        }
        Shape::Polygon(poly) => {
            let _ = writeln!(out, r#"  <polygon points="{}" fill="{fill}" stroke="none"/>"#, f.points(poly));
        }
    }
}

fn line(out: &mut String, f: &Frame, s: &Segment, attrs: &str) {
    let _ = writeln!(
        out,
        r#"  <line x1="{}" y1="{}" x2="{}" y2="{}" {attrs}/>"#,
        f.x(&s.a),
        f.y(&s.a),
        f.x(&s.b),
        f.y(&s.b)
    );
}

pub fn render_svg(inst: &Instance, scene: &Scene) -> String {
    let f = Frame::of(&inst.workspace);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {w} {h}" width="{pw}" height="{ph}">"#,
        w = num(f.width),
        h = num(f.height),
        pw = num(800.0),
        ph = num(800.0 * f.height / f.width),
    );
    let _ = writeln!(
        out,
        r#"  <polygon points="{}" fill="white" stroke="black" stroke-width="{}"/>"#,
        f.points(&inst.workspace),
        num(0.6 * f.unit)
    );
    for o in &inst.obstacles {
        shape(&mut out, &f, o, OBSTACLE_COLOR);
    }
    for (i, set) in inst.sets.iter().enumerate() {
        for o in set {
            shape(&mut out, &f, o, PALETTE[i % PALETTE.len()]);
        }
    }
    let dashed = format!(
        r#"stroke="{CANDIDATE_COLOR}" stroke-width="{}" stroke-dasharray="{} {}""#,
        num(0.2 * f.unit),
        num(1.2 * f.unit),
        num(0.8 * f.unit)
    );
    for c in scene.candidates {
        line(&mut out, &f, c, &dashed);
    }
    let solid = format!(r#"stroke="{BARRIER_COLOR}" stroke-width="{}""#, num(0.8 * f.unit));
    for b in scene.barriers {
        line(&mut out, &f, b, &solid);
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst() -> Instance {
        Instance {
            workspace: Polygon::from_ints(&[(0, 0), (100, 0), (100, 100), (0, 100)]).unwrap(),
            sets: vec![vec![Shape::Point(Point::from_ints(20, 30))], vec![Shape::Point(Point::from_ints(70, 50))]],
            obstacles: vec![Shape::Polygon(Polygon::from_ints(&[(40, 40), (50, 40), (45, 50)]).unwrap())],
        }
    }

    #[test]
    fn numbers_are_trimmed() {
        assert_eq!(num(1.0), "1");
        assert_eq!(num(2.5), "2.5");
        assert_eq!(num(1.0 / 3.0), "0.333333");
        assert_eq!(num(-0.0000001), "0");
    }

    #[test]
    fn y_axis_points_up() {
        let svg = render_svg(&inst(), &Scene::default());
        // (20, 30) sits 5 units of padding in from the left, 75 from the top.
        assert!(svg.contains(r#"<circle cx="25" cy="75""#));
        assert!(!svg.contains(BARRIER_COLOR));
    }

    #[test]
    fn barriers_and_candidates() {
        let b = [Segment::new(Point::from_ints(50, 0), Point::from_ints(50, 100)).unwrap()];
        let c = [Segment::new(Point::from_ints(0, 50), Point::from_ints(100, 50)).unwrap()];
        let svg = render_svg(&inst(), &Scene { barriers: &b, candidates: &c });
        assert_eq!(svg.matches(r#"stroke="red""#).count(), 1);
        assert_eq!(svg.matches("stroke-dasharray").count(), 1);
        assert_eq!(svg, render_svg(&inst(), &Scene { barriers: &b, candidates: &c }));
    }
}
