//! Minimal SVG figures: 800×600 canvas, content fitted with a 5% margin.

use std::fmt::Write;

use soulgeom::Point;

pub const WIDTH: f64 = 800.0;
pub const HEIGHT: f64 = 600.0;
const MARGIN: f64 = 0.05;

/// Affine map from data to canvas coordinates (y up in data, down on the canvas).
#[derive(Debug, Clone, Copy)]
struct Frame {
    x0: f64,
    y0: f64,
    sx: f64,
    sy: f64,
}

impl Frame {
    fn fit(lo: Point, hi: Point, equal_aspect: bool) -> Self {
        let w = (hi.x - lo.x).max(1e-12);
        let h = (hi.y - lo.y).max(1e-12);
        let (aw, ah) = (WIDTH * (1.0 - 2.0 * MARGIN), HEIGHT * (1.0 - 2.0 * MARGIN));
        let (mut sx, mut sy) = (aw / w, ah / h);
        if equal_aspect {
            sx = sx.min(sy);
            sy = sx;
        }
        // Center the content inside the margins.
        let x0 = 0.5 * WIDTH - sx * 0.5 * (lo.x + hi.x);
        let y0 = 0.5 * HEIGHT + sy * 0.5 * (lo.y + hi.y);
        Self { x0, y0, sx, sy }
    }

    fn map(&self, p: &Point) -> (f64, f64) {
        (self.x0 + self.sx * p.x, self.y0 - self.sy * p.y)
    }
}

pub struct Svg {
    frame: Frame,
    body: String,
}

fn bounds(points: &[Point]) -> (Point, Point) {
    points.iter().fold(
        (Point::new(f64::INFINITY, f64::INFINITY), Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY)),
        |(lo, hi), p| (lo.inf(p), hi.sup(p)),
    )
}

impl Svg {
    /// Geometric figure with equal axis scales, fitted to `extent`.
    pub fn geometric(extent: &[Point]) -> Self {
        let (lo, hi) = bounds(extent);
        Self { frame: Frame::fit(lo, hi, true), body: String::new() }
    }

    /// Plot with independent axis scales and light axes through the data origin.
    pub fn plot(extent: &[Point]) -> Self {
        let (lo, hi) = bounds(extent);
        let mut s = Self { frame: Frame::fit(lo, hi, false), body: String::new() };
        s.polyline(&[Point::new(lo.x, 0.0), Point::new(hi.x, 0.0)], "#999999", 1.0);
        s.polyline(&[Point::new(0.0, lo.y), Point::new(0.0, hi.y)], "#999999", 1.0);
        s
    }

    fn coords(&self, pts: &[Point]) -> String {
        pts.iter()
            .map(|p| {
                let (x, y) = self.frame.map(p);
                format!("{x:.3},{y:.3}")
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn polygon(&mut self, pts: &[Point], stroke: &str, fill: &str, width: f64) {
        let _ = writeln!(
            self.body,
            r#"<polygon points="{}" fill="{fill}" stroke="{stroke}" stroke-width="{width}"/>"#,
            self.coords(pts)
        );
    }

    pub fn polyline(&mut self, pts: &[Point], stroke: &str, width: f64) {
        let _ = writeln!(
            self.body,
            r#"<polyline points="{}" fill="none" stroke="{stroke}" stroke-width="{width}"/>"#,
            self.coords(pts)
        );
    }

    pub fn dot(&mut self, p: &Point, radius: f64, fill: &str) {
        let (x, y) = self.frame.map(p);
        let _ = writeln!(self.body, r#"<circle cx="{x:.3}" cy="{y:.3}" r="{radius}" fill="{fill}"/>"#);
    }

    pub fn label(&mut self, text: &str) {
        let _ = writeln!(
            self.body,
            r#"<text x="{:.3}" y="{:.3}" font-family="sans-serif" font-size="14">{}</text>"#,
            WIDTH * MARGIN,
            HEIGHT * MARGIN * 0.7,
            escape(text)
        );
    }

    pub fn finish(self) -> String {
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n\
             <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{}</svg>\n",
            self.body
        )
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
