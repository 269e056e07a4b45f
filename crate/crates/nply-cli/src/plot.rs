//! Static SVG rendering: quotient circle images overlaid on the target
//! boundary.

use num_complex::Complex64;

use nply::series::{circle_point, ComplexSeries};
use nply::targets::ConvexTarget;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 600.0;
const PAD: f64 = 40.0;

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

struct Frame {
    min_x: f64,
    max_x: f64,
    min_y: f64,
    max_y: f64,
}

impl Frame {
    fn from_points<'a>(points: impl Iterator<Item = &'a Complex64>) -> Frame {
        let mut f = Frame { min_x: f64::MAX, max_x: f64::MIN, min_y: f64::MAX, max_y: f64::MIN };
        for p in points {
            f.min_x = f.min_x.min(p.re);
            f.max_x = f.max_x.max(p.re);
            f.min_y = f.min_y.min(p.im);
            f.max_y = f.max_y.max(p.im);
        }
        if f.min_x > f.max_x {
            f = Frame { min_x: -1.0, max_x: 1.0, min_y: -1.0, max_y: 1.0 };
        }
        let dx = (f.max_x - f.min_x).max(1e-6) * 0.1;
        let dy = (f.max_y - f.min_y).max(1e-6) * 0.1;
        f.min_x -= dx;
        f.max_x += dx;
        f.min_y -= dy;
        f.max_y += dy;
        f
    }

    fn to_svg(&self, p: Complex64) -> (f64, f64) {
        let sx = (WIDTH - 2.0 * PAD) / (self.max_x - self.min_x);
        let sy = (HEIGHT - 2.0 * PAD) / (self.max_y - self.min_y);
        let s = sx.min(sy);
        (
            PAD + (p.re - self.min_x) * s,
            HEIGHT - PAD - (p.im - self.min_y) * s,
        )
    }
}

fn polyline(frame: &Frame, points: &[Complex64], color: &str, width: f64, closed: bool) -> String {
    let mut d = String::new();
    for (i, p) in points.iter().enumerate() {
        let (x, y) = frame.to_svg(*p);
        d.push_str(if i == 0 { "M" } else { "L" });
        d.push_str(&format!("{x:.2},{y:.2} "));
    }
    if closed {
        d.push('Z');
    }
    format!("<path d=\"{d}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"{width}\"/>\n")
}

/// Renders the quotient images on the probe circles over the target
/// boundary. One curve per (component, radius); the boundary is black.
pub fn render(
    quotients: &[ComplexSeries],
    radii: &[f64],
    samples: usize,
    target: &ConvexTarget,
) -> String {
    let mut curves: Vec<(Vec<Complex64>, String)> = Vec::new();
    for (qi, q) in quotients.iter().enumerate() {
        for (ri, &r) in radii.iter().enumerate() {
            let pts: Vec<Complex64> = (0..samples)
                .map(|j| q.evaluate(circle_point(r, j, samples)))
                .collect();
            let color = PALETTE[(qi * radii.len() + ri) % PALETTE.len()].to_string();
            curves.push((pts, color));
        }
    }

    let boundary: Vec<Complex64> = match target {
        ConvexTarget::HalfPlane { .. } => Vec::new(),
        ConvexTarget::Sampled { polygon, .. } => polygon.vertices().to_vec(),
    };

    let frame = Frame::from_points(curves.iter().flat_map(|(pts, _)| pts).chain(boundary.iter()));

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" \
         width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");

    // axes through the origin when visible
    if frame.min_x < 0.0 && frame.max_x > 0.0 {
        let (x, _) = frame.to_svg(Complex64::ZERO);
        svg.push_str(&format!(
            "<line x1=\"{x:.2}\" y1=\"{PAD}\" x2=\"{x:.2}\" y2=\"{}\" stroke=\"#cccccc\"/>\n",
            HEIGHT - PAD
        ));
    }
    if frame.min_y < 0.0 && frame.max_y > 0.0 {
        let (_, y) = frame.to_svg(Complex64::ZERO);
        svg.push_str(&format!(
            "<line x1=\"{PAD}\" y1=\"{y:.2}\" x2=\"{}\" y2=\"{y:.2}\" stroke=\"#cccccc\"/>\n",
            WIDTH - PAD
        ));
    }

    match target {
        ConvexTarget::HalfPlane { alpha } => {
            let top = frame.to_svg(Complex64::new(*alpha, frame.max_y));
            let bottom = frame.to_svg(Complex64::new(*alpha, frame.min_y));
            svg.push_str(&format!(
                "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" \
                 stroke=\"black\" stroke-width=\"2\"/>\n",
                top.0, top.1, bottom.0, bottom.1
            ));
            svg.push_str(&format!(
                "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\" fill=\"black\">Re w = {alpha}</text>\n",
                top.0 + 6.0,
                top.1 + 14.0
            ));
        }
        ConvexTarget::Sampled { .. } => {
            svg.push_str(&polyline(&frame, &boundary, "black", 2.0, true));
        }
    }

    for (pts, color) in &curves {
        svg.push_str(&polyline(&frame, pts, color, 1.2, true));
    }

    svg.push_str("</svg>\n");
    svg
}
