use std::f64::consts::FRAC_PI_2;
use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq)]
pub struct PlotPoint {
    pub label: String,
    pub rho_prime: f64,
    pub theta_prime: f64,
}

const SIZE: f64 = 640.0;
const MARGIN: f64 = 70.0;
const RADIUS_PX: f64 = SIZE - 2.0 * MARGIN;
const RINGS: usize = 4;
const SPOKE_DEGREES: usize = 15;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Smallest 1-2-5 step multiple covering `max`.
fn nice_extent(max: f64) -> f64 {
    if !(max > 0.0) || !max.is_finite() {
        return 1.0;
    }
    let mag = 10f64.powf(max.log10().floor());
    [1.0, 2.0, 2.5, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|&v| v >= max)
        .unwrap_or(10.0 * mag)
}

/// Quarter-disk sector plot with words at `(ρ', θ')`. The origin sits at the
/// bottom left; `ρ'` runs outward along the popularity axis and `θ'` sweeps
/// counter-clockwise along the similarity axis. `comments` are emitted as an
/// XML comment block before the root element.
pub fn render_svg(points: &[PlotPoint], title: &str, comments: &[String]) -> String {
    let extent = nice_extent(points.iter().map(|p| p.rho_prime).fold(0.0, f64::max) * 1.05);
    let ox = MARGIN;
    let oy = SIZE - MARGIN;
    let to_xy = |r: f64, t: f64| {
        let px = r / extent * RADIUS_PX;
        (ox + px * t.cos(), oy - px * t.sin())
    };

    let mut s = String::new();
    s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    if !comments.is_empty() {
        s.push_str("<!--\n");
        for c in comments {
            let _ = writeln!(s, "{}", c.replace("--", "- -"));
        }
        s.push_str("-->\n");
    }
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SIZE}\" height=\"{SIZE}\" viewBox=\"0 0 {SIZE} {SIZE}\" font-family=\"sans-serif\">"
    );
    let _ = writeln!(s, "<rect width=\"{SIZE}\" height=\"{SIZE}\" fill=\"white\"/>");
    let _ = writeln!(
        s,
        "<text x=\"{:.1}\" y=\"28\" font-size=\"16\" text-anchor=\"middle\">{}</text>",
        SIZE / 2.0,
        escape(title)
    );

    s.push_str("<g stroke=\"#bbbbbb\" fill=\"none\" stroke-width=\"1\">\n");
    for i in 1..=RINGS {
        let r = extent * i as f64 / RINGS as f64;
        let (x0, y0) = to_xy(r, 0.0);
        let (x1, y1) = to_xy(r, FRAC_PI_2);
        let rp = RADIUS_PX * i as f64 / RINGS as f64;
        let _ = writeln!(s, "<path d=\"M {x0:.2} {y0:.2} A {rp:.2} {rp:.2} 0 0 0 {x1:.2} {y1:.2}\"/>");
    }
    for deg in (0..=90).step_by(SPOKE_DEGREES) {
        let (x1, y1) = to_xy(extent, (deg as f64).to_radians());
        let _ = writeln!(s, "<line x1=\"{ox:.2}\" y1=\"{oy:.2}\" x2=\"{x1:.2}\" y2=\"{y1:.2}\"/>");
    }
    s.push_str("</g>\n");

    s.push_str("<g font-size=\"10\" fill=\"#666666\">\n");
    for i in 0..=RINGS {
        let r = extent * i as f64 / RINGS as f64;
        let (x, y) = to_xy(r, 0.0);
        let _ = writeln!(s, "<text x=\"{x:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{r:.3}</text>", y + 14.0);
    }
    for deg in (0..=90).step_by(SPOKE_DEGREES) {
        let (x, y) = to_xy(extent * 1.04, (deg as f64).to_radians());
        let _ = writeln!(s, "<text x=\"{x:.2}\" y=\"{y:.2}\">{deg}°</text>");
    }
    s.push_str("</g>\n");

    let _ = writeln!(
        s,
        "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"13\" text-anchor=\"middle\">popularity (ρ′)</text>",
        ox + RADIUS_PX / 2.0,
        oy + 36.0
    );
    let (ax, ay) = to_xy(extent * 1.12, std::f64::consts::FRAC_PI_4);
    let _ = writeln!(
        s,
        "<text x=\"{ax:.2}\" y=\"{ay:.2}\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(45 {ax:.2} {ay:.2})\">similarity (θ′)</text>"
    );

    s.push_str("<g font-size=\"12\">\n");
    for p in points {
        let (x, y) = to_xy(p.rho_prime, p.theta_prime);
        let _ = writeln!(s, "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"3.5\" fill=\"#1f4e9c\"/>");
        let _ = writeln!(
            s,
            "<text x=\"{:.2}\" y=\"{:.2}\">{}</text>",
            x + 5.0,
            y - 5.0,
            escape(&p.label)
        );
    }
    s.push_str("</g>\n</svg>\n");
    s
}
