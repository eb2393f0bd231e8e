use std::fmt::Write;

pub const BRANCH_COLORS: [&str; 3] = ["#1b9e77", "#d95f02", "#7570b3"];
const DISCRIMINANT_COLOR: &str = "#000000";

/// Static SVG with the view box mapped from `[xmin, xmax, ymin, ymax]`
/// (y axis pointing up).
pub struct Svg {
    window: [f64; 4],
    body: String,
}

impl Svg {
    pub fn new(window: [f64; 4]) -> Self {
        Svg { window, body: String::new() }
    }

    fn stroke_width(&self) -> f64 {
        0.003 * (self.window[1] - self.window[0]).max(self.window[3] - self.window[2])
    }

    fn polyline(&mut self, pts: &[[f64; 2]], color: &str, dashed: bool, class: &str) {
        if pts.len() < 2 {
            return;
        }
        let mut d = String::new();
        for p in pts {
            let _ = write!(d, "{:.6},{:.6} ", p[0], -p[1]);
        }
        let w = self.stroke_width();
        let dash = if dashed { format!(" stroke-dasharray=\"{:.6} {:.6}\"", 4.0 * w, 2.0 * w) } else { String::new() };
        let _ = writeln!(
            self.body,
            "  <polyline class=\"{class}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"{w:.6}\"{dash} points=\"{}\"/>",
            d.trim_end()
        );
    }

    pub fn leaf(&mut self, pts: &[[f64; 2]], branch: usize) {
        self.polyline(pts, BRANCH_COLORS[branch % 3], false, &format!("leaf branch{branch}"));
    }

    pub fn discriminant(&mut self, pts: &[[f64; 2]]) {
        self.polyline(pts, DISCRIMINANT_COLOR, true, "discriminant");
    }

    pub fn render(&self) -> String {
        let [x0, x1, y0, y1] = self.window;
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{:.6} {:.6} {:.6} {:.6}\">\n  <rect x=\"{:.6}\" y=\"{:.6}\" width=\"{:.6}\" height=\"{:.6}\" fill=\"white\"/>\n{}</svg>\n",
            x0,
            -y1,
            x1 - x0,
            y1 - y0,
            x0,
            -y1,
            x1 - x0,
            y1 - y0,
            self.body
        )
    }
}
