//! A tiny SVG 1.1 writer: axes, points, lines and bars.

use std::fmt::Write as _;

pub struct Svg {
    width: f64,
    height: f64,
    body: String,
}

impl Svg {
    pub fn new(width: f64, height: f64) -> Self {
        Self {
            width,
            height,
            body: String::new(),
        }
    }

    pub fn raw(&mut self, element: &str) {
        self.body.push_str(element);
        self.body.push('\n');
    }

    pub fn line(&mut self, (x1, y1): (f64, f64), (x2, y2): (f64, f64), style: &str) {
        let _ = writeln!(
            self.body,
            r#"<line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" {style}/>"#
        );
    }

    pub fn circle(&mut self, (cx, cy): (f64, f64), r: f64, style: &str) {
        let _ = writeln!(self.body, r#"<circle cx="{cx:.2}" cy="{cy:.2}" r="{r}" {style}/>"#);
    }

    pub fn rect(&mut self, x: f64, y: f64, w: f64, h: f64, style: &str) {
        let _ = writeln!(
            self.body,
            r#"<rect x="{x:.2}" y="{y:.2}" width="{w:.2}" height="{h:.2}" {style}/>"#
        );
    }

    pub fn polyline(&mut self, points: &[(f64, f64)], style: &str) {
        let pts: Vec<String> = points.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
        let _ = writeln!(
            self.body,
            r#"<polyline points="{}" fill="none" {style}/>"#,
            pts.join(" ")
        );
    }

    pub fn text(&mut self, (x, y): (f64, f64), anchor: &str, size: f64, content: &str) {
        let _ = writeln!(
            self.body,
            r#"<text x="{x:.2}" y="{y:.2}" text-anchor="{anchor}" font-family="sans-serif" font-size="{size}">{}</text>"#,
            escape(content)
        );
    }

    pub fn finish(self) -> String {
        format!(
            "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{}</svg>\n",
            self.body,
            w = self.width,
            h = self.height
        )
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Maps data coordinates into a pixel rectangle.
#[derive(Debug, Clone, Copy)]
pub struct Panel {
    pub left: f64,
    pub top: f64,
    pub width: f64,
    pub height: f64,
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
}

impl Panel {
    pub fn map(&self, x: f64, y: f64) -> (f64, f64) {
        let fx = (x - self.x_range.0) / (self.x_range.1 - self.x_range.0);
        let fy = (y - self.y_range.0) / (self.y_range.1 - self.y_range.0);
        (self.left + fx * self.width, self.top + (1.0 - fy) * self.height)
    }

    pub fn clip_id(&self, name: &str, svg: &mut Svg) -> String {
        let id = format!("clip-{name}");
        svg.raw(&format!(
            r#"<clipPath id="{id}"><rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}"/></clipPath>"#,
            self.left, self.top, self.width, self.height
        ));
        id
    }

    pub fn axes(&self, svg: &mut Svg, x_label: &str, y_label: &str, ticks: usize) {
        svg.rect(
            self.left,
            self.top,
            self.width,
            self.height,
            r#"fill="none" stroke="black""#,
        );
        for i in 0..=ticks {
            let t = i as f64 / ticks as f64;
            let xv = self.x_range.0 + t * (self.x_range.1 - self.x_range.0);
            let yv = self.y_range.0 + t * (self.y_range.1 - self.y_range.0);
            let (px, _) = self.map(xv, self.y_range.0);
            let (_, py) = self.map(self.x_range.0, yv);
            let bottom = self.top + self.height;
            svg.line((px, bottom), (px, bottom + 4.0), r#"stroke="black""#);
            svg.text((px, bottom + 16.0), "middle", 10.0, &tick_label(xv));
            svg.line((self.left - 4.0, py), (self.left, py), r#"stroke="black""#);
            svg.text((self.left - 6.0, py + 3.0), "end", 10.0, &tick_label(yv));
        }
        svg.text(
            (self.left + self.width / 2.0, self.top + self.height + 32.0),
            "middle",
            12.0,
            x_label,
        );
        let (lx, ly) = (self.left - 38.0, self.top + self.height / 2.0);
        svg.raw(&format!(
            r#"<text x="{lx:.2}" y="{ly:.2}" text-anchor="middle" font-family="sans-serif" font-size="12" transform="rotate(-90 {lx:.2} {ly:.2})">{}</text>"#,
            escape(y_label)
        ));
    }
}

fn tick_label(v: f64) -> String {
    let s = format!("{v:.2}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

/// Padded `(min, max)` of `values`.
pub fn range(values: impl Iterator<Item = f64>, pad: f64) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        return (-1.0, 1.0);
    }
    let span = (hi - lo).max(1e-9);
    (lo - pad * span, hi + pad * span)
}
