//! Figures for the toy attack: training scatter with fitted boundaries and
//! histograms of the detector statistic.

use backdoor_core::adversary::{projection, LinearClassifier, ToyConfig, ToyRun};

use crate::svg::{range, Panel, Svg};

const CLEAN: &str = "#1f77b4";
const BACKDOORED: &str = "#d62728";
const BINS: usize = 20;

pub fn toy_figure(run: &ToyRun, config: &ToyConfig) -> String {
    let mut svg = Svg::new(960.0, 420.0);
    scatter(&mut svg, run, config);
    histogram(&mut svg, run, config);
    svg.finish()
}

fn scatter(svg: &mut Svg, run: &ToyRun, config: &ToyConfig) {
    let xs = run.poisoned.iter().map(|s| s.z[0]);
    let ys = run.poisoned.iter().map(|s| s.z[1]);
    let (lo_x, hi_x) = range(xs, 0.08);
    let (lo_y, hi_y) = range(ys, 0.08);
    let lo = lo_x.min(lo_y);
    let hi = hi_x.max(hi_y);
    let panel = Panel {
        left: 60.0,
        top: 40.0,
        width: 340.0,
        height: 340.0,
        x_range: (lo, hi),
        y_range: (lo, hi),
    };
    let clip = panel.clip_id("scatter", svg);
    panel.axes(svg, "z1", "z2", 5);
    svg.text(
        (panel.left + panel.width / 2.0, 24.0),
        "middle",
        14.0,
        "Training data and decision boundaries",
    );

    svg.raw(&format!(r#"<g clip-path="url(#{clip})">"#));
    for (clean, seen) in run.clean.iter().zip(&run.poisoned) {
        let color = if clean.y == seen.y { CLEAN } else { BACKDOORED };
        let fill = if seen.y > 0 { color } else { "none" };
        svg.circle(
            panel.map(seen.z[0], seen.z[1]),
            3.0,
            &format!(r#"fill="{fill}" stroke="{color}""#),
        );
    }
    if config.dims() == 2 {
        boundary(
            svg,
            &panel,
            &run.clean_classifier,
            r#"stroke="gray" stroke-width="1.5" stroke-dasharray="6,4""#,
        );
        boundary(
            svg,
            &panel,
            &run.classifier,
            &format!(r#"stroke="{BACKDOORED}" stroke-width="1.5""#),
        );
        let d = config.delta();
        svg.line(
            panel.map(0.0, 0.0),
            panel.map(d[0], d[1]),
            r#"stroke="black" stroke-width="2""#,
        );
    }
    svg.raw("</g>");

    let lx = panel.left + 8.0;
    let mut ly = panel.top + 14.0;
    for (label, style) in [
        ("clean (filled: y = +1)", format!(r#"fill="{CLEAN}" stroke="{CLEAN}""#)),
        ("backdoored", format!(r#"fill="{BACKDOORED}" stroke="{BACKDOORED}""#)),
    ] {
        svg.circle((lx, ly - 3.0), 3.0, &style);
        svg.text((lx + 8.0, ly), "start", 10.0, label);
        ly += 14.0;
    }
    if config.dims() == 2 {
        svg.text(
            (lx, ly),
            "start",
            10.0,
            "dashed: clean fit, red: poisoned fit, black: delta",
        );
    }
}

fn boundary(svg: &mut Svg, panel: &Panel, clf: &LinearClassifier, style: &str) {
    let (w1, w2, b) = (clf.weights[0], clf.weights[1], clf.bias);
    let (lo, hi) = panel.x_range;
    let points = if w2.abs() > 1e-12 {
        [(lo, -(w1 * lo + b) / w2), (hi, -(w1 * hi + b) / w2)]
    } else if w1.abs() > 1e-12 {
        let x = -b / w1;
        [(x, panel.y_range.0), (x, panel.y_range.1)]
    } else {
        return;
    };
    svg.line(
        panel.map(points[0].0, points[0].1),
        panel.map(points[1].0, points[1].1),
        style,
    );
}

fn bin_counts(values: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    let mut counts = [0.0; BINS];
    let width = (hi - lo) / BINS as f64;
    for &v in values {
        let i = (((v - lo) / width).floor().max(0.0) as usize).min(BINS - 1);
        counts[i] += 1.0;
    }
    let scale = 1.0 / (values.len() as f64 * width);
    counts.iter().map(|c| c * scale).collect()
}

fn histogram(svg: &mut Svg, run: &ToyRun, config: &ToyConfig) {
    let clean: Vec<f64> = run.clean.iter().map(|s| projection(s, config)).collect();
    let poisoned: Vec<f64> = run.poisoned.iter().map(|s| projection(s, config)).collect();
    let (lo, hi) = range(clean.iter().chain(&poisoned).copied(), 0.05);
    let hc = bin_counts(&clean, lo, hi);
    let hp = bin_counts(&poisoned, lo, hi);
    let (mu, sigma) = (config.mu(), config.sigma());
    let density =
        |x: f64| (-(x - mu).powi(2) / (2.0 * sigma * sigma)).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt());
    let top = hc.iter().chain(&hp).copied().fold(density(mu), f64::max) * 1.1;
    let panel = Panel {
        left: 560.0,
        top: 40.0,
        width: 360.0,
        height: 340.0,
        x_range: (lo, hi),
        y_range: (0.0, top),
    };
    panel.axes(svg, "f(x) = v . (y z)", "density", 5);
    svg.text(
        (panel.left + panel.width / 2.0, 24.0),
        "middle",
        14.0,
        "Detector statistic",
    );

    let width = (hi - lo) / BINS as f64;
    for (counts, color) in [(&hc, CLEAN), (&hp, BACKDOORED)] {
        for (i, &h) in counts.iter().enumerate() {
            let (x0, y0) = panel.map(lo + i as f64 * width, h);
            let (x1, y1) = panel.map(lo + (i + 1) as f64 * width, 0.0);
            svg.rect(
                x0,
                y0,
                x1 - x0,
                y1 - y0,
                &format!(r#"fill="{color}" fill-opacity="0.35" stroke="{color}""#),
            );
        }
    }
    let curve: Vec<(f64, f64)> = (0..=120)
        .map(|i| {
            let x = lo + (hi - lo) * i as f64 / 120.0;
            panel.map(x, density(x))
        })
        .collect();
    svg.polyline(&curve, r#"stroke="black" stroke-width="1.5""#);

    let lx = panel.left + 8.0;
    let mut ly = panel.top + 14.0;
    for (label, color) in [("clean training set", CLEAN), ("poisoned training set", BACKDOORED)] {
        svg.rect(
            lx,
            ly - 8.0,
            10.0,
            8.0,
            &format!(r#"fill="{color}" fill-opacity="0.35" stroke="{color}""#),
        );
        svg.text((lx + 14.0, ly), "start", 10.0, label);
        ly += 14.0;
    }
    svg.text((lx, ly), "start", 10.0, &format!("curve: N({mu:.3}, {sigma}^2)"));
    svg.text(
        (lx, ly + 14.0),
        "start",
        10.0,
        &format!("KS p-value (poisoned): {:.4}", run.report.p_value),
    );
}
