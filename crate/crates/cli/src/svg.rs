//! Minimal deterministic SVG line plots; no display or font dependencies
//! beyond generic `sans-serif`.

use std::fmt::Write as _;

use bubblelab_core::rate::RateReport;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN_L: f64 = 76.0;
const MARGIN_R: f64 = 22.0;
const MARGIN_T: f64 = 46.0;
const MARGIN_B: f64 = 58.0;

pub struct Series {
    pub label: String,
    pub color: &'static str,
    pub dashed: bool,
    pub points: Vec<(f64, f64)>,
}

pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    if (1e-3..1e5).contains(&a) {
        let s = format!("{v:.4}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        format!("{v:.2e}")
    }
}

fn padded_range(mut lo: f64, mut hi: f64) -> (f64, f64) {
    if !(lo.is_finite() && hi.is_finite()) {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-300 {
        lo -= 1.0;
        hi += 1.0;
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

impl Plot {
    pub fn render(&self) -> String {
        let finite = |p: &&(f64, f64)| p.0.is_finite() && p.1.is_finite();
        let mut xlo = f64::INFINITY;
        let mut xhi = f64::NEG_INFINITY;
        let mut ylo = f64::INFINITY;
        let mut yhi = f64::NEG_INFINITY;
        for s in &self.series {
            for p in s.points.iter().filter(finite) {
                xlo = xlo.min(p.0);
                xhi = xhi.max(p.0);
                ylo = ylo.min(p.1);
                yhi = yhi.max(p.1);
            }
        }
        let (xlo, xhi) = padded_range(xlo, xhi);
        let (ylo, yhi) = padded_range(ylo, yhi);
        let px = |x: f64| MARGIN_L + (x - xlo) / (xhi - xlo) * (WIDTH - MARGIN_L - MARGIN_R);
        let py = |y: f64| HEIGHT - MARGIN_B - (y - ylo) / (yhi - ylo) * (HEIGHT - MARGIN_T - MARGIN_B);

        let mut out = String::new();
        let _ = writeln!(
            out,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
             viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\" font-size=\"13\">"
        );
        let _ = writeln!(out, "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>");

        // axis ticks, grid lines and labels
        for k in 0..5 {
            let fx = xlo + (xhi - xlo) * k as f64 / 4.0;
            let fy = ylo + (yhi - ylo) * k as f64 / 4.0;
            let gx = px(fx);
            let gy = py(fy);
            let _ = writeln!(
                out,
                "<line x1=\"{gx:.2}\" y1=\"{:.2}\" x2=\"{gx:.2}\" y2=\"{:.2}\" \
                 stroke=\"#dddddd\" stroke-width=\"1\"/>",
                py(ylo),
                py(yhi)
            );
            let _ = writeln!(
                out,
                "<line x1=\"{:.2}\" y1=\"{gy:.2}\" x2=\"{:.2}\" y2=\"{gy:.2}\" \
                 stroke=\"#dddddd\" stroke-width=\"1\"/>",
                px(xlo),
                px(xhi)
            );
            let _ = writeln!(
                out,
                "<text x=\"{gx:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>",
                HEIGHT - MARGIN_B + 18.0,
                escape(&tick_label(fx))
            );
            let _ = writeln!(
                out,
                "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">{}</text>",
                MARGIN_L - 8.0,
                gy + 4.0,
                escape(&tick_label(fy))
            );
        }
        let _ = writeln!(
            out,
            "<rect x=\"{MARGIN_L}\" y=\"{MARGIN_T}\" width=\"{:.2}\" height=\"{:.2}\" \
             fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"/>",
            WIDTH - MARGIN_L - MARGIN_R,
            HEIGHT - MARGIN_T - MARGIN_B
        );

        for s in &self.series {
            let pts: Vec<String> = s
                .points
                .iter()
                .filter(finite)
                .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
                .collect();
            if pts.is_empty() {
                continue;
            }
            let dash = if s.dashed { " stroke-dasharray=\"6 4\"" } else { "" };
            let _ = writeln!(
                out,
                "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.6\"{dash}/>",
                pts.join(" "),
                s.color
            );
        }

        // legend, top-right inside the frame
        for (k, s) in self.series.iter().enumerate() {
            let ly = MARGIN_T + 16.0 + 18.0 * k as f64;
            let lx = WIDTH - MARGIN_R - 220.0;
            let dash = if s.dashed { " stroke-dasharray=\"6 4\"" } else { "" };
            let _ = writeln!(
                out,
                "<line x1=\"{lx:.2}\" y1=\"{ly:.2}\" x2=\"{:.2}\" y2=\"{ly:.2}\" \
                 stroke=\"{}\" stroke-width=\"1.6\"{dash}/>",
                lx + 26.0,
                s.color
            );
            let _ = writeln!(
                out,
                "<text x=\"{:.2}\" y=\"{:.2}\">{}</text>",
                lx + 32.0,
                ly + 4.0,
                escape(&s.label)
            );
        }

        let _ = writeln!(
            out,
            "<text x=\"{:.2}\" y=\"26\" text-anchor=\"middle\" font-size=\"16\">{}</text>",
            WIDTH / 2.0,
            escape(&self.title)
        );
        let _ = writeln!(
            out,
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>",
            MARGIN_L + (WIDTH - MARGIN_L - MARGIN_R) / 2.0,
            HEIGHT - 14.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            out,
            "<text x=\"20\" y=\"{:.2}\" text-anchor=\"middle\" \
             transform=\"rotate(-90 20 {:.2})\">{}</text>",
            HEIGHT / 2.0,
            HEIGHT / 2.0,
            escape(&self.y_label)
        );
        out.push_str("</svg>\n");
        out
    }
}

/// `log₁₀ I[w(s)]` against `s`, with the fitted decay line over the window.
pub fn decay_plot(report: &RateReport) -> Plot {
    let points: Vec<(f64, f64)> =
        report.fits.iter().filter(|f| f.i > 0.0).map(|f| (f.s, f.i.log10())).collect();
    let (a, b) = report.fit_window;
    let mut series = vec![Series {
        label: "log10 I".into(),
        color: "#1f6fb2",
        dashed: false,
        points,
    }];
    // anchor the fitted line at the first in-window sample
    if let Some(f0) = report.fits.iter().find(|f| f.s >= a - 1e-12 && f.i > 0.0) {
        let y0 = f0.i.log10();
        let slope = -report.kappa_fit / std::f64::consts::LN_10;
        series.push(Series {
            label: format!("fit, rate {:.4}", report.kappa_fit),
            color: "#d1495b",
            dashed: true,
            points: vec![(f0.s, y0), (b, y0 + slope * (b - f0.s))],
        });
    }
    Plot {
        title: "Energy-gap decay".into(),
        x_label: "s".into(),
        y_label: "log10 I".into(),
        series,
    }
}

/// The ratio `I/‖∇ρ‖²` over the fit window with the measured band edges.
pub fn ratio_plot(report: &RateReport) -> Plot {
    let (a, b) = report.fit_window;
    let points: Vec<(f64, f64)> = report
        .fits
        .iter()
        .filter(|f| f.s >= a - 1e-12 && f.s <= b + 1e-12 && f.i > 0.0 && f.rho_h1 > 0.0)
        .map(|f| (f.s, f.i / (f.rho_h1 * f.rho_h1)))
        .collect();
    let (lo, hi) = report.ratio_band;
    let series = vec![
        Series { label: "I / |grad rho|^2".into(), color: "#1f6fb2", dashed: false, points },
        Series {
            label: format!("band low {lo:.4}"),
            color: "#7a7a7a",
            dashed: true,
            points: vec![(a, lo), (b, lo)],
        },
        Series {
            label: format!("band high {hi:.4}"),
            color: "#7a7a7a",
            dashed: true,
            points: vec![(a, hi), (b, hi)],
        },
    ];
    Plot {
        title: "Energy gap against squared remainder".into(),
        x_label: "s".into(),
        y_label: "I / |grad rho|^2".into(),
        series,
    }
}
