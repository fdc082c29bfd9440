//! Minimal SVG renderings of calibration curves and reliability diagrams.

use std::fmt::Write as _;

use mlip_uq_core::calib::{CalibrationCurve, EvaluationRecord, ReliabilityBin};

const SIZE: f64 = 400.0;
const PAD: f64 = 40.0;

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn x(&self, v: f64) -> f64 {
        PAD + (v - self.x0) / (self.x1 - self.x0) * (SIZE - 2.0 * PAD)
    }

    fn y(&self, v: f64) -> f64 {
        SIZE - PAD - (v - self.y0) / (self.y1 - self.y0) * (SIZE - 2.0 * PAD)
    }
}

fn open(out: &mut String, xlabel: &str, ylabel: &str) {
    let _ = write!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" font-family="sans-serif" font-size="12">
<rect x="{PAD}" y="{PAD}" width="{w}" height="{w}" fill="none" stroke="black"/>
<text x="{cx}" y="{by}" text-anchor="middle">{xlabel}</text>
<text x="12" y="{cx}" text-anchor="middle" transform="rotate(-90 12 {cx})">{ylabel}</text>
"#,
        w = SIZE - 2.0 * PAD,
        cx = SIZE / 2.0,
        by = SIZE - 10.0,
    );
}

pub fn calibration_curve_svg(curve: &CalibrationCurve) -> String {
    let f = Frame {
        x0: 0.0,
        x1: 1.0,
        y0: 0.0,
        y1: 1.0,
    };
    let mut out = String::new();
    open(&mut out, "predicted coverage", "observed coverage");
    let _ = writeln!(
        out,
        r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="grey" stroke-dasharray="4"/>"#,
        f.x(0.0),
        f.y(0.0),
        f.x(1.0),
        f.y(1.0)
    );
    let pts: Vec<String> = curve
        .points
        .iter()
        .map(|(a, o)| format!("{:.2},{:.2}", f.x(*a), f.y(*o)))
        .collect();
    let _ = writeln!(out, r#"<polyline points="{}" fill="none" stroke="steelblue" stroke-width="2"/>"#, pts.join(" "));
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}">area {:.4}</text>"#,
        PAD + 8.0,
        PAD + 16.0,
        curve.miscalibration_area
    );
    out.push_str("</svg>\n");
    out
}

/// Errors against uncertainties, with displayed bins' mean ± std and the
/// ideal `±u` band.
pub fn reliability_svg(records: &[EvaluationRecord], bins: &[ReliabilityBin]) -> String {
    let u_max = bins.iter().map(|b| b.upper).fold(f64::MIN_POSITIVE, f64::max);
    let e_max = records
        .iter()
        .map(|r| r.error.abs())
        .fold(u_max, f64::max)
        .min(4.0 * u_max);
    let f = Frame {
        x0: 0.0,
        x1: u_max,
        y0: -e_max,
        y1: e_max,
    };
    let mut out = String::new();
    open(&mut out, "uncertainty", "error");
    for sign in [1.0, -1.0] {
        let _ = writeln!(
            out,
            r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="grey" stroke-dasharray="4"/>"#,
            f.x(0.0),
            f.y(0.0),
            f.x(u_max),
            f.y(sign * u_max)
        );
    }
    for r in records.iter().filter(|r| r.error.abs() <= e_max) {
        let _ = writeln!(
            out,
            r#"<circle cx="{:.2}" cy="{:.2}" r="1" fill="lightgrey"/>"#,
            f.x(r.uncertainty),
            f.y(r.error)
        );
    }
    for b in bins.iter().filter(|b| !b.suppressed) {
        let x = f.x(b.center);
        let _ = writeln!(
            out,
            r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="firebrick" stroke-width="2"/>"#,
            f.y(b.error_mean - b.error_std),
            f.y(b.error_mean + b.error_std)
        );
        let _ = writeln!(out, r#"<circle cx="{x:.2}" cy="{:.2}" r="3" fill="firebrick"/>"#, f.y(b.error_mean));
    }
    out.push_str("</svg>\n");
    out
}
