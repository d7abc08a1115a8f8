use std::fmt::Write;

use crate::curvature::{CurvatureProfile, Method};

const WIDTH: f64 = 640.0;
const PANEL: f64 = 180.0;
const PAD: f64 = 48.0;

/// One panel per `C_k` against `log10 ε`, cubical rows solid and Steiner rows dashed.
pub fn profile_svg(profile: &CurvatureProfile) -> String {
    let d = profile.d;
    let height = (d + 1) as f64 * (PANEL + PAD) + PAD;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" font-family="sans-serif" font-size="11">"#
    );
    let xs: Vec<f64> = profile.rows.iter().map(|r| r.eps.log10()).collect();
    let (x0, x1) = bounds(&xs);
    for k in 0..=d {
        let top = PAD + k as f64 * (PANEL + PAD);
        let ys: Vec<f64> = profile.rows.iter().map(|r| r.c[k]).filter(|v| v.is_finite()).collect();
        let (y0, y1) = bounds(&ys);
        let _ = writeln!(
            s,
            r##"<rect x="{PAD}" y="{top}" width="{}" height="{PANEL}" fill="none" stroke="#888"/>"##,
            WIDTH - 2.0 * PAD
        );
        let _ = writeln!(s, r#"<text x="{PAD}" y="{}">C{k}  [{y0:.4}, {y1:.4}]</text>"#, top - 6.0);
        for (method, dash) in [(Method::Cubical, ""), (Method::Steiner, r#" stroke-dasharray="4 3""#)] {
            let pts: Vec<String> = profile
                .series(method)
                .iter()
                .filter(|r| r.c[k].is_finite())
                .map(|r| {
                    let x = PAD + (r.eps.log10() - x0) / (x1 - x0) * (WIDTH - 2.0 * PAD);
                    let y = top + PANEL - (r.c[k] - y0) / (y1 - y0) * PANEL;
                    format!("{x:.2},{y:.2}")
                })
                .collect();
            if pts.len() > 1 {
                let _ = writeln!(
                    s,
                    r##"<polyline points="{}" fill="none" stroke="#1f5fa8"{dash}/>"##,
                    pts.join(" ")
                );
            }
        }
    }
    let _ = writeln!(
        s,
        r#"<text x="{PAD}" y="{}">log10 ε from {x0:.3} to {x1:.3}</text>"#,
        height - 12.0
    );
    s.push_str("</svg>\n");
    s
}

fn bounds(v: &[f64]) -> (f64, f64) {
    let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !lo.is_finite() || !hi.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 {
        return (lo - 0.5, hi + 0.5);
    }
    (lo, hi)
}
