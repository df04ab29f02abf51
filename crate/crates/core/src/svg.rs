//! Static SVG bar charts of process matrices.
//!
//! One chart per component (real or imaginary). The 16 entries of χ are drawn
//! as bars grouped by row, on a fixed [−1, 1] axis; heights outside the axis
//! are clipped. Output is a pure function of its inputs.

use std::fmt::Write;

use crate::qmath::ComplexMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Part {
    Real,
    Imaginary,
}

impl Part {
    fn label(self) -> &'static str {
        match self {
            Part::Real => "Re",
            Part::Imaginary => "Im",
        }
    }

    fn fill(self) -> &'static str {
        match self {
            Part::Real => "#c0392b",
            Part::Imaginary => "#2c6fbb",
        }
    }
}

const BASIS_LABELS: [&str; 4] = ["HH", "HV", "VH", "VV"];

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 360.0;
const MARGIN_LEFT: f64 = 56.0;
const MARGIN_RIGHT: f64 = 16.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 56.0;
const GROUP_GAP: f64 = 18.0;
const BAR_GAP: f64 = 4.0;

/// Renders one component of a 4×4 matrix as 16 bars.
pub fn chi_bar_chart(chi: &ComplexMatrix, part: Part, title: &str) -> String {
    assert_eq!((chi.rows(), chi.cols()), (4, 4), "chart expects a 4×4 matrix");
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let zero_y = MARGIN_TOP + plot_h / 2.0;
    let group_w = (plot_w - 3.0 * GROUP_GAP) / 4.0;
    let bar_w = (group_w - 3.0 * BAR_GAP) / 4.0;
    let y_of = |v: f64| zero_y - v * plot_h / 2.0;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="22" text-anchor="middle" font-size="14">{} {}</text>"#,
        WIDTH / 2.0,
        part.label(),
        escape(title)
    );

    // axis and gridlines
    for tick in [-1.0, -0.5, 0.0, 0.5, 1.0] {
        let y = y_of(tick);
        let stroke = if tick == 0.0 { "#333333" } else { "#dddddd" };
        let _ = writeln!(
            s,
            r#"<line x1="{MARGIN_LEFT:.1}" y1="{y:.2}" x2="{:.1}" y2="{y:.2}" stroke="{stroke}" stroke-width="1"/>"#,
            WIDTH - MARGIN_RIGHT
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.2}" text-anchor="end">{tick:.1}</text>"#,
            MARGIN_LEFT - 6.0,
            y + 4.0
        );
    }

    for row in 0..4 {
        let gx = MARGIN_LEFT + row as f64 * (group_w + GROUP_GAP);
        for col in 0..4 {
            let z = chi[(row, col)];
            let v = match part {
                Part::Real => z.re,
                Part::Imaginary => z.im,
            }
            .clamp(-1.0, 1.0);
            let x = gx + col as f64 * (bar_w + BAR_GAP);
            let (top, h) = if v >= 0.0 {
                (y_of(v), zero_y - y_of(v))
            } else {
                (zero_y, y_of(v) - zero_y)
            };
            let _ = writeln!(
                s,
                r#"<rect class="bar" x="{x:.2}" y="{top:.2}" width="{bar_w:.2}" height="{h:.2}" fill="{}"><title>{} {}: {v:.4}</title></rect>"#,
                part.fill(),
                BASIS_LABELS[row],
                BASIS_LABELS[col]
            );
            let _ = writeln!(
                s,
                r#"<text x="{:.2}" y="{:.1}" text-anchor="middle" font-size="8">{}</text>"#,
                x + bar_w / 2.0,
                HEIGHT - MARGIN_BOTTOM + 14.0,
                BASIS_LABELS[col]
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.1}" text-anchor="middle">{}</text>"#,
            gx + group_w / 2.0,
            HEIGHT - MARGIN_BOTTOM + 32.0,
            BASIS_LABELS[row]
        );
    }
    s.push_str("</svg>\n");
    s
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
