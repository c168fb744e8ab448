//! Minimal SVG rendering of tilted diagrams: one panel per diagram, birth on
//! the horizontal axis and persistence on the vertical axis.

use std::fmt::Write as _;

use pipp_core::PersistenceDiagram;

const PANEL: f64 = 320.0;
const MARGIN: f64 = 48.0;
const TICKS: usize = 5;

fn extent(panels: &[(String, &PersistenceDiagram)]) -> (f64, f64) {
    let mut bx: f64 = 1.0;
    let mut py: f64 = 1.0;
    for (_, d) in panels {
        for p in &d.points {
            bx = bx.max(p.x);
            py = py.max(p.y);
        }
    }
    (bx, py)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Panels share axis limits so side-by-side diagrams are comparable.
pub fn render(panels: &[(String, &PersistenceDiagram)]) -> String {
    let (x_max, y_max) = extent(panels);
    let cell = PANEL + 2.0 * MARGIN;
    let width = cell * panels.len().max(1) as f64;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{cell:.0}" viewBox="0 0 {width:.0} {cell:.0}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for (k, (title, d)) in panels.iter().enumerate() {
        let ox = k as f64 * cell + MARGIN;
        let oy = MARGIN;
        let sx = |x: f64| ox + x / x_max * PANEL;
        let sy = |y: f64| oy + PANEL - y / y_max * PANEL;
        let _ = writeln!(s, r#"<g class="panel">"#);
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="13">{}</text>"#,
            ox + PANEL / 2.0,
            oy - 16.0,
            escape(title)
        );
        // Axes of the wedge.
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="black"/>"#,
            sx(0.0),
            sy(0.0),
            sx(x_max),
            sy(0.0)
        );
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="black"/>"#,
            sx(0.0),
            sy(0.0),
            sx(0.0),
            sy(y_max)
        );
        for t in 0..=TICKS {
            let fx = x_max * t as f64 / TICKS as f64;
            let fy = y_max * t as f64 / TICKS as f64;
            let _ = writeln!(
                s,
                r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{fx:.2}</text>"#,
                sx(fx),
                sy(0.0) + 16.0
            );
            let _ = writeln!(
                s,
                r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{fy:.2}</text>"#,
                sx(0.0) - 6.0,
                sy(fy) + 4.0
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">birth</text>"#,
            ox + PANEL / 2.0,
            oy + PANEL + 34.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" transform="rotate(-90 {:.2} {:.2})">persistence</text>"#,
            ox - 34.0,
            oy + PANEL / 2.0,
            ox - 34.0,
            oy + PANEL / 2.0
        );
        for p in &d.points {
            let _ = writeln!(
                s,
                r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="steelblue" fill-opacity="0.8"/>"#,
                sx(p.x),
                sy(p.y)
            );
        }
        let _ = writeln!(s, "</g>");
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use pipp_core::Point;

    #[test]
    fn empty_diagram_has_axes_only() {
        let d = PersistenceDiagram::default();
        let svg = render(&[("empty".into(), &d)]);
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<line").count(), 2);
        assert_eq!(svg.matches("<circle").count(), 0);
    }

    #[test]
    fn one_circle_per_point_and_panel_layout() {
        let a =
            PersistenceDiagram::new(vec![Point::new(0.2, 0.5), Point::new(0.1, 0.05)], 1).unwrap();
        let b = PersistenceDiagram::new(vec![Point::new(1.5, 2.0)], 1).unwrap();
        let svg = render(&[("a".into(), &a), ("b".into(), &b)]);
        assert_eq!(svg.matches("<circle").count(), 3);
        assert_eq!(svg.matches(r#"<g class="panel">"#).count(), 2);
        assert!(svg.contains(r#"width="832""#));
    }

    #[test]
    fn titles_are_escaped() {
        let d = PersistenceDiagram::default();
        assert!(render(&[("a<b".into(), &d)]).contains("a&lt;b"));
    }
}
