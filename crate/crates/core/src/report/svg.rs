use std::fmt::Write as _;

use super::{FigureRow, ReportError, TARGET_POWER};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 64.0;
const RIGHT: f64 = 168.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 52.0;
const PALETTE: [&str; 8] = [
    "#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02", "#a6761d", "#666666",
];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

struct Axes {
    x_min: f64,
    x_max: f64,
}

impl Axes {
    fn x(&self, v: f64) -> f64 {
        LEFT + (v - self.x_min) / (self.x_max - self.x_min) * (WIDTH - LEFT - RIGHT)
    }

    fn y(&self, power: f64) -> f64 {
        TOP + (1.0 - power) * (HEIGHT - TOP - BOTTOM)
    }
}

/// Self-contained SVG line chart of one panel's rows.
pub fn render_chart(rows: &[FigureRow]) -> Result<String, ReportError> {
    let first = rows.first().ok_or(ReportError::EmptyData)?;
    let mut series: Vec<(&str, Vec<(f64, f64)>)> = Vec::new();
    for r in rows {
        match series.iter_mut().find(|(s, _)| *s == r.series) {
            Some((_, pts)) => pts.push((r.n, r.power)),
            None => series.push((&r.series, vec![(r.n, r.power)])),
        }
    }
    for (_, pts) in &mut series {
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    }
    let mut xs: Vec<f64> = rows.iter().map(|r| r.n).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let (mut x_min, mut x_max) = (xs[0], xs[xs.len() - 1]);
    if x_min == x_max {
        x_min -= 1.0;
        x_max += 1.0;
    }
    let ax = Axes { x_min, x_max };
    let x_label = if first.figure == 7 { "a" } else { "n" };

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="14">Figure {} {}</text>"#,
        (LEFT + WIDTH - RIGHT) / 2.0,
        first.figure,
        escape(&first.panel)
    );
    let (x0, x1, y0, y1) = (LEFT, WIDTH - RIGHT, ax.y(0.0), ax.y(1.0));
    let _ = writeln!(s, r#"<line class="axis" x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>"#);
    let _ = writeln!(s, r#"<line class="axis" x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>"#);

    let stride = xs.len().div_ceil(10);
    for &v in xs.iter().step_by(stride) {
        let x = ax.x(v);
        let _ = writeln!(s, r#"<line class="xtick" x1="{x:.2}" y1="{y0}" x2="{x:.2}" y2="{}" stroke="black"/>"#, y0 + 5.0);
        let _ = writeln!(s, r#"<text x="{x:.2}" y="{}" text-anchor="middle">{v}</text>"#, y0 + 18.0);
    }
    for k in 0..=5 {
        let p = f64::from(k) / 5.0;
        let y = ax.y(p);
        let _ = writeln!(s, r#"<line class="ytick" x1="{}" y1="{y:.2}" x2="{x0}" y2="{y:.2}" stroke="black"/>"#, x0 - 5.0);
        let _ = writeln!(s, r#"<text x="{}" y="{:.2}" text-anchor="end">{p:.1}</text>"#, x0 - 8.0, y + 4.0);
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{x_label}</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 12.0
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{0}" text-anchor="middle" transform="rotate(-90 16 {0})">power</text>"#,
        (y0 + y1) / 2.0
    );

    let yr = ax.y(TARGET_POWER);
    let _ = writeln!(
        s,
        r##"<line class="reference" x1="{x0}" y1="{yr:.2}" x2="{x1}" y2="{yr:.2}" stroke="#444444" stroke-dasharray="6 4"/>"##
    );

    for (i, (name, pts)) in series.iter().enumerate() {
        let colour = PALETTE[i % PALETTE.len()];
        let coords: Vec<String> = pts.iter().map(|&(x, p)| format!("{:.2},{:.2}", ax.x(x), ax.y(p))).collect();
        let _ = writeln!(
            s,
            r#"<polyline class="series" fill="none" stroke="{colour}" stroke-width="2" points="{}"/>"#,
            coords.join(" ")
        );
        let ly = TOP + 16.0 * i as f64;
        let lx = x1 + 16.0;
        let _ = writeln!(s, r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{colour}" stroke-width="2"/>"#, lx + 20.0);
        let _ = writeln!(s, r#"<text x="{}" y="{}">{}</text>"#, lx + 26.0, ly + 4.0, escape(name));
    }
    s.push_str("</svg>\n");
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn panel(series: usize, sizes: &[usize]) -> Vec<FigureRow> {
        let mut rows = Vec::new();
        for k in 0..series {
            for &n in sizes {
                rows.push(FigureRow {
                    figure: 2,
                    panel: "a0.5".into(),
                    series: format!("b={}", k as f64 / 10.0),
                    n: n as f64,
                    power: (n as f64 / 200.0 * k as f64 / 5.0).min(1.0),
                });
            }
        }
        rows
    }

    fn attr(tag: &str, name: &str) -> f64 {
        let start = tag.find(&format!(" {name}=\"")).unwrap() + name.len() + 3;
        let end = start + tag[start..].find('"').unwrap();
        tag[start..end].parse().unwrap()
    }

    #[test]
    fn six_series_and_one_reference() {
        let sizes: Vec<usize> = (1..=20).map(|k| 10 * k).collect();
        let svg = render_chart(&panel(6, &sizes)).unwrap();
        assert!(svg.starts_with("<svg xmlns=\"http://www.w3.org/2000/svg\""));
        assert_eq!(svg.matches("<polyline").count(), 6);
        assert_eq!(svg.matches("stroke-dasharray").count(), 1);
        assert!(!svg.contains("href"));
    }

    #[test]
    fn reference_line_sits_at_target_power() {
        let svg = render_chart(&panel(2, &[10, 20, 30])).unwrap();
        let reference = svg.lines().find(|l| l.contains("class=\"reference\"")).unwrap();
        let y_ref = attr(reference, "y1");
        // The 0.8 tick label is drawn 4 px below its tick.
        let label = svg.lines().find(|l| l.ends_with(">0.8</text>")).unwrap();
        assert!((attr(label, "y") - 4.0 - y_ref).abs() < 1e-9);
        let ticks: Vec<f64> = svg.lines().filter(|l| l.contains("class=\"ytick\"")).map(|l| attr(l, "y1")).collect();
        let (y0, y1) = (ticks[0], ticks[5]);
        assert!(((y0 - y_ref) / (y0 - y1) - 0.8).abs() < 1e-3);
    }

    #[test]
    fn empty_is_an_error() {
        assert!(matches!(render_chart(&[]), Err(ReportError::EmptyData)));
    }

    #[test]
    fn byte_reproducible() {
        let rows = panel(3, &[10, 20]);
        assert_eq!(render_chart(&rows).unwrap(), render_chart(&rows).unwrap());
    }
}
