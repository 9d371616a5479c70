//! Per-step prediction traces and their CSV / SVG renderings.

use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrendSeries {
    pub label: String,
    /// `(step, value)`, steps strictly increasing.
    pub points: Vec<(u64, i64)>,
}

impl TrendSeries {
    pub fn new(label: impl Into<String>, points: Vec<(u64, i64)>) -> Option<Self> {
        points.windows(2).all(|w| w[0].0 < w[1].0).then(|| Self {
            label: label.into(),
            points,
        })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("step,value\n");
        for (s, v) in &self.points {
            let _ = writeln!(out, "{s},{v}");
        }
        out
    }

    pub fn parse_csv(label: impl Into<String>, text: &str) -> Result<Self, String> {
        let mut lines = text.lines();
        if lines.next().map(str::trim) != Some("step,value") {
            return Err("missing `step,value` header".into());
        }
        let points = lines
            .filter(|l| !l.trim().is_empty())
            .enumerate()
            .map(|(i, l)| {
                let (s, v) = l
                    .split_once(',')
                    .ok_or_else(|| format!("row {}: expected two fields", i + 2))?;
                Ok((
                    s.trim()
                        .parse()
                        .map_err(|e| format!("row {}: {e}", i + 2))?,
                    v.trim()
                        .parse()
                        .map_err(|e| format!("row {}: {e}", i + 2))?,
                ))
            })
            .collect::<Result<Vec<_>, String>>()?;
        Self::new(label, points).ok_or_else(|| "steps are not strictly increasing".into())
    }

    /// A standalone line chart of the series.
    pub fn to_svg(&self) -> String {
        const W: f64 = 640.0;
        const H: f64 = 320.0;
        const PAD: f64 = 40.0;
        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
        );
        let _ = writeln!(out, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
        let _ = writeln!(
            out,
            r#"<text x="{PAD}" y="24" font-family="sans-serif" font-size="14">{}</text>"#,
            escape(&self.label)
        );
        let _ = writeln!(
            out,
            r#"<path d="M{PAD} {PAD} V{} H{}" stroke="black" fill="none"/>"#,
            H - PAD,
            W - PAD
        );
        if let (Some(first), Some(last)) = (self.points.first(), self.points.last()) {
            let (x0, x1) = (first.0 as f64, last.0 as f64);
            let (lo, hi) = self
                .points
                .iter()
                .fold((i64::MAX, i64::MIN), |(lo, hi), p| {
                    (lo.min(p.1), hi.max(p.1))
                });
            let (lo, hi) = (lo as f64, hi as f64);
            let sx = |x: f64| {
                if x1 > x0 {
                    PAD + (x - x0) / (x1 - x0) * (W - 2.0 * PAD)
                } else {
                    W / 2.0
                }
            };
            let sy = |y: f64| {
                if hi > lo {
                    H - PAD - (y - lo) / (hi - lo) * (H - 2.0 * PAD)
                } else {
                    H / 2.0
                }
            };
            let pts: Vec<String> = self
                .points
                .iter()
                .map(|(s, v)| format!("{:.2},{:.2}", sx(*s as f64), sy(*v as f64)))
                .collect();
            let _ = writeln!(
                out,
                r#"<polyline points="{}" stroke="steelblue" stroke-width="1.5" fill="none"/>"#,
                pts.join(" ")
            );
            let _ = writeln!(
                out,
                r#"<text x="4" y="{PAD}" font-family="sans-serif" font-size="10">{hi}</text>"#
            );
            let _ = writeln!(
                out,
                r#"<text x="4" y="{}" font-family="sans-serif" font-size="10">{lo}</text>"#,
                H - PAD
            );
        }
        out.push_str("</svg>\n");
        out
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
