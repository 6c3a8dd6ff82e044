//! Pitch-offset plots of a schedule, as SVG or terminal text.
//!
//! Time runs along x in units of predicted phone duration (the sum of
//! duration factors), pitch offset along y.

use std::fmt::Write;

use crate::schedule::ProsodySchedule;

/// One encoder copy on the time axis.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackSegment {
    pub symbol: String,
    pub start: f64,
    pub end: f64,
    pub pitch: f64,
    pub energy: f64,
}

/// Copies laid end to end. Pauses are included.
pub fn pitch_track(schedule: &ProsodySchedule) -> Vec<TrackSegment> {
    let mut t = 0.0;
    let mut out = Vec::new();
    for e in &schedule.entries {
        for k in 0..e.repeat {
            let d = e.duration_scale[k];
            out.push(TrackSegment {
                symbol: e.symbol.clone(),
                start: t,
                end: t + d,
                pitch: e.pitch_offset[k],
                energy: e.energy_offset[k],
            });
            t += d;
        }
    }
    out
}

fn pitch_range(track: &[TrackSegment]) -> (f64, f64) {
    let lo = track.iter().map(|s| s.pitch).fold(-2.0_f64, f64::min);
    let hi = track.iter().map(|s| s.pitch).fold(2.0_f64, f64::max);
    (lo, hi)
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn render_svg(schedule: &ProsodySchedule, width: u32, height: u32) -> String {
    let track = pitch_track(schedule);
    let (lo, hi) = pitch_range(&track);
    let total = track.last().map_or(1.0, |s| s.end).max(f64::EPSILON);
    let (w, h) = (f64::from(width), f64::from(height));
    let margin = 24.0;
    let x = |t: f64| margin + (w - 2.0 * margin) * t / total;
    let y = |p: f64| margin + (h - 2.0 * margin) * (hi - p) / (hi - lo);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    let _ = writeln!(svg, r#"<title>{}</title>"#, escape(&schedule.source_text));
    let _ = writeln!(
        svg,
        r##"<line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="#bbb" stroke-dasharray="4 3"/>"##,
        x(0.0),
        y(0.0),
        x(total),
        y(0.0)
    );
    let mut points = Vec::new();
    for s in &track {
        if s.symbol == "," {
            let _ = writeln!(
                svg,
                r##"<rect x="{:.1}" y="{margin:.1}" width="{:.1}" height="{:.1}" fill="#eee"/>"##,
                x(s.start),
                x(s.end) - x(s.start),
                h - 2.0 * margin
            );
            continue;
        }
        points.push(format!("{:.1},{:.1}", x(s.start), y(s.pitch)));
        points.push(format!("{:.1},{:.1}", x(s.end), y(s.pitch)));
    }
    let _ = writeln!(
        svg,
        r##"<polyline fill="none" stroke="#1f5fa8" stroke-width="2" points="{}"/>"##,
        points.join(" ")
    );
    let mut t = 0.0;
    for e in &schedule.entries {
        let d: f64 = e.duration_scale.iter().sum();
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" font-size="10" text-anchor="middle">{}</text>"#,
            x(t + d / 2.0),
            h - 6.0,
            escape(&e.symbol)
        );
        t += d;
    }
    svg.push_str("</svg>\n");
    svg
}

/// Text plot, one row per half pitch unit, `columns` wide. Pauses show as
/// `,` on the zero line.
pub fn render_ascii(schedule: &ProsodySchedule, columns: usize) -> String {
    let track = pitch_track(schedule);
    let columns = columns.max(8);
    let (lo, hi) = pitch_range(&track);
    let rows = ((hi - lo) * 2.0).round() as usize + 1;
    let total = track.last().map_or(0.0, |s| s.end);
    let row_of = |p: f64| ((hi - p) * 2.0).round().clamp(0.0, (rows - 1) as f64) as usize;
    let mut grid = vec![vec![' '; columns]; rows];
    if total > 0.0 {
        for (c, cell) in (0..columns).map(|c| (c, (c as f64 + 0.5) / columns as f64 * total)) {
            if let Some(s) = track.iter().find(|s| cell >= s.start && cell < s.end) {
                if s.symbol == "," {
                    grid[row_of(0.0)][c] = ',';
                } else {
                    grid[row_of(s.pitch)][c] = '*';
                }
            }
        }
    }
    let mut out = String::new();
    for (r, row) in grid.iter().enumerate() {
        let level = hi - r as f64 / 2.0;
        let _ = writeln!(out, "{level:+5.1} |{}", row.iter().collect::<String>().trim_end());
    }
    let _ = writeln!(out, "      +{}", "-".repeat(columns));
    let _ = writeln!(out, "       {}", schedule.symbols().join(" "));
    out
}
