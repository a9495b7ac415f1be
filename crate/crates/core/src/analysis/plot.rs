use std::collections::BTreeMap;
use std::fmt::Write as _;

use chrono::NaiveDate;

use super::timeline::DayFrames;
use super::virality::ViralitySeries;
use crate::corpus::{MoralFrame, Stance};
use crate::scalar::Scalar;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 40.0;
const PALETTE: [&str; 12] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#393b79",
    "#843c39",
];

fn x_at(i: usize, n: usize) -> f64 {
    if n <= 1 {
        WIDTH / 2.0
    } else {
        MARGIN + (WIDTH - 2.0 * MARGIN) * i as f64 / (n - 1) as f64
    }
}

fn open(title: &str) -> String {
    let mut s = String::new();
    writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#).unwrap();
    writeln!(s, r#"<title>{title}</title>"#).unwrap();
    writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#).unwrap();
    s
}

fn axis_labels(s: &mut String, days: &[NaiveDate]) {
    let n = days.len();
    if let (Some(first), Some(last)) = (days.first(), days.last()) {
        writeln!(s, r#"<text x="{MARGIN}" y="{}" font-size="10">{first}</text>"#, HEIGHT - 10.0).unwrap();
        writeln!(s, r#"<text x="{}" y="{}" font-size="10" text-anchor="end">{last}</text>"#, x_at(n - 1, n), HEIGHT - 10.0).unwrap();
    }
}

/// Daily virality per stance as three polylines.
pub fn virality_svg<F: Scalar>(series: &ViralitySeries<F>) -> String {
    let days: Vec<NaiveDate> = series.days.keys().copied().collect();
    let n = days.len();
    let max = series
        .days
        .values()
        .flat_map(|d| Stance::ALL.map(|s| d.by_stance(s).as_f64()))
        .fold(0.0f64, f64::max)
        .max(1.0);
    let mut s = open("Daily virality by stance");
    for (k, stance) in Stance::ALL.iter().enumerate() {
        let points: Vec<String> = series
            .days
            .values()
            .enumerate()
            .map(|(i, d)| format!("{:.2},{:.2}", x_at(i, n), HEIGHT - MARGIN - (HEIGHT - 2.0 * MARGIN) * d.by_stance(*stance).as_f64() / max))
            .collect();
        writeln!(s, r#"<polyline fill="none" stroke="{}" stroke-width="1.5" points="{}"/>"#, PALETTE[k], points.join(" ")).unwrap();
        writeln!(s, r#"<text x="{}" y="{}" font-size="11" fill="{}">{stance}</text>"#, WIDTH - MARGIN - 60.0, MARGIN + 14.0 * k as f64, PALETTE[k]).unwrap();
    }
    axis_labels(&mut s, &days);
    s.push_str("</svg>\n");
    s
}

/// Daily rank (1 at top) of each frame as twelve polylines.
pub fn frame_rank_svg(timeline: &BTreeMap<NaiveDate, DayFrames>) -> String {
    let days: Vec<NaiveDate> = timeline.keys().copied().collect();
    let n = days.len();
    let row = (HEIGHT - 2.0 * MARGIN) / (MoralFrame::COUNT - 1) as f64;
    let mut s = open("Frame popularity rank by day");
    for frame in MoralFrame::ALL {
        let points: Vec<String> = timeline
            .values()
            .enumerate()
            .map(|(i, d)| format!("{:.2},{:.2}", x_at(i, n), MARGIN + row * d.rank_of(frame) as f64))
            .collect();
        let colour = PALETTE[frame.index()];
        writeln!(s, r#"<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{}"/>"#, points.join(" ")).unwrap();
        if let Some(first) = timeline.values().next() {
            writeln!(s, r#"<text x="2" y="{:.2}" font-size="10" fill="{colour}">{frame}</text>"#, MARGIN + row * first.rank_of(frame) as f64 + 3.0).unwrap();
        }
    }
    axis_labels(&mut s, &days);
    s.push_str("</svg>\n");
    s
}
