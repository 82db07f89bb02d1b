//! Output formats: CSV tables, JSON documents and small static SVG plots.

use std::fmt::Write as _;
use std::io::{self, Write};

use crate::dressed::DressedSpectrum;
use crate::evolve::TimeSeries;
use crate::metrics::{InterferenceSweep, RegimeMap};

/// Shortest `%.12g`-style rendering: 12 significant digits, trailing zeros
/// dropped, scientific notation outside [1e-4, 1e12).
pub fn fmt_g(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{v:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(&format!("{v:.decimals$}"))
    } else {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        let t = s.trim_end_matches('0').trim_end_matches('.');
        if t == "-0" {
            "0".into()
        } else {
            t.into()
        }
    } else {
        s.into()
    }
}

pub const SERIES_HEADER: &str = "tau,re_a1,im_a1,re_a2,im_a2,p1,p2,pt";

/// Evolve schema; with `reservoir` an extra `reservoir_pop` column.
pub fn write_series_csv<W: Write>(mut w: W, series: &TimeSeries, reservoir: Option<&[f64]>) -> io::Result<()> {
    if reservoir.is_some() {
        writeln!(w, "{SERIES_HEADER},reservoir_pop")?;
    } else {
        writeln!(w, "{SERIES_HEADER}")?;
    }
    for k in 0..series.len() {
        let fields = [
            series.tau[k],
            series.a1[k].re,
            series.a1[k].im,
            series.a2[k].re,
            series.a2[k].im,
            series.p1[k],
            series.p2[k],
            series.pt[k],
        ];
        let mut line = fields.iter().map(|&v| fmt_g(v)).collect::<Vec<_>>().join(",");
        if let Some(r) = reservoir {
            line.push(',');
            line.push_str(&fmt_g(r[k]));
        }
        writeln!(w, "{line}")?;
    }
    Ok(())
}

pub fn write_spectrum_csv<W: Write>(mut w: W, spectrum: &DressedSpectrum) -> io::Result<()> {
    writeln!(w, "re_x,im_x,re_s,im_s,re_alpha1,im_alpha1,re_alpha2,im_alpha2,kind")?;
    for m in &spectrum.modes {
        let kind = if m.is_bound() { "bound" } else { "decaying" };
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{kind}",
            fmt_g(m.x.re),
            fmt_g(m.x.im),
            fmt_g(m.s.re),
            fmt_g(m.s.im),
            fmt_g(m.alpha1.re),
            fmt_g(m.alpha1.im),
            fmt_g(m.alpha2.re),
            fmt_g(m.alpha2.im),
        )?;
    }
    Ok(())
}

pub fn write_map_csv<W: Write>(mut w: W, map: &RegimeMap) -> io::Result<()> {
    writeln!(w, "delta1,delta2,bound_count,regime_code,regime,degenerate,band_edge")?;
    for c in &map.cells {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            fmt_g(c.delta1),
            fmt_g(c.delta2),
            c.bound_count,
            c.regime.code(),
            c.regime.name(),
            c.degenerate as u8,
            c.band_edge as u8
        )?;
    }
    Ok(())
}

pub fn write_sweep_csv<W: Write>(mut w: W, sweep: &InterferenceSweep) -> io::Result<()> {
    writeln!(
        w,
        "theta,delta1,delta2,regime_code,regime,q2,qt,re_coherence,im_coherence,abs_coherence,mean_pt,transient_tau"
    )?;
    for r in &sweep.rows {
        let (re, im, abs) = match r.coherence {
            Some(c) => (fmt_g(c.re), fmt_g(c.im), fmt_g(c.norm())),
            None => (String::new(), String::new(), String::new()),
        };
        writeln!(
            w,
            "{},{},{},{},{},{},{},{re},{im},{abs},{},{}",
            fmt_g(r.theta),
            fmt_g(r.delta1),
            fmt_g(r.delta2),
            r.regime.code(),
            r.regime.name(),
            fmt_g(r.q2),
            fmt_g(r.qt),
            fmt_g(r.mean_pt),
            fmt_g(r.transient_tau),
        )?;
    }
    Ok(())
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 50.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// A labelled polyline.
pub struct Curve<'a> {
    pub label: String,
    pub x: &'a [f64],
    pub y: &'a [f64],
}

/// Line plot with axes, tick labels at the ends and a legend.
pub fn line_plot_svg(title: &str, xlabel: &str, curves: &[Curve<'_>]) -> String {
    let finite = |v: &&f64| v.is_finite();
    let xs = curves.iter().flat_map(|c| c.x.iter()).filter(finite);
    let ys = curves.iter().flat_map(|c| c.y.iter()).filter(finite);
    let (x0, x1) = bounds(xs);
    let (y0, y1) = bounds(ys);
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);
    let mut s = header(title);
    axes(&mut s, xlabel, (x0, x1), (y0, y1));
    for (i, c) in curves.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let pts: Vec<String> = c
            .x
            .iter()
            .zip(c.y)
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .map(|(&x, &y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            pts.join(" ")
        );
        let ly = MARGIN + 16.0 * i as f64;
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{ly:.1}" font-size="12" fill="{color}">{}</text>"#,
            WIDTH - MARGIN - 120.0,
            escape(&c.label)
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Regime map as colored cells: 0 light, 1 mid, 2 dark.
pub fn regime_map_svg(map: &RegimeMap) -> String {
    let n1 = map.delta1.len().max(1);
    let n2 = map.delta2.len().max(1);
    let cw = (WIDTH - 2.0 * MARGIN) / n1 as f64;
    let ch = (HEIGHT - 2.0 * MARGIN) / n2 as f64;
    let shades = ["#f0f0f0", "#9ecae1", "#08519c"];
    let mut s = header(&format!("bound dressed states ({})", map.kind.short_name()));
    for (idx, c) in map.cells.iter().enumerate() {
        let (i, j) = (idx % n1, idx / n1);
        let x = MARGIN + i as f64 * cw;
        let y = HEIGHT - MARGIN - (j + 1) as f64 * ch;
        let _ = writeln!(
            s,
            r#"<rect x="{x:.2}" y="{y:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#,
            cw + 0.05,
            ch + 0.05,
            shades[c.bound_count.min(2)]
        );
    }
    let ends = |v: &[f64]| (v.first().copied().unwrap_or(0.0), v.last().copied().unwrap_or(1.0));
    axes(&mut s, "delta1", ends(&map.delta1), ends(&map.delta2));
    s.push_str("</svg>\n");
    s
}

fn bounds<'a>(v: impl Iterator<Item = &'a f64>) -> (f64, f64) {
    let (lo, hi) = v.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-300 {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

fn header(title: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">
<rect width="100%" height="100%" fill="white"/>
<text x="{:.1}" y="24" font-size="14" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    s
}

fn axes(s: &mut String, xlabel: &str, x: (f64, f64), y: (f64, f64)) {
    let (l, r, t, b) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
    let _ = writeln!(
        s,
        r#"<polyline fill="none" stroke="black" points="{l},{t} {l},{b} {r},{b}"/>
<text x="{l}" y="{:.1}" font-size="11" text-anchor="middle">{}</text>
<text x="{r}" y="{:.1}" font-size="11" text-anchor="middle">{}</text>
<text x="{:.1}" y="{b}" font-size="11" text-anchor="end">{}</text>
<text x="{:.1}" y="{t}" font-size="11" text-anchor="end">{}</text>
<text x="{:.1}" y="{:.1}" font-size="12" text-anchor="middle">{}</text>"#,
        b + 16.0,
        fmt_short(x.0),
        b + 16.0,
        fmt_short(x.1),
        l - 4.0,
        fmt_short(y.0),
        l - 4.0,
        fmt_short(y.1),
        (l + r) / 2.0,
        b + 34.0,
        escape(xlabel)
    );
}

fn fmt_short(v: f64) -> String {
    let s = format!("{v:.4}");
    trim_zeros(&s)
}
