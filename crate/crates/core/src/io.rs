//! Output formats: curve CSV, SVG polyline, plain PGM raster.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use crate::error::Result;
use crate::odesolver::HullRaster;
use crate::zipper::Curve;

/// Writes `bytes` to a temporary file next to `path` and renames it into
/// place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// `t,re,im` with 17 significant digits, preceded by `# ` metadata lines.
pub fn curve_csv(curve: &Curve, metadata: &[String]) -> String {
    let mut out = String::with_capacity(80 * (curve.len() + 1));
    for line in metadata {
        let _ = writeln!(out, "# {line}");
    }
    out.push_str("t,re,im\n");
    for (t, p) in curve.times.iter().zip(&curve.points) {
        let _ = writeln!(out, "{t:.16e},{:.16e},{:.16e}", p.re, p.im);
    }
    out
}

/// Parses the rows of [`curve_csv`] back into `(t, re, im)` triples.
pub fn parse_curve_csv(text: &str) -> Option<Vec<(f64, f64, f64)>> {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    if lines.next()? != "t,re,im" {
        return None;
    }
    lines
        .map(|l| {
            let mut it = l.split(',').map(|f| f.parse::<f64>().ok());
            Some((it.next()??, it.next()??, it.next()??))
        })
        .collect()
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// One `<polyline>` for the curve and one `<line>` for the real axis, with
/// the y-axis flipped and equal aspect ratio.
pub fn curve_svg(curve: &Curve, metadata: &[String]) -> String {
    let (mut x0, mut x1, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, 0.0f64);
    for p in &curve.points {
        x0 = x0.min(p.re);
        x1 = x1.max(p.re);
        y1 = y1.max(p.im);
    }
    if !x0.is_finite() {
        (x0, x1) = (-1.0, 1.0);
    }
    let span = (x1 - x0).max(y1).max(1e-9);
    let pad = 0.05 * span;
    let (vx, vy, vw, vh) = (x0 - pad, -y1 - pad, (x1 - x0) + 2.0 * pad, y1 + 2.0 * pad);
    let scale = 800.0 / vw.max(vh);
    let stroke = 1.0 / scale;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{:.0}" height="{:.0}" viewBox="{vx} {vy} {vw} {vh}" preserveAspectRatio="xMidYMid meet">"#,
        vw * scale,
        vh * scale
    );
    let _ = writeln!(out, "<desc>{}</desc>", escape(&metadata.join("; ")));
    let _ = writeln!(
        out,
        r#"<line x1="{vx}" y1="0" x2="{}" y2="0" stroke="gray" stroke-width="{stroke}"/>"#,
        vx + vw
    );
    out.push_str(r#"<polyline fill="none" stroke="black" stroke-width=""#);
    let _ = write!(out, "{stroke}\" points=\"");
    for (i, p) in curve.points.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(out, "{:.9},{:.9}", p.re, -p.im);
    }
    out.push_str("\"/>\n</svg>\n");
    out
}

/// Plain (`P2`) graymap: 255 for swallowed nodes, 0 otherwise.
pub fn raster_pgm(raster: &HullRaster, metadata: &[String]) -> String {
    let mut out = String::with_capacity(4 * raster.mask.len() + 64);
    out.push_str("P2\n");
    for line in metadata {
        let _ = writeln!(out, "# {line}");
    }
    let _ = writeln!(out, "{} {}\n255", raster.width, raster.height);
    for row in raster.mask.chunks(raster.width) {
        let line: Vec<&str> = row.iter().map(|&m| if m { "255" } else { "0" }).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}
