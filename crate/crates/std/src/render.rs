//! 8-bit binary PGM heatmaps.

use serde::Serialize;

use crate::formats::GridFile;

/// Gray level of every pixel when the data range is empty.
pub const DEGENERATE_GRAY: u8 = 128;

/// How data values became gray levels.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PgmSidecar {
    pub format: &'static str,
    pub source_kind: &'static str,
    pub width: usize,
    pub height: usize,
    pub maxval: u8,
    /// Data value at gray 0.
    pub min: f64,
    /// Data value at gray 255.
    pub max: f64,
    pub mapping: &'static str,
    pub degenerate: bool,
    pub x_axis: (&'static str, f64, f64),
    pub y_axis: (&'static str, f64, f64),
    pub row_order: &'static str,
}

pub fn gray(v: f64, min: f64, max: f64) -> u8 {
    if max > min {
        (255.0 * (v - min) / (max - min)).round().clamp(0.0, 255.0) as u8
    } else {
        DEGENERATE_GRAY
    }
}

/// P5 image of `g`, last row of the file at the top so the second axis
/// increases upwards.
pub fn render_pgm(g: &GridFile) -> (Vec<u8>, PgmSidecar) {
    let (w, h) = (g.x.len(), g.y.len());
    let (min, max) = g.min_max();
    let mut out = format!("P5\n{w} {h}\n255\n").into_bytes();
    out.reserve(w * h);
    for row in g.values.chunks(w).rev() {
        out.extend(row.iter().map(|&v| gray(v, min, max)));
    }
    let (xn, yn) = g.kind.axis_names();
    let side = PgmSidecar {
        format: "pgm-p5",
        source_kind: g.kind.as_str(),
        width: w,
        height: h,
        maxval: 255,
        min,
        max,
        mapping: "gray = round(255*(v-min)/(max-min)); 128 everywhere when min == max",
        degenerate: !(max > min),
        x_axis: (xn, g.x[0], g.x[w - 1]),
        y_axis: (yn, g.y[0], g.y[h - 1]),
        row_order: "first image row = last data row (second axis increases upwards)",
    };
    (out, side)
}

/// Pixel payload of a P5 image written by [`render_pgm`].
pub fn pgm_pixels(bytes: &[u8]) -> Option<(usize, usize, &[u8])> {
    let text_end = bytes.iter().enumerate().filter(|(_, &b)| b == b'\n').nth(2)?.0;
    let header = std::str::from_utf8(&bytes[..text_end]).ok()?;
    let mut it = header.split_whitespace();
    if it.next()? != "P5" {
        return None;
    }
    let w: usize = it.next()?.parse().ok()?;
    let h: usize = it.next()?.parse().ok()?;
    if it.next()? != "255" {
        return None;
    }
    let px = &bytes[text_end + 1..];
    (px.len() == w * h).then_some((w, h, px))
}
