//! Text file formats: the grid CSV shared by maps and spectra, and the
//! two-column lineshape CSV. Numbers are written with 17 significant digits
//! so a write/read cycle is exact.

use std::fmt::Write as _;
use std::path::Path;

use lzsm_core::spectral::{MapSource, PhaseMap, Spectrum2D};

use crate::error::{CliError, CliResult};

pub const GRID_MAGIC: &str = "# lzsm-grid v1";
pub const LINESHAPE_MAGIC: &str = "# lzsm-lineshape v1";
pub const LINESHAPE_HEADER: &str = "v_g_V,phase_deg";

/// What the two axes of a grid file are.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridKind {
    /// `eps_ueV` × `amp_ueV`, phase in degrees.
    Map,
    /// `k_eps_ps` × `k_amp_per_ueV`, DFT magnitude.
    Spectrum,
}

impl GridKind {
    pub fn axis_names(self) -> (&'static str, &'static str) {
        match self {
            GridKind::Map => ("eps_ueV", "amp_ueV"),
            GridKind::Spectrum => ("k_eps_ps", "k_amp_per_ueV"),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            GridKind::Map => "phase_map",
            GridKind::Spectrum => "spectrum",
        }
    }
}

/// Row-major grid: one row per value of the second axis.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFile {
    pub kind: GridKind,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub values: Vec<f64>,
}

impl GridFile {
    pub fn from_map(map: &PhaseMap) -> Self {
        Self { kind: GridKind::Map, x: map.eps_axis.clone(), y: map.amp_axis.clone(), values: map.values.clone() }
    }

    pub fn from_spectrum(s: &Spectrum2D) -> Self {
        Self {
            kind: GridKind::Spectrum,
            x: s.k_eps_axis.clone(),
            y: s.k_amp_axis.clone(),
            values: s.magnitude.clone(),
        }
    }

    /// A measured phase map; the axes must be uniform.
    pub fn into_map(self) -> CliResult<PhaseMap> {
        if self.kind != GridKind::Map {
            return Err(CliError::Data("expected a phase map (eps_ueV/amp_ueV axes), got a spectrum".into()));
        }
        PhaseMap::new(self.x, self.y, self.values, MapSource::Measured).map_err(CliError::from_data)
    }

    pub fn min_max(&self) -> (f64, f64) {
        self.values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
    }
}

fn push_list(out: &mut String, values: &[f64]) {
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        write!(out, "{v:.16e}").unwrap();
    }
}

pub fn write_grid_string(g: &GridFile) -> String {
    let (xn, yn) = g.kind.axis_names();
    let mut out = String::with_capacity(24 * (g.values.len() + g.x.len() + g.y.len()) + 64);
    out.push_str(GRID_MAGIC);
    out.push('\n');
    write!(out, "# {xn}: ").unwrap();
    push_list(&mut out, &g.x);
    out.push('\n');
    write!(out, "# {yn}: ").unwrap();
    push_list(&mut out, &g.y);
    out.push('\n');
    for row in g.values.chunks(g.x.len().max(1)) {
        push_list(&mut out, row);
        out.push('\n');
    }
    out
}

pub fn write_grid(path: &Path, g: &GridFile) -> CliResult<()> {
    write_text(path, &write_grid_string(g))
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| CliError::write(path, e))
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> CliResult<()> {
    std::fs::write(path, bytes).map_err(|e| CliError::write(path, e))
}

pub fn read_text(path: &Path) -> CliResult<String> {
    let bytes = std::fs::read(path).map_err(|e| CliError::read(path, e))?;
    String::from_utf8(bytes).map_err(|e| {
        let line = 1 + e.as_bytes()[..e.utf8_error().valid_up_to()].iter().filter(|&&b| b == b'\n').count();
        CliError::Format { path: path.to_path_buf(), line, msg: "not valid UTF-8".into() }
    })
}

fn parse_list(text: &str, line: usize, path: &Path) -> CliResult<Vec<f64>> {
    text.split(',')
        .enumerate()
        .map(|(i, field)| {
            let field = field.trim();
            let v: f64 = field.parse().map_err(|_| CliError::Format {
                path: path.to_path_buf(),
                line,
                msg: format!("field {}: cannot parse {field:?} as a number", i + 1),
            })?;
            if !v.is_finite() {
                return Err(CliError::Format {
                    path: path.to_path_buf(),
                    line,
                    msg: format!("field {}: non-finite value {field}", i + 1),
                });
            }
            Ok(v)
        })
        .collect()
}

/// Numbered, non-blank lines; trailing blank lines are ignored, blank lines
/// elsewhere are errors.
fn content_lines<'a>(text: &'a str, path: &Path) -> CliResult<Vec<(usize, &'a str)>> {
    let lines: Vec<(usize, &str)> =
        text.lines().enumerate().map(|(i, l)| (i + 1, l.strip_suffix('\r').unwrap_or(l))).collect();
    let last = lines.iter().rposition(|(_, l)| !l.trim().is_empty()).map_or(0, |i| i + 1);
    let lines = &lines[..last];
    if let Some(&(n, _)) = lines.iter().find(|(_, l)| l.trim().is_empty()) {
        return Err(CliError::Format { path: path.to_path_buf(), line: n, msg: "blank line".into() });
    }
    Ok(lines.to_vec())
}

pub fn parse_grid(text: &str, path: &Path) -> CliResult<GridFile> {
    let fmt_err = |line: usize, msg: String| CliError::Format { path: path.to_path_buf(), line, msg };
    let lines = content_lines(text, path)?;
    match lines.first() {
        Some((_, l)) if *l == GRID_MAGIC => {}
        Some((_, l)) => return Err(fmt_err(1, format!("expected {GRID_MAGIC:?}, found {l:?}"))),
        None => return Err(fmt_err(1, "empty file".into())),
    }
    let header = |idx: usize, names: [&str; 2]| -> CliResult<(usize, Vec<f64>)> {
        let Some(&(n, l)) = lines.get(idx) else {
            return Err(fmt_err(idx + 1, "missing axis header".into()));
        };
        for (which, name) in names.iter().enumerate() {
            if let Some(rest) = l.strip_prefix(&format!("# {name}:")) {
                return Ok((which, parse_list(rest, n, path)?));
            }
        }
        Err(fmt_err(n, format!("expected \"# {}: ...\" or \"# {}: ...\"", names[0], names[1])))
    };
    let (kx, x) = header(1, ["eps_ueV", "k_eps_ps"])?;
    let (ky, y) = header(2, ["amp_ueV", "k_amp_per_ueV"])?;
    if kx != ky {
        return Err(fmt_err(3, "axis names mix a phase map and a spectrum".into()));
    }
    let kind = if kx == 0 { GridKind::Map } else { GridKind::Spectrum };
    let rows = &lines[3..];
    if rows.len() != y.len() {
        let line = rows.last().map_or(3, |r| r.0);
        return Err(fmt_err(line, format!("{} data rows, the second axis has {} values", rows.len(), y.len())));
    }
    let mut values = Vec::with_capacity(x.len() * y.len());
    for &(n, l) in rows {
        let row = parse_list(l, n, path)?;
        if row.len() != x.len() {
            return Err(fmt_err(n, format!("{} values, the first axis has {}", row.len(), x.len())));
        }
        values.extend(row);
    }
    Ok(GridFile { kind, x, y, values })
}

pub fn read_grid(path: &Path) -> CliResult<GridFile> {
    parse_grid(&read_text(path)?, path)
}

/// Gate-voltage sweep of the phase response.
#[derive(Debug, Clone, PartialEq)]
pub struct Lineshape {
    pub v_g: Vec<f64>,
    pub phase: Vec<f64>,
}

pub fn write_lineshape_string(ls: &Lineshape) -> String {
    let mut out = format!("{LINESHAPE_MAGIC}\n{LINESHAPE_HEADER}\n");
    for (v, p) in ls.v_g.iter().zip(&ls.phase) {
        writeln!(out, "{v:.16e},{p:.16e}").unwrap();
    }
    out
}

pub fn parse_lineshape(text: &str, path: &Path) -> CliResult<Lineshape> {
    let fmt_err = |line: usize, msg: String| CliError::Format { path: path.to_path_buf(), line, msg };
    let lines = content_lines(text, path)?;
    match lines.first() {
        Some((_, l)) if *l == LINESHAPE_MAGIC => {}
        Some((_, l)) => return Err(fmt_err(1, format!("expected {LINESHAPE_MAGIC:?}, found {l:?}"))),
        None => return Err(fmt_err(1, "empty file".into())),
    }
    match lines.get(1) {
        Some((_, l)) if l.replace(' ', "") == LINESHAPE_HEADER => {}
        _ => return Err(fmt_err(2, format!("expected column header {LINESHAPE_HEADER:?}"))),
    }
    let mut ls = Lineshape { v_g: Vec::new(), phase: Vec::new() };
    for &(n, l) in &lines[2..] {
        let row = parse_list(l, n, path)?;
        if row.len() != 2 {
            return Err(fmt_err(n, format!("expected 2 columns, found {}", row.len())));
        }
        ls.v_g.push(row[0]);
        ls.phase.push(row[1]);
    }
    Ok(ls)
}

pub fn read_lineshape(path: &Path) -> CliResult<Lineshape> {
    parse_lineshape(&read_text(path)?, path)
}
