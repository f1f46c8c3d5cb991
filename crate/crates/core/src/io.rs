//! File formats: portable graymaps (P2/P5) for masks and label maps, CSV for
//! scalar fields, paths and cuts, and JSON lines for per-region statistics.
//!
//! Every writer is canonical: equal values always serialize to identical
//! bytes, with LF line endings.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::eikonal::Path;
use crate::error::{Error, Result};
use crate::grid::{BinaryMask, GridDims, LabelMap, ScalarField};
use crate::subdivision::CutPlan;

/// Raw graymap contents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graymap {
    pub dims: GridDims,
    pub maxval: u16,
    pub samples: Vec<u16>,
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_whitespace_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<u64> {
        self.skip_whitespace_and_comments();
        let start = self.pos;
        let mut value: u64 = 0;
        while let Some(&b) = self.bytes.get(self.pos) {
            if !b.is_ascii_digit() {
                break;
            }
            value = value
                .checked_mul(10)
                .and_then(|v| v.checked_add(u64::from(b - b'0')))
                .ok_or_else(|| Error::parse(start, format!("{what} is too large")))?;
            self.pos += 1;
        }
        if self.pos == start {
            return Err(match self.bytes.get(start) {
                None => Error::parse(start, format!("unexpected end of data, expected {what}")),
                Some(&b) => Error::parse(start, format!("expected {what}, found byte 0x{b:02x}")),
            });
        }
        Ok(value)
    }
}

/// Parses a P2 or P5 graymap.
pub fn read_graymap(bytes: &[u8]) -> Result<Graymap> {
    let plain = match bytes.get(..2) {
        Some(b"P2") => true,
        Some(b"P5") => false,
        _ => {
            return Err(Error::parse(
                0,
                "not a graymap: expected magic number P2 or P5",
            ))
        }
    };
    let mut cur = Cursor { bytes, pos: 2 };
    if !cur
        .bytes
        .get(2)
        .is_some_and(|b| b.is_ascii_whitespace() || *b == b'#')
    {
        return Err(Error::parse(2, "expected whitespace after magic number"));
    }
    cur.skip_whitespace_and_comments();
    let width_at = cur.pos;
    let width = cur.number("width")?;
    let height = cur.number("height")?;
    cur.skip_whitespace_and_comments();
    let maxval_at = cur.pos;
    let maxval = cur.number("maxval")?;
    if !(1..=65535).contains(&maxval) {
        return Err(Error::parse(
            maxval_at,
            format!("maxval {maxval} outside 1..65535"),
        ));
    }
    let dims = GridDims::new(width as usize, height as usize)
        .map_err(|e| Error::parse(width_at, e.to_string()))?;
    let maxval = maxval as u16;
    let n = dims.len();

    let samples = if plain {
        let mut samples = Vec::with_capacity(n);
        for _ in 0..n {
            cur.skip_whitespace_and_comments();
            let at = cur.pos;
            let v = cur.number("sample")?;
            if v > u64::from(maxval) {
                return Err(Error::parse(
                    at,
                    format!("sample {v} exceeds maxval {maxval}"),
                ));
            }
            samples.push(v as u16);
        }
        samples
    } else {
        // Exactly one whitespace byte separates the header from the raster.
        match bytes.get(cur.pos) {
            Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
            _ => return Err(Error::parse(cur.pos, "expected whitespace before raster")),
        }
        let wide = maxval > 255;
        let need = if wide { 2 * n } else { n };
        let raster = &bytes[cur.pos..];
        if raster.len() < need {
            return Err(Error::parse(
                bytes.len(),
                format!(
                    "truncated raster: expected {need} bytes, found {}",
                    raster.len()
                ),
            ));
        }
        let samples: Vec<u16> = if wide {
            raster[..need]
                .chunks_exact(2)
                .map(|p| u16::from_be_bytes([p[0], p[1]]))
                .collect()
        } else {
            raster[..need].iter().map(|&b| u16::from(b)).collect()
        };
        if let Some(i) = samples.iter().position(|&s| s > maxval) {
            let at = cur.pos + if wide { 2 * i } else { i };
            return Err(Error::parse(
                at,
                format!("sample {} exceeds maxval {maxval}", samples[i]),
            ));
        }
        samples
    };
    Ok(Graymap {
        dims,
        maxval,
        samples,
    })
}

/// Reads a mask from a graymap: nonzero samples are inside the region.
pub fn read_mask(bytes: &[u8]) -> Result<BinaryMask> {
    let g = read_graymap(bytes)?;
    BinaryMask::new(g.dims, g.samples.iter().map(|&s| s != 0).collect())
}

/// Reads a label map written by [`write_labelmap`] (or any graymap whose
/// samples are labels).
pub fn read_labelmap(bytes: &[u8]) -> Result<LabelMap> {
    let g = read_graymap(bytes)?;
    LabelMap::new(g.dims, g.samples.iter().map(|&s| u32::from(s)).collect())
}

fn write_plain(dims: GridDims, maxval: u32, samples: impl Iterator<Item = u32>) -> Vec<u8> {
    let mut out = String::new();
    let _ = write!(out, "P2\n{} {}\n{}\n", dims.width(), dims.height(), maxval);
    for (i, s) in samples.enumerate() {
        let sep = if (i + 1) % dims.width() == 0 {
            '\n'
        } else {
            ' '
        };
        let _ = write!(out, "{s}{sep}");
    }
    out.into_bytes()
}

/// Plain graymap, maxval 1.
pub fn write_mask(mask: &BinaryMask) -> Vec<u8> {
    write_plain(mask.dims(), 1, mask.data().iter().map(|&b| u32::from(b)))
}

/// Plain graymap with one row per line; maxval is the largest label (at
/// least 1).
pub fn write_labelmap(labels: &LabelMap) -> Result<Vec<u8>> {
    let max = labels.max_label();
    if max > u32::from(u16::MAX) {
        return Err(Error::LabelOverflow(max));
    }
    Ok(write_plain(
        labels.dims(),
        max.max(1),
        labels.data().iter().copied(),
    ))
}

/// One CSV row per grid row. Values use the shortest representation that
/// parses back to the same `f64`; infinity is written as `inf`.
pub fn write_field_csv(field: &ScalarField) -> Vec<u8> {
    let w = field.dims().width();
    let mut out = String::new();
    for row in field.data().chunks(w) {
        for (i, v) in row.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            if v.is_infinite() && *v > 0.0 {
                out.push_str("inf");
            } else {
                let _ = write!(out, "{v}");
            }
        }
        out.push('\n');
    }
    out.into_bytes()
}

pub fn read_field_csv(bytes: &[u8]) -> Result<ScalarField> {
    let text =
        std::str::from_utf8(bytes).map_err(|e| Error::parse(e.valid_up_to(), "invalid UTF-8"))?;
    let mut data = Vec::new();
    let mut width = None;
    let mut height = 0;
    let mut offset = 0;
    for line in text.split_terminator('\n') {
        let mut cells = 0;
        let mut cell_at = offset;
        for cell in line.split(',') {
            let v: f64 = cell
                .parse()
                .map_err(|_| Error::parse(cell_at, format!("invalid number {cell:?}")))?;
            data.push(v);
            cells += 1;
            cell_at += cell.len() + 1;
        }
        if *width.get_or_insert(cells) != cells {
            return Err(Error::parse(offset, "ragged CSV row"));
        }
        height += 1;
        offset += line.len() + 1;
    }
    let dims =
        GridDims::new(width.unwrap_or(0), height).map_err(|e| Error::parse(0, e.to_string()))?;
    ScalarField::new(dims, data)
}

/// `x,y` per line, in path order.
pub fn write_path_csv(path: &Path) -> Vec<u8> {
    let mut out = String::new();
    for c in path.coords() {
        let _ = writeln!(out, "{},{}", c.x, c.y);
    }
    out.into_bytes()
}

/// `x,y,dx,dy` per line: anchor then normal.
pub fn write_cuts_csv(plan: &CutPlan) -> Vec<u8> {
    let mut out = String::new();
    for cut in &plan.cuts {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            cut.anchor.x, cut.anchor.y, cut.normal.dx, cut.normal.dy
        );
    }
    out.into_bytes()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionStats {
    pub label: u32,
    pub area: usize,
    pub centroid: (f64, f64),
    /// `(min x, min y, max x, max y)`.
    pub bbox: (usize, usize, usize, usize),
}

/// Statistics for every nonzero label, in ascending label order.
pub fn region_stats(labels: &LabelMap) -> Vec<RegionStats> {
    #[derive(Clone)]
    struct Acc {
        area: usize,
        sx: u64,
        sy: u64,
        bbox: (usize, usize, usize, usize),
    }
    let n = labels.max_label() as usize;
    let mut acc = vec![
        Acc {
            area: 0,
            sx: 0,
            sy: 0,
            bbox: (usize::MAX, usize::MAX, 0, 0),
        };
        n + 1
    ];
    let dims = labels.dims();
    for (i, &l) in labels.data().iter().enumerate() {
        if l == 0 {
            continue;
        }
        let c = dims.coord(i);
        let a = &mut acc[l as usize];
        a.area += 1;
        a.sx += c.x as u64;
        a.sy += c.y as u64;
        a.bbox = (
            a.bbox.0.min(c.x),
            a.bbox.1.min(c.y),
            a.bbox.2.max(c.x),
            a.bbox.3.max(c.y),
        );
    }
    acc.iter()
        .enumerate()
        .skip(1)
        .filter(|(_, a)| a.area > 0)
        .map(|(l, a)| RegionStats {
            label: l as u32,
            area: a.area,
            centroid: (a.sx as f64 / a.area as f64, a.sy as f64 / a.area as f64),
            bbox: a.bbox,
        })
        .collect()
}

pub fn write_stats_jsonl(stats: &[RegionStats]) -> Vec<u8> {
    let mut out = Vec::new();
    for s in stats {
        serde_json::to_writer(&mut out, s).expect("stats serialize to memory");
        out.push(b'\n');
    }
    out
}
