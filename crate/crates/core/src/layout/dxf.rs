//! Minimal ASCII DXF (R12) writer and reader for closed polylines.

use std::fmt::Write;

use super::{Kind, Polygon};
use crate::error::{Error, Result};

const LAYERS: [&str; 4] = ["top", "ground", "top_cutout", "ground_cutout"];

fn layer_of(p: &Polygon) -> String {
    match p.kind {
        Kind::Copper => p.layer.name().to_string(),
        Kind::Cutout => format!("{}_cutout", p.layer.name()),
    }
}

fn pair(out: &mut String, code: i32, value: &str) {
    let _ = write!(out, "{code:>3}\n{value}\n");
}

/// Writes HEADER, a LAYER table and one closed POLYLINE per polygon.
pub fn export_dxf(polys: &[Polygon]) -> String {
    let mut out = String::new();
    pair(&mut out, 0, "SECTION");
    pair(&mut out, 2, "HEADER");
    pair(&mut out, 9, "$ACADVER");
    pair(&mut out, 1, "AC1009");
    pair(&mut out, 9, "$INSUNITS");
    pair(&mut out, 70, "4");
    pair(&mut out, 0, "ENDSEC");

    pair(&mut out, 0, "SECTION");
    pair(&mut out, 2, "TABLES");
    pair(&mut out, 0, "TABLE");
    pair(&mut out, 2, "LAYER");
    pair(&mut out, 70, &LAYERS.len().to_string());
    for (i, name) in LAYERS.iter().enumerate() {
        pair(&mut out, 0, "LAYER");
        pair(&mut out, 2, name);
        pair(&mut out, 70, "0");
        pair(&mut out, 62, &(i + 1).to_string());
        pair(&mut out, 6, "CONTINUOUS");
    }
    pair(&mut out, 0, "ENDTAB");
    pair(&mut out, 0, "ENDSEC");

    pair(&mut out, 0, "SECTION");
    pair(&mut out, 2, "ENTITIES");
    for p in polys {
        let layer = layer_of(p);
        pair(&mut out, 0, "POLYLINE");
        pair(&mut out, 8, &layer);
        pair(&mut out, 66, "1");
        pair(&mut out, 70, "1");
        for (x, y) in &p.vertices_mm {
            pair(&mut out, 0, "VERTEX");
            pair(&mut out, 8, &layer);
            pair(&mut out, 10, &format!("{x:.9}"));
            pair(&mut out, 20, &format!("{y:.9}"));
        }
        pair(&mut out, 0, "SEQEND");
        pair(&mut out, 8, &layer);
    }
    pair(&mut out, 0, "ENDSEC");
    pair(&mut out, 0, "EOF");
    out
}

/// Closed or open polyline read back from a DXF document.
#[derive(Debug, Clone, PartialEq)]
pub struct DxfPolyline {
    pub layer: String,
    pub closed: bool,
    pub vertices: Vec<(f64, f64)>,
}

/// Reads the POLYLINE/VERTEX entities written by [`export_dxf`].
/// Everything else is skipped.
pub fn parse_dxf(text: &str) -> Result<Vec<DxfPolyline>> {
    let lines: Vec<&str> = text.lines().collect();
    if !lines.len().is_multiple_of(2) {
        return Err(Error::Parse("DXF has an odd number of lines".into()));
    }
    let pairs: Vec<(i32, &str)> = lines
        .chunks(2)
        .map(|c| {
            c[0].trim()
                .parse::<i32>()
                .map(|code| (code, c[1].trim()))
                .map_err(|_| Error::Parse(format!("bad group code {:?}", c[0])))
        })
        .collect::<Result<_>>()?;

    let num = |s: &str| {
        s.parse::<f64>()
            .map_err(|_| Error::Parse(format!("bad number {s:?}")))
    };
    let mut out = Vec::new();
    let mut current: Option<DxfPolyline> = None;
    let mut vertex: Option<(Option<f64>, Option<f64>)> = None;
    let mut in_header = false;

    let flush_vertex = |current: &mut Option<DxfPolyline>,
                        vertex: &mut Option<(Option<f64>, Option<f64>)>|
     -> Result<()> {
        if let Some((x, y)) = vertex.take() {
            let (Some(x), Some(y)) = (x, y) else {
                return Err(Error::Parse("VERTEX missing a coordinate".into()));
            };
            match current {
                Some(poly) => poly.vertices.push((x, y)),
                None => return Err(Error::Parse("VERTEX outside POLYLINE".into())),
            }
        }
        Ok(())
    };

    for (code, value) in pairs {
        if code == 0 {
            flush_vertex(&mut current, &mut vertex)?;
            in_header = false;
            match value {
                "POLYLINE" => {
                    if current.is_some() {
                        return Err(Error::Parse("POLYLINE without SEQEND".into()));
                    }
                    current = Some(DxfPolyline {
                        layer: String::new(),
                        closed: false,
                        vertices: Vec::new(),
                    });
                    in_header = true;
                }
                "VERTEX" => vertex = Some((None, None)),
                "SEQEND" => {
                    let poly = current
                        .take()
                        .ok_or_else(|| Error::Parse("SEQEND without POLYLINE".into()))?;
                    out.push(poly);
                }
                _ => {}
            }
            continue;
        }
        if let Some(v) = vertex.as_mut() {
            match code {
                10 => v.0 = Some(num(value)?),
                20 => v.1 = Some(num(value)?),
                _ => {}
            }
        } else if in_header {
            if let Some(poly) = current.as_mut() {
                match code {
                    8 => poly.layer = value.to_string(),
                    70 => poly.closed = value.parse::<i32>().map(|f| f & 1 == 1).unwrap_or(false),
                    _ => {}
                }
            }
        }
    }
    if current.is_some() {
        return Err(Error::Parse("unterminated POLYLINE".into()));
    }
    Ok(out)
}
