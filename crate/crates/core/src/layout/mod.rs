//! Board geometry: patch, transformer, feed, ground and the ground-plane U-slot.
//!
//! Frame: origin at the patch centre, feed running toward −y, everything
//! symmetric about x = 0 unless the U-slot is moved off axis. Polygon
//! vertices are emitted in millimeters.

mod dxf;
mod json;

pub use dxf::{export_dxf, parse_dxf, DxfPolyline};
pub use json::{export_json, export_json_with_notes, format_number};

use serde::{Deserialize, Serialize};

use crate::domain::{m_to_mm, DesignTarget, Substrate};
use crate::error::{Error, Result};
use crate::mstripline::{feed_section, LineGeometry};
use crate::synthesis::TlmSolution;

/// Board margin around the copper, in substrate heights.
pub const DEFAULT_MARGIN_HEIGHTS: f64 = 6.0;
/// Feed line length in guided wavelengths at the design frequency.
pub const DEFAULT_FEED_WAVELENGTHS: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Layer {
    Top,
    Ground,
}

impl Layer {
    pub fn name(self) -> &'static str {
        match self {
            Layer::Top => "top",
            Layer::Ground => "ground",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Copper,
    Cutout,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Copper => "copper",
            Kind::Cutout => "cutout",
        }
    }
}

/// Simple counterclockwise polygon, vertices in millimeters.
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    pub layer: Layer,
    pub kind: Kind,
    pub vertices_mm: Vec<(f64, f64)>,
}

fn signed_area(v: &[(f64, f64)]) -> f64 {
    let n = v.len();
    0.5 * (0..n)
        .map(|i| {
            let (x0, y0) = v[i];
            let (x1, y1) = v[(i + 1) % n];
            x0 * y1 - x1 * y0
        })
        .sum::<f64>()
}

fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

fn segments_intersect(p1: (f64, f64), p2: (f64, f64), q1: (f64, f64), q2: (f64, f64)) -> bool {
    let d1 = cross(q1, q2, p1);
    let d2 = cross(q1, q2, p2);
    let d3 = cross(p1, p2, q1);
    let d4 = cross(p1, p2, q2);
    let proper = ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0));
    if proper {
        return true;
    }
    let on = |a: (f64, f64), b: (f64, f64), p: (f64, f64), d: f64| {
        d == 0.0
            && p.0 >= a.0.min(b.0)
            && p.0 <= a.0.max(b.0)
            && p.1 >= a.1.min(b.1)
            && p.1 <= a.1.max(b.1)
    };
    on(q1, q2, p1, d1) || on(q1, q2, p2, d2) || on(p1, p2, q1, d3) || on(p1, p2, q2, d4)
}

fn is_simple(v: &[(f64, f64)]) -> bool {
    let n = v.len();
    for i in 0..n {
        for j in (i + 1)..n {
            // adjacent edges share a vertex by construction
            if j == i + 1 || (i == 0 && j == n - 1) {
                continue;
            }
            if segments_intersect(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n]) {
                return false;
            }
        }
    }
    true
}

impl Polygon {
    /// Validates vertex count, simplicity and counterclockwise orientation.
    pub fn new(layer: Layer, kind: Kind, vertices_mm: Vec<(f64, f64)>) -> Result<Self> {
        if vertices_mm.len() < 3 {
            return Err(Error::Geometry("polygon needs at least 3 vertices".into()));
        }
        if vertices_mm
            .iter()
            .any(|(x, y)| !x.is_finite() || !y.is_finite())
        {
            return Err(Error::Geometry("non-finite vertex".into()));
        }
        if !is_simple(&vertices_mm) {
            return Err(Error::Geometry("polygon is self-intersecting".into()));
        }
        if signed_area(&vertices_mm) <= 0.0 {
            return Err(Error::Geometry("polygon must be counterclockwise".into()));
        }
        Ok(Polygon {
            layer,
            kind,
            vertices_mm,
        })
    }

    /// Axis-aligned rectangle from its x and y extents in meters.
    fn rect(layer: Layer, kind: Kind, x0: f64, x1: f64, y0: f64, y1: f64) -> Result<Self> {
        let (x0, x1, y0, y1) = (m_to_mm(x0), m_to_mm(x1), m_to_mm(y0), m_to_mm(y1));
        Polygon::new(layer, kind, vec![(x0, y0), (x1, y0), (x1, y1), (x0, y1)])
    }

    pub fn area_mm2(&self) -> f64 {
        signed_area(&self.vertices_mm)
    }
}

/// U-shaped cutout in the ground plane, opening toward +y.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UslotSpec {
    pub outer_w_m: f64,
    pub outer_l_m: f64,
    pub arm_w_m: f64,
    pub center_x_m: f64,
    pub center_y_m: f64,
}

impl UslotSpec {
    pub fn new(
        outer_w_m: f64,
        outer_l_m: f64,
        arm_w_m: f64,
        center_x_m: f64,
        center_y_m: f64,
    ) -> Result<Self> {
        if !(outer_w_m > 0.0 && outer_l_m > 0.0 && arm_w_m > 0.0) {
            return Err(Error::invalid("U-slot dimensions must be positive"));
        }
        if arm_w_m >= outer_w_m / 2.0 || arm_w_m >= outer_l_m {
            return Err(Error::invalid(format!(
                "U-slot arm width {arm_w_m} m closes the U (outer {outer_w_m} x {outer_l_m} m)"
            )));
        }
        if !(center_x_m.is_finite() && center_y_m.is_finite()) {
            return Err(Error::invalid("U-slot centre must be finite"));
        }
        Ok(UslotSpec {
            outer_w_m,
            outer_l_m,
            arm_w_m,
            center_x_m,
            center_y_m,
        })
    }

    /// Placeholder proportions centred under the patch: 0.8·W wide,
    /// 0.5·L long, arms 0.1·L wide. The reference design's slot is not
    /// dimensioned, so these are not measured values.
    pub fn default_for(tlm: &TlmSolution) -> Self {
        UslotSpec {
            outer_w_m: 0.8 * tlm.w_patch_m,
            outer_l_m: 0.5 * tlm.l_patch_m,
            arm_w_m: 0.1 * tlm.l_patch_m,
            center_x_m: 0.0,
            center_y_m: 0.0,
        }
    }

    /// Outline, counterclockwise from the lower-left corner.
    fn outline_m(&self) -> Vec<(f64, f64)> {
        let x0 = self.center_x_m - self.outer_w_m / 2.0;
        let x1 = self.center_x_m + self.outer_w_m / 2.0;
        let y0 = self.center_y_m - self.outer_l_m / 2.0;
        let y1 = self.center_y_m + self.outer_l_m / 2.0;
        let a = self.arm_w_m;
        vec![
            (x0, y0),
            (x1, y0),
            (x1, y1),
            (x1 - a, y1),
            (x1 - a, y0 + a),
            (x0 + a, y0 + a),
            (x0 + a, y1),
            (x0, y1),
        ]
    }
}

/// Complete physical design.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatchDesign {
    pub target: DesignTarget,
    pub sub: Substrate,
    pub tlm: TlmSolution,
    pub qwt: LineGeometry,
    pub feed: LineGeometry,
    pub board_w_m: f64,
    pub board_l_m: f64,
    pub uslot: Option<UslotSpec>,
}

impl PatchDesign {
    /// Assembles a design around `tlm` and the transformer `qwt`, adding a
    /// one-wavelength feed at the reference impedance and a board with the
    /// default margin.
    pub fn new(
        target: DesignTarget,
        sub: Substrate,
        tlm: TlmSolution,
        qwt: LineGeometry,
    ) -> Result<Self> {
        let feed = feed_section(target.z0_ohm, target.f_r_hz, DEFAULT_FEED_WAVELENGTHS, &sub)?;
        let mut design = PatchDesign {
            target,
            sub,
            tlm,
            qwt,
            feed,
            board_w_m: 0.0,
            board_l_m: 0.0,
            uslot: None,
        };
        let margin = DEFAULT_MARGIN_HEIGHTS * design.sub.height_m;
        let (cw, cl) = design.copper_extent();
        design.board_w_m = cw + 2.0 * margin;
        design.board_l_m = cl + 2.0 * margin;
        Ok(design)
    }

    pub fn with_uslot(mut self, uslot: Option<UslotSpec>) -> Self {
        self.uslot = uslot;
        self
    }

    pub fn with_board(mut self, board_w_m: f64, board_l_m: f64) -> Self {
        self.board_w_m = board_w_m;
        self.board_l_m = board_l_m;
        self
    }

    /// Width and length of the copper on the top layer.
    pub fn copper_extent(&self) -> (f64, f64) {
        let w = self
            .tlm
            .w_patch_m
            .max(self.qwt.width_m)
            .max(self.feed.width_m);
        let l = self.tlm.l_patch_m + self.qwt.length_m + self.feed.length_m;
        (w, l)
    }

    /// y range of the copper, `(bottom, top)`.
    fn copper_y(&self) -> (f64, f64) {
        let top = self.tlm.l_patch_m / 2.0;
        (top - self.copper_extent().1, top)
    }

    /// Board outline `(x0, x1, y0, y1)` in meters.
    pub fn board_bounds(&self) -> (f64, f64, f64, f64) {
        let (bot, top) = self.copper_y();
        let yc = 0.5 * (bot + top);
        (
            -self.board_w_m / 2.0,
            self.board_w_m / 2.0,
            yc - self.board_l_m / 2.0,
            yc + self.board_l_m / 2.0,
        )
    }
}

/// Emits patch, transformer, feed, ground and (optionally) the U-slot cutout.
pub fn build_layout(design: &PatchDesign) -> Result<Vec<Polygon>> {
    let tlm = &design.tlm;
    if design.qwt.width_m > tlm.w_patch_m {
        return Err(Error::Geometry(format!(
            "transformer wider than patch edge ({:.4} mm > {:.4} mm)",
            m_to_mm(design.qwt.width_m),
            m_to_mm(tlm.w_patch_m)
        )));
    }
    let (cw, _) = design.copper_extent();
    let (bot, top) = design.copper_y();
    let (bx0, bx1, by0, by1) = design.board_bounds();
    if !(bx1 > cw / 2.0 && by0 < bot && by1 > top) {
        return Err(Error::Geometry(
            "board does not enclose the copper with a positive margin".into(),
        ));
    }

    let half = |w: f64| w / 2.0;
    let y_patch = -tlm.l_patch_m / 2.0;
    let y_qwt = y_patch - design.qwt.length_m;
    let y_feed = y_qwt - design.feed.length_m;

    let mut polys = vec![
        Polygon::rect(
            Layer::Top,
            Kind::Copper,
            -half(tlm.w_patch_m),
            half(tlm.w_patch_m),
            y_patch,
            top,
        )?,
        Polygon::rect(
            Layer::Top,
            Kind::Copper,
            -half(design.qwt.width_m),
            half(design.qwt.width_m),
            y_qwt,
            y_patch,
        )?,
        Polygon::rect(
            Layer::Top,
            Kind::Copper,
            -half(design.feed.width_m),
            half(design.feed.width_m),
            y_feed,
            y_qwt,
        )?,
        Polygon::rect(Layer::Ground, Kind::Copper, bx0, bx1, by0, by1)?,
    ];

    if let Some(u) = &design.uslot {
        let outline = u.outline_m();
        let inside = outline
            .iter()
            .all(|&(x, y)| x > bx0 && x < bx1 && y > by0 && y < by1);
        if !inside {
            return Err(Error::Geometry("uslot exceeds ground".into()));
        }
        let verts = outline
            .into_iter()
            .map(|(x, y)| (m_to_mm(x), m_to_mm(y)))
            .collect();
        polys.push(Polygon::new(Layer::Ground, Kind::Cutout, verts)?);
    }
    Ok(polys)
}
