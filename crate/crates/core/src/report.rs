//! Text serializers: Touchstone one-port, CSV sweeps and patterns, the
//! comparison table and the design report. All output uses `\n` and
//! locale-independent formatting.

use std::fmt::Write;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::layout::PatchDesign;
use crate::network::{reflection_at, s11_db, vswr, BandResult, SweepResult};
use crate::radiation::PatternGrid;
use crate::synthesis::TlmSolution;

fn fixed(x: f64, decimals: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let s = format!("{x:.decimals$}");
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

/// Touchstone data value. Fixed nine decimals for zero and magnitudes of at
/// least one, otherwise scientific with eleven significant digits, so every
/// value survives a round trip within 1e-9 relative.
fn ts_number(x: f64) -> String {
    if x == 0.0 || x.abs() >= 1.0 {
        fixed(x, 9)
    } else {
        format!("{x:.10e}")
    }
}

/// One-port Touchstone v1 with real/imaginary data in GHz. Points the model
/// flagged are left out and listed in a comment.
pub fn write_touchstone(sweep: &SweepResult, z0_ref: f64) -> Result<String> {
    if !(z0_ref.is_finite() && z0_ref > 0.0) {
        return Err(Error::invalid(format!(
            "reference impedance must be positive (got {z0_ref})"
        )));
    }
    if sweep.gamma.len() != sweep.freqs_hz.len() {
        return Err(Error::invalid("sweep frequency and data lengths differ"));
    }
    if sweep
        .freqs_hz
        .windows(2)
        .any(|w| w[1].is_nan() || w[1] <= w[0])
    {
        return Err(Error::invalid(
            "Touchstone frequencies must be strictly ascending",
        ));
    }
    let mut out = String::new();
    out.push_str("! one-port reflection, transmission-line circuit model\n");
    let _ = writeln!(out, "! points: {}", sweep.len());
    for (f, g) in sweep.freqs_hz.iter().zip(&sweep.gamma) {
        if g.is_none() {
            let _ = writeln!(out, "! skipped {} GHz: model undefined", ts_number(f / 1e9));
        }
    }
    let _ = writeln!(out, "# GHz S RI R {z0_ref}");
    for (f, g) in sweep.freqs_hz.iter().zip(&sweep.gamma) {
        if let Some(g) = g {
            let _ = writeln!(
                out,
                "{} {} {}",
                ts_number(f / 1e9),
                ts_number(g.re),
                ts_number(g.im)
            );
        }
    }
    Ok(out)
}

/// Parsed one-port Touchstone data, frequencies in Hz.
#[derive(Debug, Clone, PartialEq)]
pub struct OnePort {
    pub z0_ref: f64,
    pub freqs_hz: Vec<f64>,
    pub s11: Vec<Complex64>,
}

/// Reads RI or MA one-port files in Hz, kHz, MHz or GHz.
pub fn parse_touchstone(text: &str) -> Result<OnePort> {
    let mut scale = 1e9;
    let mut ma = false;
    let mut z0_ref = 50.0;
    let mut seen_option = false;
    let mut freqs_hz = Vec::new();
    let mut s11 = Vec::new();
    let num = |s: &str| {
        s.parse::<f64>()
            .map_err(|_| Error::Parse(format!("bad number {s:?}")))
    };

    for line in text.lines() {
        let line = line.split('!').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(opts) = line.strip_prefix('#') {
            if seen_option {
                return Err(Error::Parse("more than one option line".into()));
            }
            seen_option = true;
            let toks: Vec<String> = opts
                .split_whitespace()
                .map(|t| t.to_ascii_uppercase())
                .collect();
            let mut i = 0;
            while i < toks.len() {
                match toks[i].as_str() {
                    "HZ" => scale = 1.0,
                    "KHZ" => scale = 1e3,
                    "MHZ" => scale = 1e6,
                    "GHZ" => scale = 1e9,
                    "S" => {}
                    "RI" => ma = false,
                    "MA" => ma = true,
                    "R" => {
                        let v = toks
                            .get(i + 1)
                            .ok_or_else(|| Error::Parse("R without value".into()))?;
                        z0_ref = num(v)?;
                        i += 1;
                    }
                    other => return Err(Error::Parse(format!("unsupported option {other:?}"))),
                }
                i += 1;
            }
            continue;
        }
        let vals: Vec<f64> = line.split_whitespace().map(num).collect::<Result<_>>()?;
        if vals.len() != 3 {
            return Err(Error::Parse(format!(
                "expected 3 values per line, got {}",
                vals.len()
            )));
        }
        freqs_hz.push(vals[0] * scale);
        s11.push(if ma {
            Complex64::from_polar(vals[1], vals[2].to_radians())
        } else {
            Complex64::new(vals[1], vals[2])
        });
    }
    if !seen_option {
        return Err(Error::Parse("missing option line".into()));
    }
    Ok(OnePort {
        z0_ref,
        freqs_hz,
        s11,
    })
}

/// `freq_hz,s11_db,vswr`, one row per sweep point.
pub fn write_sweep_csv(sweep: &SweepResult) -> String {
    let mut out = String::from("freq_hz,s11_db,vswr\n");
    for i in 0..sweep.len() {
        let _ = writeln!(
            out,
            "{},{},{}",
            fixed(sweep.freqs_hz[i], 1),
            fixed(sweep.s11_db[i], 6),
            fixed(sweep.vswr[i], 6)
        );
    }
    out
}

fn db_rel(u: f64, u_ref: f64) -> f64 {
    if u <= 0.0 {
        f64::NEG_INFINITY
    } else {
        10.0 * (u / u_ref).log10()
    }
}

/// `theta_deg,e_plane_db,h_plane_db` from the φ = 0° and φ = 90° cuts,
/// each normalized to broadside.
pub fn write_pattern_csv(grid: &PatternGrid) -> Result<String> {
    let e = grid
        .cut(0.0)
        .ok_or_else(|| Error::invalid("pattern grid has no phi = 0 cut"))?;
    let h = grid
        .cut(90.0)
        .ok_or_else(|| Error::invalid("pattern grid has no phi = 90 cut"))?;
    if !(e[0] > 0.0 && h[0] > 0.0) {
        return Err(Error::invalid("pattern has a broadside null"));
    }
    let mut out = String::from("theta_deg,e_plane_db,h_plane_db\n");
    for (i, t) in grid.theta_deg.iter().enumerate() {
        let _ = writeln!(
            out,
            "{},{},{}",
            fixed(*t, 3),
            fixed(db_rel(e[i], e[0]), 6),
            fixed(db_rel(h[i], h[0]), 6)
        );
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub label: String,
    pub s11_db: f64,
    pub bandwidth_ghz: f64,
    pub gain_dbi: f64,
}

impl ComparisonRow {
    pub fn new(
        label: impl Into<String>,
        s11_db: f64,
        bandwidth_ghz: f64,
        gain_dbi: f64,
    ) -> Result<Self> {
        if !(s11_db.is_finite() && bandwidth_ghz.is_finite() && gain_dbi.is_finite()) {
            return Err(Error::invalid("comparison values must be finite"));
        }
        Ok(ComparisonRow {
            label: label.into(),
            s11_db,
            bandwidth_ghz,
            gain_dbi,
        })
    }
}

pub const MODEL_ROW_LABEL: &str = "TL-model estimate";

/// Published 28 GHz results: (label, S11 dB, bandwidth GHz, gain dBi).
/// Full-wave and measured figures, never recomputed here.
// The proposed design's bandwidth is tabulated as 2.02 GHz while its results
// text quotes 2.026 GHz; the tabulated figure is kept.
pub const REFERENCE_ROWS: [(&str, f64, f64, f64); 4] = [
    ("Proposed (U-slot, full-wave)", -21.4, 2.02, 8.19),
    ("Gaid 2024", -45.0, 1.43, 8.1),
    ("Farahat & Hussein 2022", -34.5, 1.23, 6.6),
    ("Raheel 2021", -25.0, 1.0, 7.1),
];

/// Plain-text table of `own` plus, optionally, the published rows.
pub fn comparison_table(own: &ComparisonRow, include_reference_rows: bool) -> String {
    let mut rows = vec![own.clone()];
    if include_reference_rows {
        rows.extend(REFERENCE_ROWS.iter().map(|&(l, s, b, g)| ComparisonRow {
            label: l.to_string(),
            s11_db: s,
            bandwidth_ghz: b,
            gain_dbi: g,
        }));
    }
    let width = rows.iter().map(|r| r.label.len()).max().unwrap_or(0).max(6);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<width$}  {:>9}  {:>8}  {:>9}",
        "Design", "S11 (dB)", "BW (GHz)", "Gain (dBi)"
    );
    let _ = writeln!(out, "{}", "-".repeat(width + 33));
    for r in rows {
        let _ = writeln!(
            out,
            "{:<width$}  {:>9}  {:>8}  {:>10}",
            r.label,
            fixed(r.s11_db, 2),
            fixed(r.bandwidth_ghz, 3),
            fixed(r.gain_dbi, 2)
        );
    }
    out
}

/// Headline figures of an analyzed design.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelMetrics {
    pub f_res_hz: f64,
    pub s11_db_at_res: f64,
    pub vswr_at_res: f64,
    pub band: BandResult,
    pub d0_dbi: f64,
    pub gain_dbi: f64,
    pub efficiency: f64,
}

impl ModelMetrics {
    pub fn evaluate(design: &PatchDesign, sweep: &SweepResult, grid: &PatternGrid) -> Result<Self> {
        let g = reflection_at(design, sweep.f_res_hz)?;
        Ok(ModelMetrics {
            f_res_hz: sweep.f_res_hz,
            s11_db_at_res: s11_db(g),
            vswr_at_res: vswr(g),
            band: sweep.band,
            d0_dbi: grid.d0_dbi,
            gain_dbi: grid.gain_dbi,
            efficiency: grid.efficiency,
        })
    }

    /// Row for [`comparison_table`]; a missing band counts as zero width.
    pub fn comparison_row(&self) -> Result<ComparisonRow> {
        let bw = self.band.band().map_or(0.0, |b| b.bw_hz / 1e9);
        ComparisonRow::new(MODEL_ROW_LABEL, self.s11_db_at_res, bw, self.gain_dbi)
    }
}

fn mm(m: f64) -> String {
    format!("{} mm", fixed(m * 1e3, 4))
}

fn line(out: &mut String, label: &str, value: impl AsRef<str>) {
    let _ = writeln!(out, "  {label:<28}{}", value.as_ref());
}

/// Human-readable report. `closed_form` is the untuned synthesis result;
/// `design` is the tuned and matched board.
pub fn design_report(
    closed_form: &TlmSolution,
    design: &PatchDesign,
    metrics: &ModelMetrics,
) -> String {
    let mut out = String::new();
    let t = &design.target;
    let s = &design.sub;
    out.push_str("Microstrip patch design report\n\n");

    out.push_str("Inputs\n");
    line(
        &mut out,
        "design frequency",
        format!("{} GHz", fixed(t.f_r_hz / 1e9, 6)),
    );
    line(
        &mut out,
        "reference impedance",
        format!("{} ohm", fixed(t.z0_ohm, 3)),
    );
    line(&mut out, "substrate", &s.name);
    line(&mut out, "relative permittivity", fixed(s.eps_r, 4));
    line(&mut out, "height", mm(s.height_m));
    line(&mut out, "loss tangent", fixed(s.loss_tangent, 5));

    out.push_str("\nClosed-form synthesis\n");
    line(&mut out, "patch width W", mm(closed_form.w_patch_m));
    line(
        &mut out,
        "effective permittivity",
        fixed(closed_form.eps_eff, 6),
    );
    line(&mut out, "length extension dL", mm(closed_form.delta_l_m));
    line(&mut out, "effective length", mm(closed_form.l_eff_m));
    line(&mut out, "patch length L", mm(closed_form.l_patch_m));
    line(
        &mut out,
        "edge impedance",
        format!("{} ohm", fixed(closed_form.z_edge_ohm, 3)),
    );
    line(
        &mut out,
        "transformer impedance",
        format!("{} ohm", fixed(closed_form.z_qwt_ohm, 3)),
    );

    out.push_str("\nTuned geometry\n");
    line(&mut out, "patch width W", mm(design.tlm.w_patch_m));
    line(&mut out, "patch length L", mm(design.tlm.l_patch_m));
    line(
        &mut out,
        "transformer impedance",
        format!("{} ohm", fixed(design.qwt.z0_ohm, 3)),
    );
    line(&mut out, "transformer width", mm(design.qwt.width_m));
    line(&mut out, "transformer length", mm(design.qwt.length_m));
    line(
        &mut out,
        "feed impedance",
        format!("{} ohm", fixed(design.feed.z0_ohm, 3)),
    );
    line(&mut out, "feed width", mm(design.feed.width_m));
    line(&mut out, "feed length", mm(design.feed.length_m));
    line(
        &mut out,
        "board",
        format!("{} x {}", mm(design.board_w_m), mm(design.board_l_m)),
    );
    match &design.uslot {
        Some(u) => line(
            &mut out,
            "ground U-slot",
            format!(
                "{} x {}, arms {} (placeholder)",
                mm(u.outer_w_m),
                mm(u.outer_l_m),
                mm(u.arm_w_m)
            ),
        ),
        None => line(&mut out, "ground U-slot", "none"),
    }

    out.push_str("\nModel metrics\n");
    line(
        &mut out,
        "resonance",
        format!("{} GHz", fixed(metrics.f_res_hz / 1e9, 6)),
    );
    line(
        &mut out,
        "S11 at resonance",
        format!("{} dB", fixed(metrics.s11_db_at_res, 3)),
    );
    line(&mut out, "VSWR at resonance", fixed(metrics.vswr_at_res, 4));
    match metrics.band.band() {
        Some(b) => {
            let mut v = format!(
                "{} to {} GHz ({} GHz)",
                fixed(b.f_low_hz / 1e9, 4),
                fixed(b.f_high_hz / 1e9, 4),
                fixed(b.bw_hz / 1e9, 4)
            );
            if b.clipped() {
                v.push_str(", clipped by sweep edge");
            }
            line(&mut out, "-10 dB band", v);
        }
        None => line(&mut out, "-10 dB band", "none"),
    }
    line(
        &mut out,
        "directivity",
        format!("{} dBi", fixed(metrics.d0_dbi, 3)),
    );
    line(
        &mut out,
        "gain",
        format!("{} dBi", fixed(metrics.gain_dbi, 3)),
    );

    out.push_str("\nAssumptions\n");
    let _ = writeln!(
        out,
        "  - Radiation efficiency {} is assumed, not computed.",
        fixed(metrics.efficiency, 3)
    );
    out.push_str("  - Transmission-line circuit model with two radiating slots; figures are model estimates, not full-wave results.\n");
    out.push_str("  - Conductor, dielectric and surface-wave losses are neglected; the loss tangent is recorded only.\n");
    out.push_str("  - The ground-plane U-slot has placeholder dimensions and does not enter the circuit or pattern model.\n");
    out.push_str("  - The pattern uses the two-slot array factor over an infinite ground plane.\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::BandResult;
    use crate::radiation::{PatternGrid, Support};

    fn sweep_of(freqs: Vec<f64>, gamma: Vec<Option<Complex64>>) -> SweepResult {
        let s11: Vec<f64> = gamma.iter().map(|g| g.map_or(f64::NAN, s11_db)).collect();
        let v: Vec<f64> = gamma.iter().map(|g| g.map_or(f64::NAN, vswr)).collect();
        SweepResult {
            freqs_hz: freqs,
            gamma,
            s11_db: s11,
            vswr: v,
            f_res_hz: 28e9,
            band: BandResult::NoBand,
            threshold_db: -10.0,
        }
    }

    #[test]
    fn touchstone_two_points() {
        let s = sweep_of(
            vec![27e9, 28e9],
            vec![
                Some(Complex64::new(0.5, -0.25)),
                Some(Complex64::new(0.0, 0.0)),
            ],
        );
        let doc = write_touchstone(&s, 50.0).unwrap();
        let lines: Vec<&str> = doc.lines().collect();
        assert_eq!(lines.iter().filter(|l| l.starts_with('#')).count(), 1);
        assert!(lines.contains(&"# GHz S RI R 50"));
        let data: Vec<&&str> = lines
            .iter()
            .filter(|l| !l.starts_with(['!', '#']))
            .collect();
        assert_eq!(data.len(), 2);
        assert_eq!(*data[1], "28.000000000 0.000000000 0.000000000");
    }

    #[test]
    fn touchstone_rejects_unsorted() {
        let g = Some(Complex64::new(0.1, 0.1));
        assert!(write_touchstone(&sweep_of(vec![28e9, 27e9], vec![g, g]), 50.0).is_err());
        assert!(write_touchstone(&sweep_of(vec![28e9, 28e9], vec![g, g]), 50.0).is_err());
    }

    #[test]
    fn touchstone_round_trip() {
        let freqs: Vec<f64> = (0..50)
            .map(|i| 26.5e9 + 61_234_567.891 * i as f64)
            .collect();
        let gamma: Vec<Option<Complex64>> = (0..50)
            .map(|i| {
                let x = i as f64 * 0.37;
                Some(Complex64::new(
                    0.93 * x.cos() * 1e-3f64.powf(i as f64 / 49.0),
                    -0.71 * x.sin(),
                ))
            })
            .collect();
        let s = sweep_of(freqs.clone(), gamma.clone());
        let p = parse_touchstone(&write_touchstone(&s, 75.0).unwrap()).unwrap();
        assert_eq!(p.z0_ref, 75.0);
        assert_eq!(p.freqs_hz.len(), 50);
        let close = |a: f64, b: f64| a == b || ((a - b) / b).abs() <= 1e-9;
        for i in 0..50 {
            let g = gamma[i].unwrap();
            assert!(close(p.freqs_hz[i], freqs[i]));
            assert!(close(p.s11[i].re, g.re), "{} {}", p.s11[i].re, g.re);
            assert!(close(p.s11[i].im, g.im));
        }
    }

    #[test]
    fn touchstone_skips_flagged_points() {
        let s = sweep_of(
            vec![1e9, 2e9, 3e9],
            vec![
                Some(Complex64::new(0.1, 0.0)),
                None,
                Some(Complex64::new(0.2, 0.0)),
            ],
        );
        let doc = write_touchstone(&s, 50.0).unwrap();
        assert!(doc.contains("! skipped 2.000000000 GHz"));
        assert_eq!(parse_touchstone(&doc).unwrap().s11.len(), 2);
    }

    #[test]
    fn touchstone_parse_errors() {
        assert!(parse_touchstone("1 2 3\n").is_err());
        assert!(parse_touchstone("# GHz S RI R 50\n1 2\n").is_err());
        assert!(parse_touchstone("# GHz Y RI R 50\n").is_err());
        let p = parse_touchstone("# MHz S MA R 50\n1000 0.5 90\n").unwrap();
        assert_eq!(p.freqs_hz[0], 1e9);
        assert!((p.s11[0] - Complex64::new(0.0, 0.5)).norm() < 1e-15);
    }

    #[test]
    fn sweep_csv_shape_and_sentinels() {
        let s = sweep_of(
            vec![1e9, 2e9, 3e9],
            vec![
                Some(Complex64::new(0.0, 0.0)),
                Some(Complex64::new(1.0, 0.0)),
                None,
            ],
        );
        let csv = write_sweep_csv(&s);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[0], "freq_hz,s11_db,vswr");
        assert_eq!(lines[1], "1000000000.0,-inf,1.000000");
        assert_eq!(lines[2], "2000000000.0,0.000000,inf");
        assert_eq!(lines[3], "3000000000.0,nan,nan");
    }

    #[test]
    fn pattern_csv_normalized_with_null() {
        let g = PatternGrid::from_fn(Support::Hemisphere, 91, 361, 1.0, |t, p| {
            let (st, sp) = (t.sin(), p.sin());
            0.5 * (1.0 - st * st * sp * sp)
        })
        .unwrap();
        let csv = write_pattern_csv(&g).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 92);
        assert_eq!(lines[1], "0.000,0.000000,0.000000");
        assert_eq!(lines[91], "90.000,0.000000,-inf");
    }

    #[test]
    fn comparison_rows() {
        let own = ComparisonRow::new(MODEL_ROW_LABEL, -35.0, 1.2, 7.3).unwrap();
        let with = comparison_table(&own, true);
        let without = comparison_table(&own, false);
        assert_eq!(with.lines().count(), 2 + 5);
        assert_eq!(without.lines().count(), 2 + 1);
        assert!(without.contains("TL-model estimate"));
        assert!(with.contains("-21.40") && with.contains("2.020") && with.contains("8.19"));
        assert!(with.contains("Raheel 2021"));
        assert!(ComparisonRow::new("x", f64::NAN, 1.0, 1.0).is_err());
    }

    #[test]
    fn fixed_formatting() {
        assert_eq!(fixed(-0.0000001, 6), "0.000000");
        assert_eq!(fixed(-1.5, 2), "-1.50");
        assert_eq!(fixed(f64::NEG_INFINITY, 2), "-inf");
        assert_eq!(ts_number(1e-3), "1.0000000000e-3");
        assert_eq!(ts_number(-28.0), "-28.000000000");
    }
}
