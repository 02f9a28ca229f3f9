//! Frequency sweeps of the fed patch and the metrics extracted from them.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::circuit::{input_admittance, input_impedance, s11, s11_db, vswr_from_mag, Abcd};
use crate::domain::{BandSpec, Substrate, SPEED_OF_LIGHT};
use crate::error::{Error, Result};
use crate::layout::PatchDesign;
use crate::numerics::{bisect, golden_section_min};
use crate::synthesis::TlmSolution;

/// Default −10 dB bandwidth threshold.
pub const DEFAULT_THRESHOLD_DB: f64 = -10.0;

/// Contiguous band below the threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Band {
    pub f_low_hz: f64,
    pub f_high_hz: f64,
    pub bw_hz: f64,
    /// The band runs into the lower sweep edge.
    pub clipped_low: bool,
    /// The band runs into the upper sweep edge.
    pub clipped_high: bool,
}

impl Band {
    pub fn clipped(&self) -> bool {
        self.clipped_low || self.clipped_high
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum BandResult {
    /// The response never drops below the threshold around resonance.
    NoBand,
    Band(Band),
}

impl BandResult {
    pub fn band(&self) -> Option<&Band> {
        match self {
            BandResult::Band(b) => Some(b),
            BandResult::NoBand => None,
        }
    }
}

/// Reflection coefficient over a frequency grid.
///
/// Singular points carry `None` in `gamma` and NaN in the derived sequences.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub freqs_hz: Vec<f64>,
    pub gamma: Vec<Option<Complex64>>,
    pub s11_db: Vec<f64>,
    pub vswr: Vec<f64>,
    pub f_res_hz: f64,
    pub band: BandResult,
    pub threshold_db: f64,
}

impl SweepResult {
    pub fn len(&self) -> usize {
        self.freqs_hz.len()
    }

    pub fn is_empty(&self) -> bool {
        self.freqs_hz.is_empty()
    }

    pub fn n_flagged(&self) -> usize {
        self.gamma.iter().filter(|g| g.is_none()).count()
    }
}

/// Reflection coefficient at the feed input of `design` at `f_hz`.
pub fn reflection_at(design: &PatchDesign, f_hz: f64) -> Result<Complex64> {
    let z_edge = input_impedance(&design.tlm, &design.sub, f_hz)?;
    let chain = Abcd::lossless_line(design.feed.z0_ohm, design.feed.electrical_length(f_hz)).then(
        &Abcd::lossless_line(design.qwt.z0_ohm, design.qwt.electrical_length(f_hz)),
    );
    s11(chain.input_impedance(z_edge)?, design.target.z0_ohm)
}

/// Sweeps `design` over `band` with the default −10 dB threshold.
pub fn sweep(design: &PatchDesign, band: &BandSpec) -> Result<SweepResult> {
    sweep_with_threshold(design, band, DEFAULT_THRESHOLD_DB)
}

pub fn sweep_with_threshold(
    design: &PatchDesign,
    band: &BandSpec,
    threshold_db: f64,
) -> Result<SweepResult> {
    let freqs_hz = band.frequencies();
    // indexed collect keeps ascending order for any thread count
    let gamma: Vec<Option<Complex64>> = freqs_hz
        .par_iter()
        .map(|&f| reflection_at(design, f).ok())
        .collect();
    if gamma.iter().all(Option::is_none) {
        return Err(Error::NoValidPoints);
    }
    let mags: Vec<Option<f64>> = gamma.iter().map(|g| g.map(|g| g.norm())).collect();
    let s11_db: Vec<f64> = gamma.iter().map(|g| g.map_or(f64::NAN, s11_db)).collect();
    let vswr: Vec<f64> = mags
        .iter()
        .map(|m| m.map_or(f64::NAN, vswr_from_mag))
        .collect();
    let f_res_hz = find_resonance(&freqs_hz, &mags, |f| {
        reflection_at(design, f).ok().map(|g| g.norm())
    })?;
    let band = bandwidth(&freqs_hz, &s11_db, f_res_hz, threshold_db);
    Ok(SweepResult {
        freqs_hz,
        gamma,
        s11_db,
        vswr,
        f_res_hz,
        band,
        threshold_db,
    })
}

/// Frequency of minimum |S11|.
///
/// Takes the grid minimum and refines it by golden-section search on `model`
/// inside the two neighbouring grid intervals. A minimum on a band edge is
/// not a resonance.
pub fn find_resonance<F>(freqs_hz: &[f64], mags: &[Option<f64>], model: F) -> Result<f64>
where
    F: Fn(f64) -> Option<f64>,
{
    if freqs_hz.len() != mags.len() {
        return Err(Error::invalid(
            "frequency and magnitude sequences differ in length",
        ));
    }
    if mags.iter().flatten().count() < 3 {
        return Err(Error::invalid(
            "resonance search needs at least 3 valid points",
        ));
    }
    let (i_min, _) = mags
        .iter()
        .enumerate()
        .filter_map(|(i, m)| m.map(|m| (i, m)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("at least three valid points");
    if i_min == 0 || i_min + 1 == freqs_hz.len() {
        return Err(Error::NotBracketed(format!(
            "resonance not bracketed: |S11| minimum at band edge {:.6} GHz",
            freqs_hz[i_min] / 1e9
        )));
    }
    let lo = freqs_hz[i_min - 1];
    let hi = freqs_hz[i_min + 1];
    let f = golden_section_min(
        |f| model(f).unwrap_or(f64::INFINITY),
        lo,
        hi,
        1e-9 * hi,
        200,
    );
    // keep the grid point if the refinement wandered onto a worse value
    match (model(f), mags[i_min]) {
        (Some(m), Some(g)) if m <= g => Ok(f),
        _ => Ok(freqs_hz[i_min]),
    }
}

/// Threshold band around `f_res_hz`, with linearly interpolated edges.
pub fn bandwidth(freqs_hz: &[f64], s11_db: &[f64], f_res_hz: f64, threshold_db: f64) -> BandResult {
    let n = freqs_hz.len();
    if n == 0 || n != s11_db.len() {
        return BandResult::NoBand;
    }
    let below = |i: usize| s11_db[i] < threshold_db;
    // grid point next to f_res with the lower response
    let upper = freqs_hz.partition_point(|&f| f < f_res_hz).min(n - 1);
    let lower = upper.saturating_sub(1);
    let centre = [lower, upper]
        .into_iter()
        .filter(|&i| !s11_db[i].is_nan())
        .min_by(|&a, &b| s11_db[a].total_cmp(&s11_db[b]));
    let Some(centre) = centre else {
        return BandResult::NoBand;
    };
    if !below(centre) {
        return BandResult::NoBand;
    }

    let crossing = |a: usize, b: usize| {
        let (fa, fb, sa, sb) = (freqs_hz[a], freqs_hz[b], s11_db[a], s11_db[b]);
        if sa.is_finite() && sb.is_finite() && sa != sb {
            fa + (threshold_db - sa) / (sb - sa) * (fb - fa)
        } else {
            fb
        }
    };

    let mut i = centre;
    while i > 0 && below(i - 1) {
        i -= 1;
    }
    let (f_low, clipped_low) = if i == 0 {
        (freqs_hz[0], true)
    } else if s11_db[i - 1].is_nan() {
        (freqs_hz[i], false)
    } else {
        (crossing(i - 1, i), false)
    };

    let mut j = centre;
    while j + 1 < n && below(j + 1) {
        j += 1;
    }
    let (f_high, clipped_high) = if j + 1 == n {
        (freqs_hz[n - 1], true)
    } else if s11_db[j + 1].is_nan() {
        (freqs_hz[j], false)
    } else {
        (crossing(j + 1, j), false)
    };

    BandResult::Band(Band {
        f_low_hz: f_low,
        f_high_hz: f_high,
        bw_hz: f_high - f_low,
        clipped_low,
        clipped_high,
    })
}

/// Transmission-line estimate of the fundamental resonance,
/// `c / (2·l_eff·sqrt(eps_eff))`.
pub fn resonance_estimate(tlm: &TlmSolution) -> f64 {
    SPEED_OF_LIGHT / (2.0 * tlm.l_eff_m * tlm.eps_eff.sqrt())
}

const RESONANCE_SCAN_POINTS: usize = 101;

/// Resonance of the bare patch: the zero of the edge susceptance where it
/// turns from inductive to capacitive, nearest the transmission-line estimate.
pub fn patch_resonance(tlm: &TlmSolution, sub: &Substrate) -> Result<f64> {
    let f_est = resonance_estimate(tlm);
    let (lo, hi) = (0.6 * f_est, 1.6 * f_est);
    let b = |f: f64| input_admittance(tlm, sub, f).map(|y| y.im);
    let step = (hi - lo) / (RESONANCE_SCAN_POINTS - 1) as f64;
    let mut best: Option<(f64, f64)> = None;
    let mut f_prev = lo;
    let mut b_prev = b(lo)?;
    for i in 1..RESONANCE_SCAN_POINTS {
        let f = lo + step * i as f64;
        let b_here = b(f)?;
        if b_prev < 0.0 && b_here >= 0.0 {
            let dist = (0.5 * (f + f_prev) - f_est).abs();
            if best.is_none_or(|(_, d)| dist < d) {
                best = Some((f_prev, dist));
            }
        }
        f_prev = f;
        b_prev = b_here;
    }
    let Some((f_lo, _)) = best else {
        return Err(Error::NotBracketed(format!(
            "no patch resonance between {:.3} and {:.3} GHz",
            lo / 1e9,
            hi / 1e9
        )));
    };
    bisect(b, f_lo, f_lo + step, 1e-3, 200)
}

/// Edge resistance of the bare patch at its resonance, `(f_res, R)`.
pub fn resonant_resistance(tlm: &TlmSolution, sub: &Substrate) -> Result<(f64, f64)> {
    let f = patch_resonance(tlm, sub)?;
    let y = input_admittance(tlm, sub, f)?;
    if y.re <= 0.0 {
        return Err(Error::Singular(format!(
            "non-positive edge conductance at {f} Hz"
        )));
    }
    Ok((f, 1.0 / y.re))
}
