//! Design refinement against the circuit model.
//!
//! The patch length is bisected until the bare patch resonates at the target,
//! the transformer is re-derived from the model's resonant edge resistance,
//! and fabrication spread is estimated by Monte Carlo.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::domain::{DesignTarget, Substrate};
use crate::error::{Error, Result};
use crate::layout::PatchDesign;
use crate::mstripline::{qwt_section, LineGeometry};
use crate::network::{patch_resonance, reflection_at, resonant_resistance};
use crate::numerics::NeumaierSum;
use crate::synthesis::{qwt_impedance, synthesize_patch, TlmSolution};

/// Resonance tolerance of [`tune_length`].
pub const TUNE_TOL_HZ: f64 = 1e3;
pub const TUNE_MAX_STEPS: usize = 100;
/// Relative half-width of the length bracket searched by [`tune_length`].
pub const TUNE_BRACKET: f64 = 0.2;
/// Gaussian draws beyond this many sigma are redrawn.
pub const TRUNCATE_SIGMA: f64 = 4.0;
/// Generator used by [`tolerance_mc`].
pub const MC_GENERATOR: &str =
    "ChaCha8 (rand_chacha): key from seed_from_u64(seed), stream = sample index";

/// Adjusts the physical patch length so the bare patch resonates at
/// `target.f_r_hz`. Only `l_patch_m` and `l_eff_m` change.
pub fn tune_length(
    target: &DesignTarget,
    sub: &Substrate,
    tlm: &TlmSolution,
) -> Result<TlmSolution> {
    let l0 = tlm.l_patch_m;
    let f_of = |l: f64| patch_resonance(&tlm.with_patch_length(l), sub);

    let f0 = f_of(l0)?;
    if (f0 - target.f_r_hz).abs() <= TUNE_TOL_HZ {
        return Ok(*tlm);
    }
    let mut short = (1.0 - TUNE_BRACKET) * l0;
    let mut long = (1.0 + TUNE_BRACKET) * l0;
    let f_short = f_of(short)?;
    let f_long = f_of(long)?;
    if !(f_short > f0 && f0 > f_long) {
        return Err(Error::NotBracketed(format!(
            "resonance is not decreasing in patch length around {l0:.6e} m \
             ({f_short:.6e}, {f0:.6e}, {f_long:.6e} Hz)"
        )));
    }
    if !(f_short > target.f_r_hz && target.f_r_hz > f_long) {
        return Err(Error::NotBracketed(format!(
            "target {:.6} GHz outside the tunable range [{:.6}, {:.6}] GHz",
            target.f_r_hz / 1e9,
            f_long / 1e9,
            f_short / 1e9
        )));
    }

    for _ in 0..TUNE_MAX_STEPS {
        let mid = 0.5 * (short + long);
        let f = f_of(mid)?;
        if (f - target.f_r_hz).abs() <= TUNE_TOL_HZ {
            return Ok(tlm.with_patch_length(mid));
        }
        if f > target.f_r_hz {
            short = mid;
        } else {
            long = mid;
        }
    }
    Err(Error::NoConvergence(format!(
        "length tuning did not reach {TUNE_TOL_HZ} Hz in {TUNE_MAX_STEPS} steps"
    )))
}

/// Transformer impedance that matches a real resistance `r_model` to `z0`.
pub fn matched_impedance(z0_ohm: f64, r_model_ohm: f64) -> Result<f64> {
    if !(r_model_ohm.is_finite() && r_model_ohm > 0.0) {
        return Err(Error::invalid(format!(
            "resonant resistance must be positive (got {r_model_ohm})"
        )));
    }
    qwt_impedance(z0_ohm, r_model_ohm)
}

/// Quarter-wave match derived from the circuit model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QwtMatch {
    pub f_res_hz: f64,
    pub r_model_ohm: f64,
    pub z_qwt_ohm: f64,
    pub qwt: LineGeometry,
}

/// Sizes the transformer from the edge resistance the model shows at
/// resonance, in place of the closed-form edge impedance.
pub fn match_qwt(target: &DesignTarget, sub: &Substrate, tlm: &TlmSolution) -> Result<QwtMatch> {
    let (f_res, r_model) = resonant_resistance(tlm, sub)?;
    let z_qwt = matched_impedance(target.z0_ohm, r_model)?;
    let qwt = qwt_section(z_qwt, target.f_r_hz, sub)?;
    Ok(QwtMatch {
        f_res_hz: f_res,
        r_model_ohm: r_model,
        z_qwt_ohm: z_qwt,
        qwt,
    })
}

/// Output of the synthesize → tune → match flow.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TunedDesign {
    /// Closed-form solution before tuning.
    pub initial: TlmSolution,
    pub matching: QwtMatch,
    pub design: PatchDesign,
}

/// Synthesizes, tunes the length, matches the transformer and assembles the
/// board.
pub fn design_pipeline(target: &DesignTarget, sub: &Substrate) -> Result<TunedDesign> {
    let initial = synthesize_patch(target, sub)?;
    let tuned = tune_length(target, sub, &initial).map_err(|e| e.at_stage("tune_length"))?;
    let matching = match_qwt(target, sub, &tuned).map_err(|e| e.at_stage("match_qwt"))?;
    let design = PatchDesign::new(*target, sub.clone(), tuned, matching.qwt)?;
    Ok(TunedDesign {
        initial,
        matching,
        design,
    })
}

/// Monte Carlo tolerance specification. Tolerances are relative 1-sigma.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ToleranceSpec {
    pub rel_tol_dims: f64,
    pub rel_tol_eps: f64,
    pub n_samples: usize,
    pub seed: u64,
}

impl ToleranceSpec {
    pub fn new(rel_tol_dims: f64, rel_tol_eps: f64, n_samples: usize, seed: u64) -> Result<Self> {
        if !(rel_tol_dims.is_finite() && rel_tol_dims >= 0.0) {
            return Err(Error::invalid(format!(
                "dimension tolerance must be >= 0 (got {rel_tol_dims})"
            )));
        }
        if !(rel_tol_eps.is_finite() && rel_tol_eps >= 0.0) {
            return Err(Error::invalid(format!(
                "permittivity tolerance must be >= 0 (got {rel_tol_eps})"
            )));
        }
        if n_samples == 0 {
            return Err(Error::invalid("tolerance analysis needs at least 1 sample"));
        }
        Ok(ToleranceSpec {
            rel_tol_dims,
            rel_tol_eps,
            n_samples,
            seed,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
}

impl Summary {
    /// Shifted two-pass statistics; identical inputs give `std == 0` and
    /// `mean` equal to the common value exactly.
    fn of(xs: &[f64]) -> Self {
        let shift = xs[0];
        let n = xs.len() as f64;
        let dev: NeumaierSum = xs.iter().map(|x| x - shift).collect();
        let mean_dev = dev.sum() / n;
        let ss: NeumaierSum = xs.iter().map(|x| (x - shift - mean_dev).powi(2)).collect();
        let std = if xs.len() > 1 {
            (ss.sum() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Summary {
            mean: shift + mean_dev,
            std,
            min: xs.iter().cloned().fold(f64::INFINITY, f64::min),
            max: xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ToleranceStats {
    pub spec: ToleranceSpec,
    pub generator: &'static str,
    pub n_ok: usize,
    pub n_failed: usize,
    /// Bare-patch resonance of each sample.
    pub f_res_hz: Summary,
    /// |S11| at the nominal design frequency.
    pub s11_mag_at_fr: Summary,
}

fn truncated_normal(rng: &mut ChaCha8Rng) -> f64 {
    loop {
        let z: f64 = StandardNormal.sample(rng);
        if z.abs() <= TRUNCATE_SIGMA {
            return z;
        }
    }
}

/// Relative deviations `(width, length, eps_r)` of sample `index`.
pub fn sample_deviations(spec: &ToleranceSpec, index: u64) -> (f64, f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(index);
    let zw = truncated_normal(&mut rng);
    let zl = truncated_normal(&mut rng);
    let ze = truncated_normal(&mut rng);
    (
        spec.rel_tol_dims * zw,
        spec.rel_tol_dims * zl,
        spec.rel_tol_eps * ze,
    )
}

/// The nominal design with patch width, patch length and substrate
/// permittivity scaled by `(1 + d)`. Feed and transformer keep their drawn
/// widths and lengths; their impedances follow the new substrate.
pub fn perturb(design: &PatchDesign, dw: f64, dl: f64, de: f64) -> Result<PatchDesign> {
    if dw == 0.0 && dl == 0.0 && de == 0.0 {
        return Ok(design.clone());
    }
    let sub =
        crate::domain::validate_substrate(design.sub.with_eps_r(design.sub.eps_r * (1.0 + de)))?;
    let tlm = TlmSolution::from_dimensions(
        &design.target,
        &sub,
        design.tlm.w_patch_m * (1.0 + dw),
        design.tlm.l_patch_m * (1.0 + dl),
    )?;
    let qwt = LineGeometry::from_width(design.qwt.width_m, design.qwt.length_m, &sub)?;
    let feed = LineGeometry::from_width(design.feed.width_m, design.feed.length_m, &sub)?;
    Ok(PatchDesign {
        sub,
        tlm,
        qwt,
        feed,
        ..design.clone()
    })
}

fn evaluate_sample(design: &PatchDesign, spec: &ToleranceSpec, index: u64) -> Result<(f64, f64)> {
    let (dw, dl, de) = sample_deviations(spec, index);
    let d = perturb(design, dw, dl, de)?;
    let f_res = patch_resonance(&d.tlm, &d.sub)?;
    let gamma = reflection_at(&d, design.target.f_r_hz)?;
    Ok((f_res, gamma.norm()))
}

/// Monte Carlo spread of resonance and match. Samples run in parallel; each
/// draws from its own counter-based stream, so results do not depend on the
/// thread count.
pub fn tolerance_mc(design: &PatchDesign, spec: &ToleranceSpec) -> Result<ToleranceStats> {
    let results: Vec<Option<(f64, f64)>> = (0..spec.n_samples as u64)
        .into_par_iter()
        .map(|i| evaluate_sample(design, spec, i).ok())
        .collect();
    let ok: Vec<(f64, f64)> = results.iter().flatten().copied().collect();
    if ok.is_empty() {
        return Err(Error::AllSamplesFailed(spec.n_samples));
    }
    let f: Vec<f64> = ok.iter().map(|r| r.0).collect();
    let s: Vec<f64> = ok.iter().map(|r| r.1).collect();
    Ok(ToleranceStats {
        spec: *spec,
        generator: MC_GENERATOR,
        n_ok: ok.len(),
        n_failed: spec.n_samples - ok.len(),
        f_res_hz: Summary::of(&f),
        s11_mag_at_fr: Summary::of(&s),
    })
}
