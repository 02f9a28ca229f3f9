//! Closed-form transmission-line design of a rectangular patch.
//!
//! The chain runs width → effective permittivity → fringing extension →
//! effective and physical length → radiating-edge impedance → quarter-wave
//! transformer impedance.
//!
//! The effective permittivity uses the standard Hammerstad form with exponent
//! −1/2 on `(1 + 12h/w)`. Some printed versions of this design procedure carry
//! exponent −1, which for the 28 GHz RT5880LZ reference design yields a
//! 3.38 mm patch instead of the reported 3.2 mm; the −1/2 exponent reproduces
//! 3.25 mm and is what this module implements.

use serde::{Deserialize, Serialize};

use crate::domain::{DesignTarget, Substrate, SPEED_OF_LIGHT};
use crate::error::{Error, Result};

/// Result of the transmission-line synthesis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TlmSolution {
    pub w_patch_m: f64,
    pub eps_eff: f64,
    pub delta_l_m: f64,
    pub l_eff_m: f64,
    pub l_patch_m: f64,
    pub z_edge_ohm: f64,
    pub z_qwt_ohm: f64,
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::invalid(format!("{name} must be positive (got {v})")))
    }
}

fn permittivity(eps_r: f64) -> Result<f64> {
    if eps_r.is_finite() && eps_r >= 1.0 {
        Ok(eps_r)
    } else {
        Err(Error::invalid(format!("eps_r below 1 (got {eps_r})")))
    }
}

/// Patch width for efficient radiation, `c / (2 f) · sqrt(2 / (eps_r + 1))`.
pub fn patch_width(f_r_hz: f64, eps_r: f64) -> Result<f64> {
    positive("resonant frequency", f_r_hz)?;
    permittivity(eps_r)?;
    Ok(SPEED_OF_LIGHT / (2.0 * f_r_hz) * (2.0 / (eps_r + 1.0)).sqrt())
}

/// Quasi-static effective permittivity of a microstrip of width `w_m` on a
/// substrate of height `h_m`. Always within `[1, eps_r]`.
pub fn effective_permittivity(eps_r: f64, h_m: f64, w_m: f64) -> Result<f64> {
    permittivity(eps_r)?;
    positive("substrate height", h_m)?;
    positive("width", w_m)?;
    let eps = 0.5 * (eps_r + 1.0) + 0.5 * (eps_r - 1.0) / (1.0 + 12.0 * h_m / w_m).sqrt();
    Ok(eps.clamp(1.0, eps_r))
}

/// Fringing extension of the patch length at each radiating edge.
pub fn length_extension(eps_eff: f64, h_m: f64, w_m: f64) -> Result<f64> {
    if !eps_eff.is_finite() || eps_eff <= 0.258 {
        return Err(Error::invalid(format!(
            "eps_eff must exceed 0.258 for the fringing formula (got {eps_eff})"
        )));
    }
    positive("substrate height", h_m)?;
    positive("width", w_m)?;
    let u = w_m / h_m;
    Ok(0.412 * h_m * ((eps_eff + 0.3) * (u + 0.264)) / ((eps_eff - 0.258) * (u + 0.8)))
}

/// Effective and physical patch length, `(l_eff, l_patch)`.
pub fn patch_length(f_r_hz: f64, eps_eff: f64, delta_l_m: f64) -> Result<(f64, f64)> {
    positive("resonant frequency", f_r_hz)?;
    if !eps_eff.is_finite() || eps_eff < 1.0 {
        return Err(Error::invalid(format!("eps_eff below 1 (got {eps_eff})")));
    }
    if !delta_l_m.is_finite() || delta_l_m < 0.0 {
        return Err(Error::invalid(format!(
            "length extension must be non-negative (got {delta_l_m})"
        )));
    }
    let l_eff = SPEED_OF_LIGHT / (2.0 * f_r_hz * eps_eff.sqrt());
    let l_patch = l_eff - 2.0 * delta_l_m;
    if l_patch <= 0.0 {
        return Err(Error::invalid(format!(
            "fringing extension {delta_l_m} m leaves no physical length out of {l_eff} m"
        )));
    }
    Ok((l_eff, l_patch))
}

/// Radiating-edge input impedance `90 · eps_r² / (eps_r − 1) · (L / W)²`.
///
/// The expression has a pole at `eps_r = 1`, so air substrates are rejected.
pub fn edge_impedance(eps_r: f64, l_patch_m: f64, w_patch_m: f64) -> Result<f64> {
    if !eps_r.is_finite() || eps_r <= 1.0 {
        return Err(Error::OutsideValidity(format!(
            "edge impedance is singular at eps_r = 1 (divides by eps_r - 1; got eps_r = {eps_r})"
        )));
    }
    positive("patch length", l_patch_m)?;
    positive("patch width", w_patch_m)?;
    let ratio = l_patch_m / w_patch_m;
    Ok(90.0 * eps_r * eps_r / (eps_r - 1.0) * ratio * ratio)
}

/// Characteristic impedance of a quarter-wave section matching `z_edge` to `z0`.
pub fn qwt_impedance(z0_ohm: f64, z_edge_ohm: f64) -> Result<f64> {
    positive("reference impedance", z0_ohm)?;
    positive("load impedance", z_edge_ohm)?;
    Ok((z0_ohm * z_edge_ohm).sqrt())
}

/// Runs the full chain from target and substrate.
pub fn synthesize_patch(target: &DesignTarget, sub: &Substrate) -> Result<TlmSolution> {
    let w = patch_width(target.f_r_hz, sub.eps_r).map_err(|e| e.at_stage("patch_width"))?;
    let eps_eff = effective_permittivity(sub.eps_r, sub.height_m, w)
        .map_err(|e| e.at_stage("effective_permittivity"))?;
    let delta_l =
        length_extension(eps_eff, sub.height_m, w).map_err(|e| e.at_stage("length_extension"))?;
    let (l_eff, l_patch) =
        patch_length(target.f_r_hz, eps_eff, delta_l).map_err(|e| e.at_stage("patch_length"))?;
    let z_edge = edge_impedance(sub.eps_r, l_patch, w).map_err(|e| e.at_stage("edge_impedance"))?;
    let z_qwt = qwt_impedance(target.z0_ohm, z_edge).map_err(|e| e.at_stage("qwt_impedance"))?;
    Ok(TlmSolution {
        w_patch_m: w,
        eps_eff,
        delta_l_m: delta_l,
        l_eff_m: l_eff,
        l_patch_m: l_patch,
        z_edge_ohm: z_edge,
        z_qwt_ohm: z_qwt,
    })
}

impl TlmSolution {
    /// Builds a solution around given physical dimensions instead of the
    /// synthesized ones. Fringing and impedances are recomputed; the effective
    /// length becomes `l_patch + 2·delta_l`.
    pub fn from_dimensions(
        target: &DesignTarget,
        sub: &Substrate,
        w_patch_m: f64,
        l_patch_m: f64,
    ) -> Result<Self> {
        positive("patch width", w_patch_m)?;
        positive("patch length", l_patch_m)?;
        let eps_eff = effective_permittivity(sub.eps_r, sub.height_m, w_patch_m)
            .map_err(|e| e.at_stage("effective_permittivity"))?;
        let delta_l = length_extension(eps_eff, sub.height_m, w_patch_m)
            .map_err(|e| e.at_stage("length_extension"))?;
        let z_edge = edge_impedance(sub.eps_r, l_patch_m, w_patch_m)
            .map_err(|e| e.at_stage("edge_impedance"))?;
        let z_qwt =
            qwt_impedance(target.z0_ohm, z_edge).map_err(|e| e.at_stage("qwt_impedance"))?;
        Ok(TlmSolution {
            w_patch_m,
            eps_eff,
            delta_l_m: delta_l,
            l_eff_m: l_patch_m + 2.0 * delta_l,
            l_patch_m,
            z_edge_ohm: z_edge,
            z_qwt_ohm: z_qwt,
        })
    }

    /// Same solution with a new physical length; only the two lengths change.
    pub fn with_patch_length(&self, l_patch_m: f64) -> Self {
        TlmSolution {
            l_patch_m,
            l_eff_m: l_patch_m + 2.0 * self.delta_l_m,
            ..*self
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{m_to_mm, mm_to_m};
    use proptest::prelude::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    // Reference values below were evaluated independently at 30-digit precision.

    #[test]
    fn width_examples() {
        let w = m_to_mm(patch_width(28e9, 1.96).unwrap());
        assert!(close(w, 4.400498, 1e-6), "{w}");
        // eps_r = 1 gives half the free-space wavelength
        let w = patch_width(30e9, 1.0).unwrap();
        assert!(close(w, SPEED_OF_LIGHT / 30e9 / 2.0, 1e-15));
        assert!(close(
            m_to_mm(patch_width(10e9, 4.3).unwrap()),
            9.208052,
            1e-6
        ));
        assert!(patch_width(0.0, 2.0).is_err());
        assert!(patch_width(1e9, 0.5).is_err());
    }

    #[test]
    fn effective_permittivity_examples() {
        let e = effective_permittivity(1.96, mm_to_m(0.762), mm_to_m(4.404)).unwrap();
        assert!(close(e, 1.753670, 1e-6), "{e}");
        assert_eq!(effective_permittivity(1.0, 1e-3, 5e-3).unwrap(), 1.0);
        let e = effective_permittivity(2.2, mm_to_m(0.1), mm_to_m(100.0)).unwrap();
        assert!(close(e, 2.196432, 1e-6), "{e}");
        assert!(effective_permittivity(2.0, 0.0, 1e-3).is_err());
        assert!(effective_permittivity(2.0, 1e-3, -1.0).is_err());
    }

    #[test]
    fn length_extension_examples() {
        let d = length_extension(1.754, mm_to_m(0.762), mm_to_m(4.404)).unwrap();
        assert!(close(m_to_mm(d), 0.395929, 1e-6));
        let d = length_extension(2.0, mm_to_m(1.0), mm_to_m(10.0)).unwrap();
        assert!(close(m_to_mm(d), 0.516975, 1e-6));
        let d1 = length_extension(1.8, 1e-3, 4e-3).unwrap();
        let d2 = length_extension(1.8, 2e-3, 8e-3).unwrap();
        assert!(close(d2, 2.0 * d1, 1e-18));
        assert!(length_extension(0.258, 1e-3, 1e-3).is_err());
    }

    #[test]
    fn patch_length_examples() {
        let (le, lp) = patch_length(28e9, 1.754, mm_to_m(0.396)).unwrap();
        assert!(close(m_to_mm(le), 4.042201, 1e-6));
        assert!(close(m_to_mm(lp), 3.250201, 1e-6));
        let (le, lp) = patch_length(28e9, 1.754, 0.0).unwrap();
        assert_eq!(le, lp);
        let (le, lp) = patch_length(10e9, 2.0, mm_to_m(0.5)).unwrap();
        assert!(close(m_to_mm(le), 10.599264, 1e-6));
        assert!(close(m_to_mm(lp), 9.599264, 1e-6));
        assert!(patch_length(28e9, 1.754, mm_to_m(3.0)).is_err());
    }

    #[test]
    fn edge_impedance_examples() {
        let z = edge_impedance(1.96, mm_to_m(3.2), mm_to_m(4.4)).unwrap();
        assert!(close(z, 190.5, 0.05), "{z}");
        assert!(close(edge_impedance(2.0, 1e-3, 1e-3).unwrap(), 360.0, 1e-9));
        let z = edge_impedance(1.96, mm_to_m(3.2505), mm_to_m(4.404)).unwrap();
        assert!(close(z, 196.195544, 1e-5), "{z}");
        let err = edge_impedance(1.0, 1e-3, 1e-3).unwrap_err();
        assert!(err.to_string().contains("eps_r - 1"));
    }

    #[test]
    fn qwt_impedance_examples() {
        assert!(close(qwt_impedance(50.0, 190.5).unwrap(), 97.596106, 1e-6));
        assert_eq!(qwt_impedance(73.0, 73.0).unwrap(), 73.0);
        assert_eq!(qwt_impedance(50.0, 200.0).unwrap(), 100.0);
        assert!(qwt_impedance(0.0, 200.0).is_err());
    }

    #[test]
    fn pipeline_at_reference_design() {
        let t = DesignTarget::new(28e9, 50.0).unwrap();
        let s = synthesize_patch(&t, &Substrate::rt5880lz()).unwrap();
        assert!(close(m_to_mm(s.w_patch_m), 4.4005, 1e-4));
        assert!(close(m_to_mm(s.l_patch_m), 3.2508, 1e-4));
        assert!(close(s.z_edge_ohm, 196.544, 1e-3));
        assert!(close(s.z_qwt_ohm, 99.132, 1e-3));
        assert!(close(s.l_patch_m, s.l_eff_m - 2.0 * s.delta_l_m, 1e-18));
    }

    #[test]
    fn rounded_dimension_fixture() {
        let t = DesignTarget::new(28e9, 50.0).unwrap();
        let s =
            TlmSolution::from_dimensions(&t, &Substrate::rt5880lz(), mm_to_m(4.4), mm_to_m(3.2))
                .unwrap();
        assert!(close(s.z_edge_ohm, 190.5, 0.05));
        assert!(close(s.z_qwt_ohm, 97.6, 0.01));
    }

    #[test]
    fn air_substrate_fails_at_edge_impedance_stage() {
        let t = DesignTarget::new(28e9, 50.0).unwrap();
        let air = Substrate::new("air", 1.0, 1e-3, 0.0).unwrap();
        match synthesize_patch(&t, &air).unwrap_err() {
            Error::Stage { stage, .. } => assert_eq!(stage, "edge_impedance"),
            other => panic!("unexpected {other:?}"),
        }
    }

    proptest! {
        #[test]
        fn solution_invariants(
            f in 1e9f64..100e9,
            eps_r in 1.05f64..12.0,
            h_mm in 0.05f64..3.0,
        ) {
            let t = DesignTarget::new(f, 50.0).unwrap();
            let sub = Substrate::new("p", eps_r, mm_to_m(h_mm), 0.0).unwrap();
            if let Ok(s) = synthesize_patch(&t, &sub) {
                prop_assert!(s.eps_eff >= 1.0 && s.eps_eff <= eps_r);
                prop_assert!(s.delta_l_m > 0.0 && s.w_patch_m > 0.0 && s.l_patch_m > 0.0);
                let lo = s.z_edge_ohm.min(50.0);
                let hi = s.z_edge_ohm.max(50.0);
                prop_assert!(s.z_qwt_ohm >= lo * (1.0 - 1e-12) && s.z_qwt_ohm <= hi * (1.0 + 1e-12));
            }
        }

        #[test]
        fn width_decreases_in_frequency_and_permittivity(
            f in 1e9f64..100e9, df in 1e6f64..1e9, eps in 1.0f64..12.0, de in 0.01f64..2.0,
        ) {
            prop_assert!(patch_width(f + df, eps).unwrap() < patch_width(f, eps).unwrap());
            prop_assert!(patch_width(f, eps + de).unwrap() < patch_width(f, eps).unwrap());
        }

        #[test]
        fn length_decreases_in_frequency(f in 1e9f64..100e9, df in 1e6f64..1e9, eps in 1.0f64..10.0) {
            let (_, a) = patch_length(f, eps, 1e-6).unwrap();
            let (_, b) = patch_length(f + df, eps, 1e-6).unwrap();
            prop_assert!(b < a);
        }
    }
}
