//! Radiating-slot admittances of the two-slot patch model.

use std::f64::consts::PI;

use crate::domain::{free_space_wavelength, wavenumber, Substrate};
use crate::error::{Error, Result};
use crate::numerics::{integrate_panels, QUAD_MAX_DEPTH, QUAD_TOL};

/// Below this |cos θ| the slot integrand uses its limit value.
const COS_EPS: f64 = 1e-8;

/// `[sin(a·cosθ)/cosθ]²` with the removable point at cosθ = 0.
fn slot_factor(half_x: f64, theta: f64) -> f64 {
    let c = theta.cos();
    if c.abs() < COS_EPS {
        half_x * half_x
    } else {
        let s = (half_x * c).sin() / c;
        s * s
    }
}

/// Default panel count for an integrand whose fastest phase is `x` radians.
pub fn default_panels(x: f64) -> usize {
    16 + 4 * x.abs().ceil() as usize
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must be positive (got {v})")))
    }
}

/// Radiation integral I1 of a single slot of width `w_m` at `f_hz`.
pub fn slot_integral(w_m: f64, f_hz: f64, panels: usize) -> Result<f64> {
    check_positive("slot width", w_m)?;
    check_positive("frequency", f_hz)?;
    let x = wavenumber(f_hz) * w_m;
    let half = 0.5 * x;
    let tol = QUAD_TOL * (half * half).max(1.0);
    integrate_panels(
        |t| slot_factor(half, t) * t.sin().powi(3),
        0.0,
        PI,
        panels,
        tol,
        QUAD_MAX_DEPTH,
    )
}

/// Slot radiation conductance `G1 = I1 / (120 π²)` in siemens.
pub fn slot_conductance(w_m: f64, f_hz: f64) -> Result<f64> {
    let panels = default_panels(wavenumber(f_hz) * w_m);
    slot_conductance_with(w_m, f_hz, panels)
}

/// [`slot_conductance`] with an explicit initial panel count.
pub fn slot_conductance_with(w_m: f64, f_hz: f64, panels: usize) -> Result<f64> {
    Ok(slot_integral(w_m, f_hz, panels)? / (120.0 * PI * PI))
}

/// Thin-substrate slot susceptance `B1 = w/(120 λ0) · (1 − 0.636 ln(k0 h))`.
///
/// Only valid while `k0·h < 1`.
pub fn slot_susceptance(w_m: f64, sub: &Substrate, f_hz: f64) -> Result<f64> {
    check_positive("slot width", w_m)?;
    check_positive("frequency", f_hz)?;
    let k0h = wavenumber(f_hz) * sub.height_m;
    if k0h >= 1.0 {
        return Err(Error::OutsideValidity(format!(
            "k0*h = {k0h:.3} is outside thin-substrate validity (needs k0*h < 1)"
        )));
    }
    let lambda0 = free_space_wavelength(f_hz);
    Ok(w_m / (120.0 * lambda0) * (1.0 - 0.636 * k0h.ln()))
}

/// Mutual conductance between the two radiating slots separated by `l_eff_m`.
///
/// May be negative when the Bessel weighting is predominantly negative; its
/// magnitude never exceeds the self conductance.
pub fn mutual_conductance(w_m: f64, l_eff_m: f64, f_hz: f64) -> Result<f64> {
    check_positive("slot width", w_m)?;
    check_positive("slot separation", l_eff_m)?;
    check_positive("frequency", f_hz)?;
    let k0 = wavenumber(f_hz);
    let half = 0.5 * k0 * w_m;
    let kl = k0 * l_eff_m;
    let panels = default_panels((k0 * w_m).max(kl));
    let tol = QUAD_TOL * (half * half).max(1.0);
    let i12 = integrate_panels(
        |t| slot_factor(half, t) * libm::j0(kl * t.sin()) * t.sin().powi(3),
        0.0,
        PI,
        panels,
        tol,
        QUAD_MAX_DEPTH,
    )?;
    Ok(i12 / (120.0 * PI * PI))
}

/// Resonant input resistance of two coupled slots, `1 / (2 (G1 + G12))`.
pub fn edge_resistance_slot_model(g1: f64, g12: f64) -> Result<f64> {
    if !(g1.is_finite() && g1 > 0.0) {
        return Err(Error::invalid(format!("G1 must be positive (got {g1})")));
    }
    let denom = 2.0 * (g1 + g12);
    if !denom.is_finite() || denom <= 0.0 {
        return Err(Error::Singular(format!(
            "G1 + G12 must be positive (got {})",
            g1 + g12
        )));
    }
    Ok(1.0 / denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::mm_to_m;

    /// Composite trapezoid over [0, π] with `n` intervals, independent of the
    /// adaptive integrator.
    fn trapezoid_i1(x: f64, n: usize) -> f64 {
        let h = PI / n as f64;
        let g = |t: f64| {
            let c = t.cos();
            let core = if c.abs() < 1e-12 {
                0.5 * x
            } else {
                (0.5 * x * c).sin() / c
            };
            core * core * t.sin().powi(3)
        };
        let mut s = 0.5 * (g(0.0) + g(PI));
        for i in 1..n {
            s += g(i as f64 * h);
        }
        s * h
    }

    /// Sine integral by its Maclaurin series; adequate for |x| < 8.
    fn si_series(x: f64) -> f64 {
        let mut term = x;
        let mut sum = x;
        for n in 1..60 {
            let k = n as f64;
            term *= -x * x / ((2.0 * k) * (2.0 * k + 1.0));
            sum += term / (2.0 * k + 1.0);
        }
        sum
    }

    #[test]
    fn conductance_at_reference_width() {
        let w = mm_to_m(4.4);
        let g1 = slot_conductance(w, 28e9).unwrap();
        let x = wavenumber(28e9) * w;
        let trap = trapezoid_i1(x, 1_000_000) / (120.0 * PI * PI);
        let closed = (-2.0 + x.cos() + x * si_series(x) + x.sin() / x) / (120.0 * PI * PI);
        assert!((trap - closed).abs() / closed < 1e-9);
        assert!((g1 - closed).abs() / closed < 1e-8, "{g1} vs {closed}");
        // 1.6865483e-3 S, well inside the ±10% band around 1.67e-3 S
        assert!((g1 - 1.686_548_340e-3).abs() < 1e-11);
        assert!((g1 - 1.67e-3).abs() / 1.67e-3 < 0.10);
    }

    #[test]
    fn conductance_asymptotes() {
        let f = 28e9;
        let lambda = free_space_wavelength(f);
        let small = slot_conductance(0.01 * lambda, f).unwrap();
        let small_ref = 0.01f64.powi(2) / 90.0;
        assert!((small - small_ref).abs() / small_ref < 0.05);
        let wide = slot_conductance(10.0 * lambda, f).unwrap();
        let wide_ref = 10.0 / 120.0;
        assert!((wide - wide_ref).abs() / wide_ref < 0.05);
    }

    #[test]
    fn conductance_panel_convergence() {
        let (w, f) = (mm_to_m(4.4), 28e9);
        let n = default_panels(wavenumber(f) * w);
        let a = slot_conductance_with(w, f, n).unwrap();
        let b = slot_conductance_with(w, f, 2 * n).unwrap();
        assert!((a - b).abs() < 1e-6);
    }

    #[test]
    fn susceptance_examples() {
        let s = Substrate::rt5880lz();
        let b = slot_susceptance(mm_to_m(4.4), &s, 28e9).unwrap();
        assert!((b - 5.177_516e-3).abs() < 1e-9, "{b}");
        let thin = s.clone();
        let half = Substrate {
            height_m: thin.height_m / 2.0,
            ..thin.clone()
        };
        assert!(
            slot_susceptance(1e-3, &half, 28e9).unwrap()
                > slot_susceptance(1e-3, &thin, 28e9).unwrap()
        );
        let thick = Substrate {
            height_m: 1.2 / wavenumber(28e9),
            ..s
        };
        let err = slot_susceptance(1e-3, &thick, 28e9).unwrap_err();
        assert!(err.to_string().contains("thin-substrate validity"));
    }

    #[test]
    fn mutual_conductance_examples() {
        let (w, f) = (mm_to_m(4.4), 28e9);
        let g1 = slot_conductance(w, f).unwrap();
        let g12 = mutual_conductance(w, mm_to_m(4.04), f).unwrap();
        // high-precision quadrature reference
        assert!((g12 - 2.535_180_550e-4).abs() < 1e-11, "{g12}");
        assert!(g12 > 0.0 && g12 < g1);
        let g12_close = mutual_conductance(w, 1e-12, f).unwrap();
        assert!((g12_close - g1).abs() / g1 < 1e-8);
        for l_mm in [10.0, 20.0, 35.0, 80.0] {
            let g = mutual_conductance(w, mm_to_m(l_mm), f).unwrap();
            assert!(g.abs() < g1);
        }
    }

    #[test]
    fn edge_resistance_examples() {
        let r = edge_resistance_slot_model(1.67e-3, 6.0e-4).unwrap();
        assert!((r - 220.264317).abs() < 1e-5);
        assert_eq!(edge_resistance_slot_model(2e-3, 0.0).unwrap(), 250.0);
        assert!(edge_resistance_slot_model(1e-3, -1e-3).is_err());
        assert!(edge_resistance_slot_model(0.0, 1e-3).is_err());
    }
}
