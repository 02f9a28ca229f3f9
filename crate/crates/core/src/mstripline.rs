//! Quasi-static microstrip line analysis and synthesis.
//!
//! Turns a characteristic impedance into a physical strip width using the
//! Hammerstad closed forms. The line effective permittivity uses the same
//! expression as the patch synthesis. Dispersion and strip thickness are not
//! modeled.

use serde::{Deserialize, Serialize};

use crate::domain::{Substrate, SPEED_OF_LIGHT};
use crate::error::{Error, Result};
use crate::numerics::bisect;
use crate::synthesis::effective_permittivity;

/// Supported synthesis range in ohms.
pub const SYNTH_Z_MIN: f64 = 10.0;
pub const SYNTH_Z_MAX: f64 = 250.0;
/// Relative impedance error accepted from [`line_synthesis`].
pub const SYNTH_REL_TOL: f64 = 5e-3;
pub const SYNTH_MAX_ITER: usize = 200;

/// A straight microstrip section.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineGeometry {
    pub width_m: f64,
    pub length_m: f64,
    pub z0_ohm: f64,
    pub eps_eff_line: f64,
}

impl LineGeometry {
    /// Analyzes a line of the given width and length on `sub`.
    pub fn from_width(width_m: f64, length_m: f64, sub: &Substrate) -> Result<Self> {
        if !length_m.is_finite() || length_m < 0.0 {
            return Err(Error::invalid(format!(
                "line length must be non-negative (got {length_m})"
            )));
        }
        let a = line_analysis(width_m, sub)?;
        Ok(LineGeometry {
            width_m,
            length_m,
            z0_ohm: a.z0_ohm,
            eps_eff_line: a.eps_eff,
        })
    }

    /// Phase constant at `f_hz` in rad/m.
    pub fn beta(&self, f_hz: f64) -> f64 {
        2.0 * std::f64::consts::PI * f_hz * self.eps_eff_line.sqrt() / SPEED_OF_LIGHT
    }

    /// Electrical length `β·l` in radians at `f_hz`.
    pub fn electrical_length(&self, f_hz: f64) -> f64 {
        self.beta(f_hz) * self.length_m
    }
}

/// Characteristic impedance and effective permittivity of a strip.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineParams {
    pub z0_ohm: f64,
    pub eps_eff: f64,
}

/// Hammerstad analysis of a strip of width `width_m`.
pub fn line_analysis(width_m: f64, sub: &Substrate) -> Result<LineParams> {
    if !width_m.is_finite() || width_m <= 0.0 {
        return Err(Error::invalid(format!(
            "line width must be positive (got {width_m})"
        )));
    }
    let eps_eff = effective_permittivity(sub.eps_r, sub.height_m, width_m)?;
    let u = width_m / sub.height_m;
    let z0 = if u <= 1.0 {
        60.0 / eps_eff.sqrt() * (8.0 / u + u / 4.0).ln()
    } else {
        120.0 * std::f64::consts::PI / (eps_eff.sqrt() * (u + 1.393 + 0.667 * (u + 1.444).ln()))
    };
    Ok(LineParams {
        z0_ohm: z0,
        eps_eff,
    })
}

/// Wheeler/Hammerstad closed-form estimate of w/h for a target impedance.
fn wheeler_ratio(z: f64, eps_r: f64) -> f64 {
    let a = z / 60.0 * (0.5 * (eps_r + 1.0)).sqrt()
        + (eps_r - 1.0) / (eps_r + 1.0) * (0.23 + 0.11 / eps_r);
    let narrow = 8.0 * a.exp() / ((2.0 * a).exp() - 2.0);
    if narrow < 2.0 {
        return narrow;
    }
    let b = 377.0 * std::f64::consts::PI / (2.0 * z * eps_r.sqrt());
    2.0 / std::f64::consts::PI
        * (b - 1.0 - (2.0 * b - 1.0).ln()
            + (eps_r - 1.0) / (2.0 * eps_r) * ((b - 1.0).ln() + 0.39 - 0.61 / eps_r))
}

/// Strip width giving `z_target` on `sub`.
///
/// Seeds with the Wheeler estimate, widens a bracket geometrically and then
/// bisects on log-width against [`line_analysis`].
pub fn line_synthesis(z_target: f64, sub: &Substrate) -> Result<f64> {
    if !(SYNTH_Z_MIN..=SYNTH_Z_MAX).contains(&z_target) {
        return Err(Error::invalid(format!(
            "target impedance {z_target} ohm outside supported range [{SYNTH_Z_MIN}, {SYNTH_Z_MAX}]"
        )));
    }
    let h = sub.height_m;
    let z_at = |w: f64| line_analysis(w, sub).map(|p| p.z0_ohm);

    let seed = wheeler_ratio(z_target, sub.eps_r);
    let seed = if seed.is_finite() && seed > 0.0 {
        seed * h
    } else {
        h
    };
    let (min_w, max_w) = (1e-4 * h, 1e3 * h);
    let mut lo = (seed / 2.0).max(min_w);
    let mut hi = (seed * 2.0).min(max_w);
    // z decreases with width: need z(lo) > target > z(hi)
    while z_at(lo)? < z_target {
        if lo <= min_w {
            return Err(Error::invalid(format!(
                "{z_target} ohm is not reachable on this substrate (narrowest strip gives {:.2} ohm)",
                z_at(lo)?
            )));
        }
        lo = (lo / 4.0).max(min_w);
    }
    while z_at(hi)? > z_target {
        if hi >= max_w {
            return Err(Error::invalid(format!(
                "{z_target} ohm is not reachable on this substrate (widest strip gives {:.2} ohm)",
                z_at(hi)?
            )));
        }
        hi = (hi * 4.0).min(max_w);
    }

    let log_w = bisect(
        |x| z_at(x.exp()).map(|z| z - z_target),
        lo.ln(),
        hi.ln(),
        1e-13,
        SYNTH_MAX_ITER,
    )?;
    let w = log_w.exp();
    let achieved = z_at(w)?;
    if ((achieved - z_target) / z_target).abs() > SYNTH_REL_TOL {
        return Err(Error::NoConvergence(format!(
            "line synthesis reached {achieved:.3} ohm for a {z_target} ohm target"
        )));
    }
    Ok(w)
}

/// Guided wavelength `c / (f·sqrt(eps_eff))`.
pub fn guided_wavelength(f_hz: f64, eps_eff_line: f64) -> Result<f64> {
    if !f_hz.is_finite() || f_hz <= 0.0 {
        return Err(Error::invalid(format!(
            "frequency must be positive (got {f_hz})"
        )));
    }
    if !eps_eff_line.is_finite() || eps_eff_line < 1.0 {
        return Err(Error::invalid(format!(
            "eps_eff below 1 (got {eps_eff_line})"
        )));
    }
    Ok(SPEED_OF_LIGHT / (f_hz * eps_eff_line.sqrt()))
}

/// Quarter-wave transformer of impedance `z_qwt` at `f_hz`.
pub fn qwt_section(z_qwt: f64, f_hz: f64, sub: &Substrate) -> Result<LineGeometry> {
    line_section(z_qwt, f_hz, 0.25, sub)
}

/// Feed line of impedance `z0` that is `wavelengths` guided wavelengths long.
pub fn feed_section(z0: f64, f_hz: f64, wavelengths: f64, sub: &Substrate) -> Result<LineGeometry> {
    line_section(z0, f_hz, wavelengths, sub)
}

fn line_section(z: f64, f_hz: f64, wavelengths: f64, sub: &Substrate) -> Result<LineGeometry> {
    let width = line_synthesis(z, sub)?;
    let params = line_analysis(width, sub)?;
    let lambda_g = guided_wavelength(f_hz, params.eps_eff)?;
    Ok(LineGeometry {
        width_m: width,
        length_m: wavelengths * lambda_g,
        z0_ohm: params.z0_ohm,
        eps_eff_line: params.eps_eff,
    })
}
