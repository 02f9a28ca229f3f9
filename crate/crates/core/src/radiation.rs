//! Far-field pattern of the two-slot aperture model over an infinite ground
//! plane, and directivity by spherical quadrature.
//!
//! φ = 0 is the E-plane (along the resonant length), φ = 90° the H-plane.
//! Angles are in radians unless a name says otherwise.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::domain::wavenumber;
use crate::error::{Error, Result};
use crate::numerics::{sinc, trapezoid};
use crate::synthesis::TlmSolution;

/// Radiation efficiency used when none is given. An assumption, not a
/// measured value.
pub const DEFAULT_EFFICIENCY: f64 = 0.85;
pub const DEFAULT_N_THETA: usize = 181;
pub const DEFAULT_N_PHI: usize = 361;

const HEMI_EPS: f64 = 1e-12;

fn check_hemisphere(theta: f64) -> Result<()> {
    if !theta.is_finite() || theta.abs() > FRAC_PI_2 + HEMI_EPS {
        return Err(Error::invalid(format!(
            "theta {:.6} deg is outside the upper hemisphere",
            theta.to_degrees()
        )));
    }
    Ok(())
}

/// Normalized E-plane field, `|cos((k0·l_eff/2)·sinθ)|`.
pub fn e_plane_pattern(theta: f64, tlm: &TlmSolution, f_hz: f64) -> Result<f64> {
    check_hemisphere(theta)?;
    let a = 0.5 * wavenumber(f_hz) * tlm.l_eff_m;
    Ok((a * theta.sin()).cos().abs())
}

/// Normalized H-plane field, `|cosθ · sinc((k0·w/2)·sinθ)|`.
pub fn h_plane_pattern(theta: f64, tlm: &TlmSolution, f_hz: f64) -> Result<f64> {
    check_hemisphere(theta)?;
    let b = 0.5 * wavenumber(f_hz) * tlm.w_patch_m;
    Ok((theta.cos() * sinc(b * theta.sin())).abs())
}

/// Radiation intensity at `(θ, φ)`, 1 at broadside and 0 below the ground plane.
pub fn intensity(theta: f64, phi: f64, tlm: &TlmSolution, f_hz: f64) -> f64 {
    if !(0.0..=FRAC_PI_2 + HEMI_EPS).contains(&theta) {
        return 0.0;
    }
    let k0 = wavenumber(f_hz);
    let (st, (sp, cp)) = (theta.sin(), phi.sin_cos());
    let e = (0.5 * k0 * tlm.l_eff_m * st * cp).cos();
    let h = sinc(0.5 * k0 * tlm.w_patch_m * st * sp);
    (e * e * h * h * (1.0 - st * st * sp * sp)).max(0.0)
}

/// Angular extent of a sampled pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Support {
    /// θ ∈ [0°, 90°]; the patch radiates only into the upper half space.
    Hemisphere,
    /// θ ∈ [0°, 180°]; used to check the integrator against closed forms.
    FullSphere,
}

/// Sampled, peak-normalized radiation intensity with its directivity.
#[derive(Debug, Clone, PartialEq)]
pub struct PatternGrid {
    pub support: Support,
    pub theta_deg: Vec<f64>,
    pub phi_deg: Vec<f64>,
    /// Row-major, `u[i * phi_deg.len() + j]` at `(theta_deg[i], phi_deg[j])`.
    pub u: Vec<f64>,
    pub d0_linear: f64,
    pub d0_dbi: f64,
    pub efficiency: f64,
    pub gain_dbi: f64,
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            if i + 1 == n {
                hi
            } else {
                lo + (hi - lo) * i as f64 / (n - 1) as f64
            }
        })
        .collect()
}

impl PatternGrid {
    /// Samples `u_fn(θ, φ)` on a uniform grid, normalizes to a unit peak and
    /// integrates for directivity.
    pub fn from_fn<F>(
        support: Support,
        n_theta: usize,
        n_phi: usize,
        efficiency: f64,
        u_fn: F,
    ) -> Result<Self>
    where
        F: Fn(f64, f64) -> f64,
    {
        if n_theta < 2 || n_phi < 2 {
            return Err(Error::invalid(
                "pattern grids need at least 2 points per axis",
            ));
        }
        let theta_max = match support {
            Support::Hemisphere => 90.0,
            Support::FullSphere => 180.0,
        };
        let theta_deg = linspace(0.0, theta_max, n_theta);
        let phi_deg = linspace(0.0, 360.0, n_phi);
        let mut u = Vec::with_capacity(n_theta * n_phi);
        for t in &theta_deg {
            for p in &phi_deg {
                u.push(u_fn(t.to_radians(), p.to_radians()));
            }
        }
        let peak = u.iter().cloned().fold(0.0f64, f64::max);
        if !(peak.is_finite() && peak > 0.0) {
            return Err(Error::invalid("radiation intensity has no positive peak"));
        }
        u.iter_mut().for_each(|x| *x /= peak);
        let mut grid = PatternGrid {
            support,
            theta_deg,
            phi_deg,
            u,
            d0_linear: 0.0,
            d0_dbi: 0.0,
            efficiency: 1.0,
            gain_dbi: 0.0,
        };
        let (d_lin, d_dbi) = directivity(&grid)?;
        grid.d0_linear = d_lin;
        grid.d0_dbi = d_dbi;
        grid.efficiency = efficiency;
        grid.gain_dbi = gain(d_dbi, efficiency)?;
        Ok(grid)
    }

    pub fn at(&self, i_theta: usize, i_phi: usize) -> f64 {
        self.u[i_theta * self.phi_deg.len() + i_phi]
    }

    /// Intensity along the φ = `phi_deg` cut, if that φ is on the grid.
    pub fn cut(&self, phi_deg: f64) -> Option<Vec<f64>> {
        let j = self
            .phi_deg
            .iter()
            .position(|p| (p - phi_deg).abs() < 1e-9)?;
        Some((0..self.theta_deg.len()).map(|i| self.at(i, j)).collect())
    }
}

/// Hemispherical intensity grid of the patch at `f_hz`.
pub fn intensity_grid(
    tlm: &TlmSolution,
    f_hz: f64,
    n_theta: usize,
    n_phi: usize,
    efficiency: f64,
) -> Result<PatternGrid> {
    PatternGrid::from_fn(Support::Hemisphere, n_theta, n_phi, efficiency, |t, p| {
        intensity(t, p, tlm, f_hz)
    })
}

/// `D = 4π·U_max / ∬ U sinθ dθ dφ`, trapezoid rule on both axes.
/// Returns `(linear, dBi)`.
pub fn directivity(grid: &PatternGrid) -> Result<(f64, f64)> {
    let theta: Vec<f64> = grid.theta_deg.iter().map(|t| t.to_radians()).collect();
    let phi: Vec<f64> = grid.phi_deg.iter().map(|p| p.to_radians()).collect();
    let n_phi = phi.len();
    let rows: Vec<f64> = theta
        .iter()
        .enumerate()
        .map(|(i, t)| trapezoid(&phi, &grid.u[i * n_phi..(i + 1) * n_phi]) * t.sin())
        .collect();
    let p_rad = trapezoid(&theta, &rows);
    let u_max = grid.u.iter().cloned().fold(0.0f64, f64::max);
    if p_rad.is_nan() || p_rad <= 0.0 {
        return Err(Error::invalid("radiated power integral is zero"));
    }
    let d = 4.0 * PI * u_max / p_rad;
    Ok((d, 10.0 * d.log10()))
}

/// `d0_dbi + 10·log10(efficiency)`.
pub fn gain(d0_dbi: f64, efficiency: f64) -> Result<f64> {
    if !(efficiency > 0.0 && efficiency <= 1.0) {
        return Err(Error::invalid(format!(
            "efficiency must lie in (0, 1] (got {efficiency})"
        )));
    }
    Ok(d0_dbi + 10.0 * efficiency.log10())
}
