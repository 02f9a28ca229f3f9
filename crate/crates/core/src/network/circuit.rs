use num_complex::Complex64;

use super::slot::{slot_conductance, slot_susceptance};
use crate::domain::{wavenumber, Substrate};
use crate::error::{Error, Result};
use crate::mstripline::{line_analysis, LineGeometry};
use crate::synthesis::TlmSolution;

/// Complex impedance, admittance or reflection coefficient.
pub type ComplexValue = Complex64;

const J: Complex64 = Complex64::new(0.0, 1.0);

fn finite(z: Complex64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// Admittance seen at one radiating edge of the patch.
///
/// The patch interior is a line of width `w_patch` and length `l_patch`
/// terminated at the far edge by the slot admittance `G1 + jB1`; the near
/// slot appears in parallel.
pub fn input_admittance(tlm: &TlmSolution, sub: &Substrate, f_hz: f64) -> Result<Complex64> {
    if !f_hz.is_finite() || f_hz <= 0.0 {
        return Err(Error::invalid(format!(
            "frequency must be positive (got {f_hz})"
        )));
    }
    let g1 = slot_conductance(tlm.w_patch_m, f_hz)?;
    let b1 = slot_susceptance(tlm.w_patch_m, sub, f_hz)?;
    let line = line_analysis(tlm.w_patch_m, sub)?;
    let beta = wavenumber(f_hz) * line.eps_eff.sqrt();
    edge_admittance(
        Complex64::new(g1, b1),
        1.0 / line.z0_ohm,
        beta * tlm.l_patch_m,
    )
    .map_err(|_| Error::Singular(format!("input admittance at {f_hz} Hz")))
}

/// `Ys + Yc·(Ys + j·Yc·tan βL)/(Yc + j·Ys·tan βL)`: slot admittance `ys` in
/// parallel with a second `ys` seen through a line of admittance `yc` and
/// electrical length `beta_l`.
pub fn edge_admittance(ys: Complex64, yc: f64, beta_l: f64) -> Result<Complex64> {
    let t = beta_l.tan();
    let yc = Complex64::new(yc, 0.0);
    let denom = yc + J * ys * t;
    if denom.norm() == 0.0 || !finite(denom) {
        return Err(Error::Singular("line transform denominator".into()));
    }
    let yin = ys + yc * (ys + J * yc * t) / denom;
    if !finite(yin) {
        return Err(Error::Singular("input admittance overflowed".into()));
    }
    Ok(yin)
}

/// Impedance at the radiating edge, `1 / Yin`.
pub fn input_impedance(tlm: &TlmSolution, sub: &Substrate, f_hz: f64) -> Result<Complex64> {
    let yin = input_admittance(tlm, sub, f_hz)?;
    if yin.norm() == 0.0 {
        return Err(Error::Singular(format!(
            "zero input admittance at {f_hz} Hz"
        )));
    }
    Ok(yin.inv())
}

/// Two-port chain matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Abcd {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl Abcd {
    pub fn identity() -> Self {
        Abcd {
            a: Complex64::new(1.0, 0.0),
            b: Complex64::new(0.0, 0.0),
            c: Complex64::new(0.0, 0.0),
            d: Complex64::new(1.0, 0.0),
        }
    }

    /// Lossless line of impedance `z0` and electrical length `beta_l` radians.
    pub fn lossless_line(z0: f64, beta_l: f64) -> Self {
        let (s, c) = beta_l.sin_cos();
        Abcd {
            a: Complex64::new(c, 0.0),
            b: J * z0 * s,
            c: J * s / z0,
            d: Complex64::new(c, 0.0),
        }
    }

    /// `self` followed by `next` (closer to the load).
    pub fn then(&self, next: &Abcd) -> Abcd {
        Abcd {
            a: self.a * next.a + self.b * next.c,
            b: self.a * next.b + self.b * next.d,
            c: self.c * next.a + self.d * next.c,
            d: self.c * next.b + self.d * next.d,
        }
    }

    /// Input impedance with `z_load` on the output port.
    pub fn input_impedance(&self, z_load: Complex64) -> Result<Complex64> {
        let den = self.c * z_load + self.d;
        if den.norm() == 0.0 || !finite(den) {
            return Err(Error::Singular(
                "ABCD load transform denominator is zero".into(),
            ));
        }
        let z = (self.a * z_load + self.b) / den;
        if !finite(z) {
            return Err(Error::Singular("ABCD load transform overflowed".into()));
        }
        Ok(z)
    }
}

/// Transforms `z_load` through a lossless line of impedance `z0` and
/// electrical length `beta_l`.
pub fn transform_line(z_load: Complex64, z0: f64, beta_l: f64) -> Result<Complex64> {
    Abcd::lossless_line(z0, beta_l).input_impedance(z_load)
}

/// Impedance at the input of the matching section `line` loaded by `z_load`.
pub fn cascade_qwt(z_load: Complex64, line: &LineGeometry, f_hz: f64) -> Result<Complex64> {
    if !f_hz.is_finite() || f_hz <= 0.0 {
        return Err(Error::invalid(format!(
            "frequency must be positive (got {f_hz})"
        )));
    }
    transform_line(z_load, line.z0_ohm, line.electrical_length(f_hz))
}

/// Reflection coefficient of `z` against a real reference `z0_ref`.
pub fn s11(z: Complex64, z0_ref: f64) -> Result<Complex64> {
    if !z0_ref.is_finite() || z0_ref <= 0.0 {
        return Err(Error::invalid(format!(
            "reference impedance must be positive (got {z0_ref})"
        )));
    }
    let den = z + z0_ref;
    if den.norm() == 0.0 {
        return Err(Error::Singular(format!("load equals -{z0_ref} ohm")));
    }
    Ok((z - z0_ref) / den)
}

/// `20·log10|Γ|`; `-inf` for a perfect match.
pub fn s11_db(gamma: Complex64) -> f64 {
    let m = gamma.norm();
    if m == 0.0 {
        f64::NEG_INFINITY
    } else {
        20.0 * m.log10()
    }
}

/// Positive return loss `−20·log10|Γ|`; `+inf` for a perfect match.
pub fn return_loss_db(gamma: Complex64) -> f64 {
    -s11_db(gamma)
}

/// `(1 + |Γ|) / (1 − |Γ|)`; `+inf` at total reflection.
pub fn vswr(gamma: Complex64) -> f64 {
    vswr_from_mag(gamma.norm())
}

pub(crate) fn vswr_from_mag(m: f64) -> f64 {
    if m >= 1.0 {
        f64::INFINITY
    } else {
        (1.0 + m) / (1.0 - m)
    }
}
