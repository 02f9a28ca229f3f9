//! Shared domain types, physical constants and unit conversions.
//!
//! Every length is carried in meters and every frequency in hertz. Millimeters
//! and gigahertz only appear at I/O boundaries through the helpers below.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Speed of light in vacuum (m/s), exact by definition of the meter.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Physical constants used by the models. Not configurable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PhysConst;

impl PhysConst {
    pub const C_M_PER_S: f64 = SPEED_OF_LIGHT;
}

/// Free-space wavelength in meters.
pub fn free_space_wavelength(f_hz: f64) -> f64 {
    SPEED_OF_LIGHT / f_hz
}

/// Free-space wavenumber k0 = 2π f / c in rad/m.
pub fn wavenumber(f_hz: f64) -> f64 {
    2.0 * std::f64::consts::PI * f_hz / SPEED_OF_LIGHT
}

/// Millimeters to meters.
pub fn mm_to_m(mm: f64) -> f64 {
    mm / 1e3
}

/// Meters to millimeters, snapped to the picometer grid so that
/// `m_to_mm(mm_to_m(x)) == x` for every `x` given with at most nine
/// fractional digits.
pub fn m_to_mm(m: f64) -> f64 {
    (m * 1e12).round() / 1e9
}

pub fn ghz_to_hz(ghz: f64) -> f64 {
    ghz * 1e9
}

pub fn hz_to_ghz(hz: f64) -> f64 {
    hz / 1e9
}

/// Dielectric substrate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Substrate {
    pub eps_r: f64,
    pub height_m: f64,
    #[serde(default)]
    pub loss_tangent: f64,
    #[serde(default)]
    pub name: String,
}

impl Substrate {
    /// Builds and validates a substrate.
    pub fn new(
        name: impl Into<String>,
        eps_r: f64,
        height_m: f64,
        loss_tangent: f64,
    ) -> Result<Self> {
        validate_substrate(Substrate {
            eps_r,
            height_m,
            loss_tangent,
            name: name.into(),
        })
    }

    /// Rogers RT5880LZ, 0.762 mm thick, eps_r 1.96. The loss tangent is left
    /// at zero because no value is given for the reference design.
    pub fn rt5880lz() -> Self {
        Substrate {
            eps_r: 1.96,
            height_m: mm_to_m(0.762),
            loss_tangent: 0.0,
            name: "RT5880LZ".to_string(),
        }
    }

    /// Looks up a built-in material by case-insensitive alias.
    pub fn builtin(alias: &str) -> Option<Self> {
        match alias.to_ascii_lowercase().as_str() {
            "rt5880lz" => Some(Self::rt5880lz()),
            _ => None,
        }
    }

    /// Same substrate with a different relative permittivity.
    pub fn with_eps_r(&self, eps_r: f64) -> Self {
        Substrate {
            eps_r,
            ..self.clone()
        }
    }
}

/// Returns the substrate unchanged when every invariant holds.
pub fn validate_substrate(s: Substrate) -> Result<Substrate> {
    if !s.eps_r.is_finite() || s.eps_r < 1.0 {
        return Err(Error::invalid(format!("eps_r below 1 (got {})", s.eps_r)));
    }
    if !s.height_m.is_finite() || s.height_m <= 0.0 {
        return Err(Error::invalid(format!(
            "substrate height must be positive (got {} m)",
            s.height_m
        )));
    }
    if !s.loss_tangent.is_finite() || !(0.0..1.0).contains(&s.loss_tangent) {
        return Err(Error::invalid(format!(
            "loss tangent must lie in [0, 1) (got {})",
            s.loss_tangent
        )));
    }
    Ok(s)
}

/// Resonant frequency and feed reference impedance of a design.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesignTarget {
    pub f_r_hz: f64,
    pub z0_ohm: f64,
}

impl DesignTarget {
    pub fn new(f_r_hz: f64, z0_ohm: f64) -> Result<Self> {
        if !f_r_hz.is_finite() || f_r_hz <= 0.0 {
            return Err(Error::invalid(format!(
                "resonant frequency must be positive (got {f_r_hz} Hz)"
            )));
        }
        if !z0_ohm.is_finite() || z0_ohm <= 0.0 {
            return Err(Error::invalid(format!(
                "reference impedance must be positive (got {z0_ohm} ohm)"
            )));
        }
        Ok(DesignTarget { f_r_hz, z0_ohm })
    }

    /// 50 ohm target at the given frequency.
    pub fn at(f_r_hz: f64) -> Result<Self> {
        Self::new(f_r_hz, 50.0)
    }
}

/// Uniform frequency grid, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandSpec {
    pub f_start_hz: f64,
    pub f_stop_hz: f64,
    pub n_points: usize,
}

impl BandSpec {
    pub fn new(f_start_hz: f64, f_stop_hz: f64, n_points: usize) -> Result<Self> {
        if !(f_start_hz.is_finite() && f_stop_hz.is_finite()) || f_start_hz <= 0.0 {
            return Err(Error::invalid("band edges must be finite and positive"));
        }
        if f_start_hz >= f_stop_hz {
            return Err(Error::invalid(format!(
                "band start {f_start_hz} Hz must be below stop {f_stop_hz} Hz"
            )));
        }
        if n_points < 2 {
            return Err(Error::invalid("a band needs at least 2 points"));
        }
        Ok(BandSpec {
            f_start_hz,
            f_stop_hz,
            n_points,
        })
    }

    /// Sample frequencies. The first and last entries are exactly the band edges.
    pub fn frequencies(&self) -> Vec<f64> {
        let n = self.n_points;
        let span = self.f_stop_hz - self.f_start_hz;
        (0..n)
            .map(|i| {
                if i == n - 1 {
                    self.f_stop_hz
                } else {
                    self.f_start_hz + span * (i as f64) / ((n - 1) as f64)
                }
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reference_substrate_is_valid() {
        let s = Substrate::new("ref", 1.96, mm_to_m(0.762), 0.0).unwrap();
        assert_eq!(s.eps_r, 1.96);
        assert_eq!(
            validate_substrate(Substrate::rt5880lz()).unwrap(),
            Substrate::rt5880lz()
        );
    }

    #[test]
    fn vacuum_like_substrate_is_valid() {
        assert!(Substrate::new("air", 1.0, 1e-3, 0.0).is_ok());
    }

    #[test]
    fn rejects_each_invariant() {
        let err = Substrate::new("x", 0.9, 1e-3, 0.0).unwrap_err();
        assert!(err.to_string().contains("eps_r below 1"), "{err}");
        let err = Substrate::new("x", 2.0, 0.0, 0.0).unwrap_err();
        assert!(err.to_string().contains("height"), "{err}");
        let err = Substrate::new("x", 2.0, 1e-3, 1.0).unwrap_err();
        assert!(err.to_string().contains("loss tangent"), "{err}");
        assert!(Substrate::new("x", 2.0, 1e-3, -0.1).is_err());
    }

    #[test]
    fn speed_of_light_is_exact() {
        assert_eq!(SPEED_OF_LIGHT, 299792458.0);
        assert_eq!(PhysConst::C_M_PER_S, 299792458.0);
    }

    #[test]
    fn builtin_alias() {
        let s = Substrate::builtin("RT5880LZ").unwrap();
        assert_eq!(s.eps_r, 1.96);
        assert_eq!(m_to_mm(s.height_m), 0.762);
        assert!(Substrate::builtin("fr4").is_none());
    }

    #[test]
    fn target_and_band_validation() {
        assert!(DesignTarget::new(0.0, 50.0).is_err());
        assert!(DesignTarget::new(28e9, -1.0).is_err());
        assert!(BandSpec::new(30e9, 26e9, 10).is_err());
        assert!(BandSpec::new(26e9, 30e9, 1).is_err());
        let b = BandSpec::new(26e9, 30e9, 2).unwrap();
        assert_eq!(b.frequencies(), vec![26e9, 30e9]);
        let f = BandSpec::new(26e9, 30e9, 401).unwrap().frequencies();
        assert_eq!(f[0], 26e9);
        assert_eq!(f[400], 30e9);
        assert!(f.windows(2).all(|w| w[0] < w[1]));
    }

    proptest! {
        #[test]
        fn mm_round_trip_is_exact(n in -10_000_000_000_000i64..10_000_000_000_000i64) {
            let mm = n as f64 / 1e9;
            prop_assert_eq!(m_to_mm(mm_to_m(mm)), mm);
        }
    }
}
