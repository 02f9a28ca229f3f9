use std::path::{Path, PathBuf};

use clap::Args;
use patchkit::domain::{ghz_to_hz, mm_to_m, validate_substrate, BandSpec, DesignTarget, Substrate};
use patchkit::layout::UslotSpec;
use patchkit::radiation::DEFAULT_EFFICIENCY;
use patchkit::synthesis::TlmSolution;
use patchkit::tune::ToleranceSpec;
use serde::Deserialize;

/// JSON run configuration. Every field is optional; command-line flags
/// override whatever the file sets.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub target: Option<TargetConfig>,
    pub substrate: Option<SubstrateConfig>,
    pub band: Option<BandConfig>,
    pub efficiency: Option<f64>,
    pub uslot: Option<UslotConfig>,
    pub tolerance: Option<ToleranceConfig>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetConfig {
    pub f_ghz: Option<f64>,
    pub z0_ohm: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubstrateConfig {
    pub name: Option<String>,
    pub eps_r: Option<f64>,
    pub h_mm: Option<f64>,
    pub tand: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandConfig {
    pub start_ghz: Option<f64>,
    pub stop_ghz: Option<f64>,
    pub points: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UslotConfig {
    /// `"default"` or `"none"`.
    pub mode: Option<String>,
    pub outer_w_mm: Option<f64>,
    pub outer_l_mm: Option<f64>,
    pub arm_w_mm: Option<f64>,
    pub center_x_mm: Option<f64>,
    pub center_y_mm: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceConfig {
    pub dim_tol: Option<f64>,
    pub eps_tol: Option<f64>,
    pub n: Option<usize>,
    pub seed: Option<u64>,
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonFlags {
    /// JSON run configuration; flags take precedence.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Design frequency in GHz.
    #[arg(long = "f", value_name = "GHZ", allow_negative_numbers = true)]
    pub f_ghz: Option<f64>,
    /// Reference impedance in ohms.
    #[arg(long, value_name = "OHM", allow_negative_numbers = true)]
    pub z0: Option<f64>,
    /// Built-in substrate alias (rt5880lz).
    #[arg(long)]
    pub substrate: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    pub eps_r: Option<f64>,
    /// Substrate height in mm.
    #[arg(long, allow_negative_numbers = true)]
    pub h_mm: Option<f64>,
    /// Loss tangent.
    #[arg(long, allow_negative_numbers = true)]
    pub tand: Option<f64>,
    /// Sweep band in GHz.
    #[arg(long, num_args = 2, value_names = ["START", "STOP"], allow_negative_numbers = true)]
    pub band: Option<Vec<f64>>,
    /// Number of sweep points.
    #[arg(long)]
    pub points: Option<usize>,
    /// Radiation efficiency in (0, 1].
    #[arg(long, allow_negative_numbers = true)]
    pub efficiency: Option<f64>,
    /// Ground-plane U-slot: `default` or `none`.
    #[arg(long, value_name = "MODE")]
    pub uslot: Option<String>,
    #[arg(long, value_name = "MM", allow_negative_numbers = true)]
    pub uslot_w_mm: Option<f64>,
    #[arg(long, value_name = "MM", allow_negative_numbers = true)]
    pub uslot_l_mm: Option<f64>,
    #[arg(long, value_name = "MM", allow_negative_numbers = true)]
    pub uslot_arm_mm: Option<f64>,
    #[arg(long, value_name = "MM", allow_negative_numbers = true)]
    pub uslot_x_mm: Option<f64>,
    #[arg(long, value_name = "MM", allow_negative_numbers = true)]
    pub uslot_y_mm: Option<f64>,
    /// Relative 1-sigma tolerance of patch width and length.
    #[arg(long, allow_negative_numbers = true)]
    pub dim_tol: Option<f64>,
    /// Relative 1-sigma tolerance of the permittivity.
    #[arg(long, allow_negative_numbers = true)]
    pub eps_tol: Option<f64>,
    /// Monte Carlo sample count.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

pub fn load_config(path: &Path) -> Result<RunConfig, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("invalid config {}: {e}", path.display()))
}

impl CommonFlags {
    /// Overlays the flags on `cfg`.
    pub fn apply(&self, mut cfg: RunConfig) -> RunConfig {
        let t = cfg.target.get_or_insert_with(Default::default);
        set(&mut t.f_ghz, self.f_ghz);
        set(&mut t.z0_ohm, self.z0);

        let s = cfg.substrate.get_or_insert_with(Default::default);
        set(&mut s.name, self.substrate.clone());
        set(&mut s.eps_r, self.eps_r);
        set(&mut s.h_mm, self.h_mm);
        set(&mut s.tand, self.tand);

        let b = cfg.band.get_or_insert_with(Default::default);
        if let Some(band) = &self.band {
            b.start_ghz = Some(band[0]);
            b.stop_ghz = Some(band[1]);
        }
        set(&mut b.points, self.points);

        set(&mut cfg.efficiency, self.efficiency);

        let u = cfg.uslot.get_or_insert_with(Default::default);
        set(&mut u.mode, self.uslot.clone());
        set(&mut u.outer_w_mm, self.uslot_w_mm);
        set(&mut u.outer_l_mm, self.uslot_l_mm);
        set(&mut u.arm_w_mm, self.uslot_arm_mm);
        set(&mut u.center_x_mm, self.uslot_x_mm);
        set(&mut u.center_y_mm, self.uslot_y_mm);

        let tol = cfg.tolerance.get_or_insert_with(Default::default);
        set(&mut tol.dim_tol, self.dim_tol);
        set(&mut tol.eps_tol, self.eps_tol);
        set(&mut tol.n, self.n);
        set(&mut tol.seed, self.seed);

        set(&mut cfg.out, self.out.clone());
        cfg
    }
}

fn set<T>(slot: &mut Option<T>, flag: Option<T>) {
    if flag.is_some() {
        *slot = flag;
    }
}

pub const DEFAULT_F_GHZ: f64 = 28.0;
pub const DEFAULT_OUT: &str = "patchkit-out";
/// Default sweep half-width relative to the design frequency.
pub const DEFAULT_BAND_HALF_WIDTH: f64 = 0.075;
pub const DEFAULT_POINTS: usize = 401;
pub const DEFAULT_DIM_TOL: f64 = 0.01;
pub const DEFAULT_EPS_TOL: f64 = 0.0;
pub const DEFAULT_N: usize = 200;
pub const DEFAULT_SEED: u64 = 1;

/// U-slot request, resolved against the tuned patch later.
#[derive(Debug, Clone, Default)]
pub struct UslotRequest {
    pub enabled: bool,
    pub outer_w_m: Option<f64>,
    pub outer_l_m: Option<f64>,
    pub arm_w_m: Option<f64>,
    pub center_x_m: Option<f64>,
    pub center_y_m: Option<f64>,
}

impl UslotRequest {
    pub fn resolve(&self, tlm: &TlmSolution) -> patchkit::Result<Option<UslotSpec>> {
        if !self.enabled {
            return Ok(None);
        }
        let d = UslotSpec::default_for(tlm);
        UslotSpec::new(
            self.outer_w_m.unwrap_or(d.outer_w_m),
            self.outer_l_m.unwrap_or(d.outer_l_m),
            self.arm_w_m.unwrap_or(d.arm_w_m),
            self.center_x_m.unwrap_or(d.center_x_m),
            self.center_y_m.unwrap_or(d.center_y_m),
        )
        .map(Some)
    }
}

/// Validated settings in SI units.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub target: DesignTarget,
    pub sub: Substrate,
    pub band: BandSpec,
    pub efficiency: f64,
    pub uslot: UslotRequest,
    pub tolerance: ToleranceSpec,
    pub out: PathBuf,
}

impl RunConfig {
    pub fn resolve(&self) -> Result<Resolved, String> {
        let t = self.target.clone().unwrap_or_default();
        let f_hz = ghz_to_hz(t.f_ghz.unwrap_or(DEFAULT_F_GHZ));
        let target =
            DesignTarget::new(f_hz, t.z0_ohm.unwrap_or(50.0)).map_err(|e| e.to_string())?;

        let s = self.substrate.clone().unwrap_or_default();
        let base = match &s.name {
            Some(n) => Substrate::builtin(n).ok_or_else(|| format!("unknown substrate {n:?}"))?,
            None => Substrate::rt5880lz(),
        };
        let custom = s.eps_r.is_some() || s.h_mm.is_some() || s.tand.is_some();
        let sub = Substrate {
            eps_r: s.eps_r.unwrap_or(base.eps_r),
            height_m: s.h_mm.map_or(base.height_m, mm_to_m),
            loss_tangent: s.tand.unwrap_or(base.loss_tangent),
            name: if custom && s.name.is_none() {
                "custom".into()
            } else {
                base.name.clone()
            },
        };
        let sub = validate_substrate(sub).map_err(|e| e.to_string())?;

        let b = self.band.clone().unwrap_or_default();
        let start = b
            .start_ghz
            .map_or((1.0 - DEFAULT_BAND_HALF_WIDTH) * f_hz, ghz_to_hz);
        let stop = b
            .stop_ghz
            .map_or((1.0 + DEFAULT_BAND_HALF_WIDTH) * f_hz, ghz_to_hz);
        let band = BandSpec::new(start, stop, b.points.unwrap_or(DEFAULT_POINTS))
            .map_err(|e| e.to_string())?;

        let efficiency = self.efficiency.unwrap_or(DEFAULT_EFFICIENCY);
        if !(efficiency > 0.0 && efficiency <= 1.0) {
            return Err(format!("efficiency must lie in (0, 1] (got {efficiency})"));
        }

        let u = self.uslot.clone().unwrap_or_default();
        let enabled = match u.mode.as_deref() {
            None | Some("none") => false,
            Some("default") => true,
            Some(other) => {
                return Err(format!(
                    "unknown uslot mode {other:?} (expected default or none)"
                ))
            }
        };
        let uslot = UslotRequest {
            enabled,
            outer_w_m: u.outer_w_mm.map(mm_to_m),
            outer_l_m: u.outer_l_mm.map(mm_to_m),
            arm_w_m: u.arm_w_mm.map(mm_to_m),
            center_x_m: u.center_x_mm.map(mm_to_m),
            center_y_m: u.center_y_mm.map(mm_to_m),
        };

        let tol = self.tolerance.clone().unwrap_or_default();
        let tolerance = ToleranceSpec::new(
            tol.dim_tol.unwrap_or(DEFAULT_DIM_TOL),
            tol.eps_tol.unwrap_or(DEFAULT_EPS_TOL),
            tol.n.unwrap_or(DEFAULT_N),
            tol.seed.unwrap_or(DEFAULT_SEED),
        )
        .map_err(|e| e.to_string())?;

        Ok(Resolved {
            target,
            sub,
            band,
            efficiency,
            uslot,
            tolerance,
            out: self
                .out
                .clone()
                .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT)),
        })
    }
}
