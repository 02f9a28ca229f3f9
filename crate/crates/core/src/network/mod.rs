//! One-port circuit model of the fed patch.
//!
//! The patch is the classical two-slot transmission-line circuit: each
//! radiating edge is a slot admittance `G1 + jB1`, joined by a microstrip
//! line of the patch width. A quarter-wave transformer and a 50 ohm feed line
//! are cascaded in front of it. Results are circuit-model estimates; the
//! ground-plane U-slot has no electrical effect here.

mod circuit;
mod slot;
mod sweep;

pub use circuit::{
    cascade_qwt, edge_admittance, input_admittance, input_impedance, return_loss_db, s11, s11_db,
    transform_line, vswr, Abcd, ComplexValue,
};
pub use slot::{
    default_panels, edge_resistance_slot_model, mutual_conductance, slot_conductance,
    slot_conductance_with, slot_integral, slot_susceptance,
};
pub use sweep::{
    bandwidth, find_resonance, patch_resonance, reflection_at, resonance_estimate,
    resonant_resistance, sweep, sweep_with_threshold, Band, BandResult, SweepResult,
    DEFAULT_THRESHOLD_DB,
};
