//! Microstrip patch antenna synthesis and analysis.

pub mod domain;
pub mod error;
pub mod layout;
pub mod mstripline;
pub mod network;
pub mod numerics;
pub mod radiation;
pub mod report;
pub mod synthesis;
pub mod tune;

pub use domain::{BandSpec, DesignTarget, Substrate};
pub use error::{Error, Result};
pub use layout::PatchDesign;
pub use synthesis::{synthesize_patch, TlmSolution};
