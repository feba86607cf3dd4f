//! Shared JSON configuration document.

use serde::{Deserialize, Serialize};

use crate::bath::BathSpec;
use crate::dispersion::DispersionInit;
use crate::potential::CubicPotential;
use crate::sim::SimConfig;

/// Top-level configuration consumed by the command-line tools:
/// `{ "bath": .., "potential": .., "dispersion": .., "sim": .., "sweep": .. }`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Config {
    pub bath: BathSpec,
    pub potential: CubicPotential,
    #[serde(default)]
    pub dispersion: DispersionInit,
    #[serde(default)]
    pub sim: Option<SimConfig>,
    #[serde(default)]
    pub sweep: Option<serde_json::Value>,
}
