//! Bundled experiment configurations.

use crate::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::scenario::Scenario;

pub const NAMES: [&str; 6] = [
    "comms",
    "radar",
    "comms_desk",
    "radar_desk",
    "comms_smoke",
    "radar_smoke",
];

pub fn json(name: &str) -> Option<&'static str> {
    Some(match name {
        "comms" => include_str!("../presets/comms.json"),
        "radar" => include_str!("../presets/radar.json"),
        "comms_desk" => include_str!("../presets/comms_desk.json"),
        "radar_desk" => include_str!("../presets/radar_desk.json"),
        "comms_smoke" => include_str!("../presets/comms_smoke.json"),
        "radar_smoke" => include_str!("../presets/radar_smoke.json"),
        _ => return None,
    })
}

pub fn config(name: &str) -> Result<ExperimentConfig> {
    let text = json(name).ok_or_else(|| {
        Error::Config(format!(
            "unknown preset `{name}` (available: {})",
            NAMES.join(", ")
        ))
    })?;
    ExperimentConfig::from_json(text)
}

pub fn scenario(name: &str) -> Result<Scenario> {
    config(name)?.scenario()
}
