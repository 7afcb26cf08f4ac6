//! Declarative campaign configuration: one file drives build, simulate, fit.

use crate::template::BlockKind;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CampaignConfig {
    /// schema version, currently 1
    pub version: u32,
    pub kind: BlockKind,
    pub distances: Vec<u32>,
    /// (p_E, p_P) points
    pub rates: Vec<(f64, f64)>,
    pub trials: u64,
    pub seed: u64,
    /// 0 selects the rayon default
    #[serde(default)]
    pub workers: usize,
    pub output: PathBuf,
}

impl CampaignConfig {
    pub fn load(path: &std::path::Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        let cfg: CampaignConfig =
            serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn save(&self, path: &std::path::Path) -> Result<(), String> {
        let text = serde_json::to_string_pretty(self).map_err(|e| e.to_string())?;
        std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.version != 1 {
            return Err(format!("unsupported config version {}", self.version));
        }
        if self.distances.is_empty() {
            return Err("no distances listed".into());
        }
        for &(pe, pp) in &self.rates {
            if !(0.0..=1.0).contains(&pe) || !(0.0..=1.0).contains(&pp) {
                return Err(format!("rate ({pe}, {pp}) outside [0, 1]"));
            }
        }
        Ok(())
    }
}
