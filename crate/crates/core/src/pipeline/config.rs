use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::airlight::AirlightParams;
use crate::enhance::{EnhanceParams, MsrcrParams};
use crate::error::{Error, Result};
use crate::fusion::FusionParams;
use crate::star::StarParams;
use crate::transmittance::{BoundaryParams, CorrectionParams, DcpParams};

/// Stages that can be switched off for ablation runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AblationFlags {
    /// Use the boundary-constrained map clamped to `[t0, t1]` instead of the corrected one.
    pub skip_t_correction: bool,
    /// Pass the input through as the dehazed image.
    pub skip_dehaze: bool,
    /// Blend the dehazed image with itself instead of the enhanced layers.
    pub skip_star: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunOptions {
    pub debug_dump: bool,
    /// Worker threads for batch runs; 0 picks the number of cores.
    pub threads: usize,
}

/// Every tunable of the pipeline. All sections and keys are optional in the
/// TOML form; missing ones take their defaults.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub dcp: DcpParams,
    pub boundary: BoundaryParams,
    pub correction: CorrectionParams,
    pub airlight: AirlightParams,
    pub star: StarParams,
    pub msrcr: MsrcrParams,
    pub enhance: EnhanceParams,
    pub fusion: FusionParams,
    pub ablation: AblationFlags,
    pub run: RunOptions,
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        self.dcp.validate()?;
        self.boundary.validate()?;
        self.correction.validate()?;
        self.airlight.validate()?;
        self.star.validate()?;
        self.msrcr.validate()?;
        self.enhance.validate()?;
        self.fusion.validate()
    }

    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: PipelineConfig = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate().map_err(|e| Error::Config(e.to_string()))?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config is always representable as TOML")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }
}
