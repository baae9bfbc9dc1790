//! Two-phase fusion: multiply the enhanced layers, then blend with the dehazed image.

use serde::{Deserialize, Serialize};

use crate::dehaze::DehazedImage;
use crate::error::{Error, Result};
use crate::imgcore::{Plane, RgbImage};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FusionParams {
    pub xi: f64,
}

impl Default for FusionParams {
    fn default() -> Self {
        FusionParams { xi: 0.5 }
    }
}

impl FusionParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.xi > 0.0 && self.xi <= 1.0) {
            return Err(Error::invalid("xi", "must lie in (0, 1]"));
        }
        Ok(())
    }
}

/// Texture is broadcast to all three channels of the structure layer.
pub fn nonlinear_fuse(structure: &RgbImage, texture: &Plane) -> Result<RgbImage> {
    structure.check_plane(texture)?;
    structure.try_map_channels(|c| c.zip_map(texture, |s, t| (s * t).clamp(0.0, 1.0)))
}

pub fn linear_fuse(dehazed: &DehazedImage, enhanced: &RgbImage, p: &FusionParams) -> Result<RgbImage> {
    dehazed.j.check_same(enhanced)?;
    let xi = p.xi;
    Ok(RgbImage {
        r: dehazed.j.r.zip_map(&enhanced.r, |a, b| (xi * (a + b)).clamp(0.0, 1.0))?,
        g: dehazed.j.g.zip_map(&enhanced.g, |a, b| (xi * (a + b)).clamp(0.0, 1.0))?,
        b: dehazed.j.b.zip_map(&enhanced.b, |a, b| (xi * (a + b)).clamp(0.0, 1.0))?,
    })
}
