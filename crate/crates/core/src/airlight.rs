//! Spatially varying atmospheric light: blur the Y plane, return to RGB, blur again.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imgcore::{gaussian_filter, rgb_to_yuv, yuv_to_rgb_unclamped, RgbImage, YuvImage};

/// Blur widths for the two passes. `None` derives them from the image size
/// (`max(W, H) / 16` and `max(W, H) / 32`).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AirlightParams {
    pub sigma1: Option<f64>,
    pub sigma2: Option<f64>,
}

impl AirlightParams {
    pub fn validate(&self) -> Result<()> {
        for (name, s) in [("sigma1", self.sigma1), ("sigma2", self.sigma2)] {
            if let Some(s) = s {
                if !(s.is_finite() && s > 0.0) {
                    return Err(Error::invalid(name, "must be positive"));
                }
            }
        }
        Ok(())
    }

    /// Concrete `(sigma1, sigma2)` for an image of the given size.
    pub fn resolve(&self, width: usize, height: usize) -> (f64, f64) {
        let side = width.max(height) as f64;
        (
            self.sigma1.unwrap_or(side / 16.0),
            self.sigma2.unwrap_or(side / 32.0),
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AirlightMap {
    pub a: RgbImage,
}

pub fn estimate_airlight_map(img: &RgbImage, p: &AirlightParams) -> Result<AirlightMap> {
    p.validate()?;
    let (sigma1, sigma2) = p.resolve(img.width(), img.height());
    let yuv = rgb_to_yuv(img);
    let coarse = YuvImage {
        y: gaussian_filter(&yuv.y, sigma1)?,
        u: yuv.u,
        v: yuv.v,
    };
    let rgb = yuv_to_rgb_unclamped(&coarse);
    let refined = rgb.try_map_channels(|c| gaussian_filter(c, sigma2))?;
    Ok(AirlightMap { a: refined.clamp01() })
}
