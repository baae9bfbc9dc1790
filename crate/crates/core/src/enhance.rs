//! Structure-layer brightening and color restoration, texture-layer sharpening.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imgcore::{gaussian_filter, log_filter, Plane, RgbImage};

const LOG_EPS: f64 = 1e-6;
const RESCALE_LOW: f64 = 0.01;
const RESCALE_HIGH: f64 = 0.99;
/// Percentile spans below this are treated as a flat channel.
const FLAT_SPAN: f64 = 1e-9;
const TEXTURE_MAX: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MsrcrParams {
    pub scales: [f64; 3],
    pub gain: f64,
    /// Offset in 8-bit units; divided by 255 when applied.
    pub offset: f64,
    pub crf_alpha: f64,
    pub crf_beta: f64,
}

impl Default for MsrcrParams {
    fn default() -> Self {
        MsrcrParams {
            scales: [15.0, 80.0, 250.0],
            gain: 192.0,
            offset: -30.0,
            crf_alpha: 125.0,
            crf_beta: 46.0,
        }
    }
}

impl MsrcrParams {
    pub fn validate(&self) -> Result<()> {
        if !self.scales.iter().all(|s| s.is_finite() && *s > 0.0) {
            return Err(Error::invalid("scales", "must be positive"));
        }
        if !self.scales.windows(2).all(|w| w[0] <= w[1]) {
            return Err(Error::invalid("scales", "must be ascending"));
        }
        if !(self.gain > 0.0) {
            return Err(Error::invalid("gain", "must be positive"));
        }
        if !(self.offset.is_finite() && self.crf_alpha > 0.0 && self.crf_beta.is_finite()) {
            return Err(Error::invalid("offset/crf", "must be finite, crf_alpha positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnhanceParams {
    pub gamma: f64,
    pub log_sigma: f64,
    pub sharpen_kappa: f64,
}

impl Default for EnhanceParams {
    fn default() -> Self {
        EnhanceParams {
            gamma: 0.4,
            log_sigma: 0.5,
            sharpen_kappa: 1.0,
        }
    }
}

impl EnhanceParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(Error::invalid("gamma", "must lie in (0, 1)"));
        }
        if !(self.log_sigma > 0.0 && self.log_sigma.is_finite()) {
            return Err(Error::invalid("log_sigma", "must be positive"));
        }
        if !(self.sharpen_kappa >= 0.0 && self.sharpen_kappa.is_finite()) {
            return Err(Error::invalid("sharpen_kappa", "must be non-negative"));
        }
        Ok(())
    }
}

pub fn gamma_correct(s: &RgbImage, gamma: f64) -> Result<RgbImage> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::invalid("gamma", "must be positive"));
    }
    Ok(s.map(|v| v.max(0.0).powf(gamma)))
}

/// Value at quantile `q` (nearest rank on `round(q·(n−1))`).
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let idx = (q * (sorted.len() - 1) as f64).round() as usize;
    sorted[idx]
}

/// Affine map of the 1st..99th percentile span onto `[0, 1]`, then clamp.
fn percentile_rescale(p: &Plane) -> Plane {
    let mut sorted = p.data().to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let lo = quantile(&sorted, RESCALE_LOW);
    let hi = quantile(&sorted, RESCALE_HIGH);
    if hi - lo <= FLAT_SPAN {
        return p.map(|_| 0.5);
    }
    p.map(|v| ((v - lo) / (hi - lo)).clamp(0.0, 1.0))
}

/// Multi-scale retinex with color restoration.
pub fn msrcr(s: &RgbImage, p: &MsrcrParams) -> Result<RgbImage> {
    p.validate()?;
    let (w, h) = s.dims();
    let mut sum = Plane::new(w, h, 0.0);
    for c in s.channels() {
        for (a, v) in sum.data_mut().iter_mut().zip(c.data()) {
            *a += v;
        }
    }
    let log_sum = sum.map(|v| (v + LOG_EPS).ln());
    let offset = p.offset / 255.0;
    let n = p.scales.len() as f64;

    s.try_map_channels(|c| {
        let log_c = c.map(|v| (v + LOG_EPS).ln());
        let mut retinex = Plane::new(w, h, 0.0);
        for &sigma in &p.scales {
            let blurred = gaussian_filter(c, sigma)?;
            for ((acc, lc), b) in retinex.data_mut().iter_mut().zip(log_c.data()).zip(blurred.data()) {
                *acc += lc - (b + LOG_EPS).ln();
            }
        }
        let mut out = Plane::new(w, h, 0.0);
        for (i, o) in out.data_mut().iter_mut().enumerate() {
            let restore = p.crf_beta * ((p.crf_alpha * c.data()[i] + LOG_EPS).ln() - log_sum.data()[i]);
            *o = p.gain * (restore * retinex.data()[i] / n + offset);
        }
        Ok(percentile_rescale(&out))
    })
}

pub fn enhance_structure(s: &RgbImage, ep: &EnhanceParams, mp: &MsrcrParams) -> Result<RgbImage> {
    ep.validate()?;
    msrcr(&gamma_correct(s, ep.gamma)?, mp)
}

/// LoG unsharp masking, `T − κ·LoG(T)`, clamped to `[0, 2]`.
pub fn enhance_texture(t: &Plane, ep: &EnhanceParams) -> Result<Plane> {
    ep.validate()?;
    Ok(sharpen(t, ep)?.clamp(0.0, TEXTURE_MAX))
}

/// Unclamped `T − κ·LoG(T)`.
pub fn sharpen(t: &Plane, ep: &EnhanceParams) -> Result<Plane> {
    if !t.is_finite() {
        return Err(Error::NonFinite);
    }
    if ep.sharpen_kappa == 0.0 {
        return Ok(t.clone());
    }
    let response = log_filter(t, ep.log_sigma)?;
    t.zip_map(&response, |v, l| v - ep.sharpen_kappa * l)
}
