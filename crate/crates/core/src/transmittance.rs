//! Global atmospheric light and the region-adaptive transmittance map.
//!
//! The chain is: boundary-constrained initial map, bright-region compensation
//! of that map, a light-source term computed from the RGB product, and a
//! min-max rescale of their sum into `[t0, t1]`.

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imgcore::{Plane, RgbImage};

/// Dark-channel window and the fraction of dark-channel pixels searched for the airlight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DcpParams {
    pub patch_radius: usize,
    pub bright_fraction: f64,
}

impl Default for DcpParams {
    fn default() -> Self {
        DcpParams {
            patch_radius: 7,
            bright_fraction: 0.001,
        }
    }
}

impl DcpParams {
    pub fn validate(&self) -> Result<()> {
        if self.patch_radius < 1 {
            return Err(Error::invalid("patch_radius", "must be >= 1"));
        }
        if !(self.bright_fraction > 0.0 && self.bright_fraction <= 0.05) {
            return Err(Error::invalid("bright_fraction", "must lie in (0, 0.05]"));
        }
        Ok(())
    }
}

/// Radiance bounds, in `[0, 1]` units (8-bit 20 and 300 divided by 255).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoundaryParams {
    pub c0: [f64; 3],
    pub c1: [f64; 3],
}

impl Default for BoundaryParams {
    fn default() -> Self {
        BoundaryParams {
            c0: [20.0 / 255.0; 3],
            c1: [300.0 / 255.0; 3],
        }
    }
}

impl BoundaryParams {
    pub fn validate(&self) -> Result<()> {
        for c in 0..3 {
            if !(self.c0[c] >= 0.0 && self.c0[c] < self.c1[c]) {
                return Err(Error::invalid("c0/c1", "need 0 <= c0 < c1 per channel"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorrectionParams {
    pub eta1: f64,
    pub bright_offset: f64,
    pub eta2: f64,
    pub tb_low: f64,
    pub tb_high: f64,
    pub t0: f64,
    pub t1: f64,
}

impl Default for CorrectionParams {
    fn default() -> Self {
        CorrectionParams {
            eta1: 0.3,
            bright_offset: 0.25,
            eta2: 0.4,
            tb_low: 0.05,
            tb_high: 0.1,
            t0: 0.2,
            t1: 0.85,
        }
    }
}

impl CorrectionParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.eta1 > 0.0 && self.eta1 < 1.0) {
            return Err(Error::invalid("eta1", "must lie in (0, 1)"));
        }
        if !(self.eta2 > 0.0 && self.eta2 < 1.0) {
            return Err(Error::invalid("eta2", "must lie in (0, 1)"));
        }
        if !(self.t0 > 0.0 && self.t0 < self.t1 && self.t1 <= 1.0) {
            return Err(Error::invalid("t0/t1", "need 0 < t0 < t1 <= 1"));
        }
        if !(self.bright_offset.is_finite() && self.tb_low.is_finite() && self.tb_high.is_finite()) {
            return Err(Error::invalid("bright_offset/tb", "must be finite"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Stage {
    Initial,
    Compensated,
    Normalized,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransmittanceMap {
    pub t: Plane,
    pub stage: Stage,
}

impl TransmittanceMap {
    pub fn new(t: Plane, stage: Stage) -> Self {
        TransmittanceMap { t, stage }
    }
}

fn min_filter_1d(src: &[f64], r: usize, out: &mut [f64]) {
    let n = src.len();
    for i in 0..n {
        let lo = i.saturating_sub(r);
        let hi = (i + r).min(n - 1);
        out[i] = src[lo..=hi].iter().copied().fold(f64::INFINITY, f64::min);
    }
}

/// Per-pixel minimum over channels and the `(2r+1)²` neighbourhood.
pub fn dark_channel(img: &RgbImage, params: &DcpParams) -> Plane {
    let (w, h) = img.dims();
    let r = params.patch_radius;
    let mut chan_min = Plane::new(w, h, 0.0);
    for (i, v) in chan_min.data_mut().iter_mut().enumerate() {
        *v = img.r.data()[i].min(img.g.data()[i]).min(img.b.data()[i]);
    }
    // rectangle min is separable; replicate padding never lowers the minimum
    let mut rows = Plane::new(w, h, 0.0);
    for y in 0..h {
        let (src, dst) = (chan_min.row(y).to_vec(), &mut rows.data_mut()[y * w..(y + 1) * w]);
        min_filter_1d(&src, r, dst);
    }
    let mut out = Plane::new(w, h, 0.0);
    let mut col = vec![0.0; h];
    let mut res = vec![0.0; h];
    for x in 0..w {
        for y in 0..h {
            col[y] = rows.get(x, y);
        }
        min_filter_1d(&col, r, &mut res);
        for y in 0..h {
            out.set(x, y, res[y]);
        }
    }
    out
}

/// Among the brightest `bright_fraction` of dark-channel pixels, the RGB value
/// with the largest channel sum. Ties resolve to the lower raster index.
pub fn global_airlight(img: &RgbImage, params: &DcpParams) -> [f64; 3] {
    let dark = dark_channel(img, params);
    let n = dark.len();
    let count = ((n as f64 * params.bright_fraction).ceil() as usize).clamp(1, n);
    let mut order: Vec<usize> = (0..n).collect();
    let d = dark.data();
    let cmp = |a: &usize, b: &usize| d[*b].total_cmp(&d[*a]).then(a.cmp(b));
    if count < n {
        order.select_nth_unstable_by(count - 1, cmp);
    }
    let top = &mut order[..count];
    top.sort_unstable_by(cmp);
    let sum = |i: usize| img.r.data()[i] + img.g.data()[i] + img.b.data()[i];
    let mut best = top[0];
    for &i in top.iter() {
        if sum(i) > sum(best) {
            best = i;
        }
    }
    [img.r.data()[best], img.g.data()[best], img.b.data()[best]]
}

const AIRLIGHT_NUDGE: f64 = 1e-6;

/// Move `a` strictly inside `(c0, c1)` per channel so the boundary ratios stay finite.
pub fn interior_airlight(a: [f64; 3], bp: &BoundaryParams) -> [f64; 3] {
    let mut out = a;
    for c in 0..3 {
        if out[c] <= bp.c0[c] {
            warn!("airlight channel {c} = {} not above c0, nudged inward", out[c]);
            out[c] = bp.c0[c] + AIRLIGHT_NUDGE;
        } else if out[c] >= bp.c1[c] {
            warn!("airlight channel {c} = {} not below c1, nudged inward", out[c]);
            out[c] = bp.c1[c] - AIRLIGHT_NUDGE;
        }
    }
    out
}

/// Boundary-constrained transmittance, clamped to `[0, 1]`.
pub fn initial_transmittance(img: &RgbImage, airlight: [f64; 3], bp: &BoundaryParams) -> TransmittanceMap {
    let a = interior_airlight(airlight, bp);
    let mut t = Plane::new(img.width(), img.height(), 0.0);
    for (i, out) in t.data_mut().iter_mut().enumerate() {
        let px = [img.r.data()[i], img.g.data()[i], img.b.data()[i]];
        let mut v = f64::INFINITY;
        for c in 0..3 {
            let num = a[c] - px[c];
            let lower = num / (a[c] - bp.c0[c]);
            let upper = num / (a[c] - bp.c1[c]);
            v = v.min(lower.max(upper));
        }
        *out = v.clamp(0.0, 1.0);
    }
    TransmittanceMap::new(t, Stage::Initial)
}

/// Piecewise bright-region compensation. Values above `eta1` are offset and may go negative.
pub fn bright_region_compensation(t: &TransmittanceMap, cp: &CorrectionParams) -> Plane {
    debug_assert_eq!(t.stage, Stage::Initial);
    t.t.map(|v| {
        if v < cp.eta1 {
            0.0
        } else if v == cp.eta1 {
            cp.eta1
        } else {
            v - cp.bright_offset
        }
    })
}

/// Light-source term from the product of the three channels.
pub fn light_source_compensation(img: &RgbImage, cp: &CorrectionParams) -> Plane {
    let mut out = Plane::new(img.width(), img.height(), 0.0);
    for (i, v) in out.data_mut().iter_mut().enumerate() {
        let p = img.r.data()[i] * img.g.data()[i] * img.b.data()[i];
        *v = if p < cp.eta2 {
            cp.tb_low
        } else if p == cp.eta2 {
            cp.eta2
        } else {
            cp.tb_high
        };
    }
    out
}

/// Min-max rescale of `t_x + t_b` into `[t0, t1]`; a flat sum maps to the midpoint.
pub fn normalize_transmittance(t_x: &Plane, t_b: &Plane, cp: &CorrectionParams) -> Result<TransmittanceMap> {
    let sum = t_x.zip_map(t_b, |a, b| a + b)?;
    let (lo, hi) = (sum.min(), sum.max());
    let t = if hi > lo {
        let span = hi - lo;
        sum.map(|v| {
            if v == hi {
                cp.t1
            } else {
                ((v - lo) / span * (cp.t1 - cp.t0) + cp.t0).clamp(cp.t0, cp.t1)
            }
        })
    } else {
        sum.map(|_| 0.5 * (cp.t0 + cp.t1))
    };
    Ok(TransmittanceMap::new(t, Stage::Normalized))
}

/// Full correction chain for an image with a known global airlight.
pub fn corrected_transmittance(
    img: &RgbImage,
    airlight: [f64; 3],
    bp: &BoundaryParams,
    cp: &CorrectionParams,
) -> Result<TransmittanceMap> {
    let initial = initial_transmittance(img, airlight, bp);
    let t_x = bright_region_compensation(&initial, cp);
    let t_b = light_source_compensation(img, cp);
    normalize_transmittance(&t_x, &t_b, cp)
}
