//! Forward haze model and its inversion with a per-pixel airlight.

use crate::airlight::AirlightMap;
use crate::error::{Error, Result};
use crate::imgcore::{Plane, RgbImage};
use crate::transmittance::TransmittanceMap;

#[derive(Debug, Clone, PartialEq)]
pub struct DehazedImage {
    pub j: RgbImage,
}

fn check(img: &RgbImage, a: &AirlightMap, t: &Plane) -> Result<()> {
    img.check_same(&a.a)?;
    img.check_plane(t)
}

/// Undo the haze: `J = (I - A) / t + A`, clamped to `[0, 1]`.
pub fn invert_model(img: &RgbImage, a: &AirlightMap, t: &TransmittanceMap) -> Result<DehazedImage> {
    check(img, a, &t.t)?;
    let t_min = t.t.min();
    if !(t_min > 0.0) {
        return Err(Error::NonPositiveTransmittance(t_min));
    }
    let mut j = RgbImage::filled(img.width(), img.height(), [0.0; 3]);
    let td = t.t.data();
    for ((out, i), a) in j.channels_mut().into_iter().zip(img.channels()).zip(a.a.channels()) {
        for (k, o) in out.data_mut().iter_mut().enumerate() {
            let av = a.data()[k];
            *o = ((i.data()[k] - av) / td[k] + av).clamp(0.0, 1.0);
        }
    }
    Ok(DehazedImage { j })
}

/// Apply the haze: `I = J t + A (1 - t)` with `t` in `[0, 1]`.
pub fn synthesize_haze(clean: &RgbImage, a: &AirlightMap, t: &TransmittanceMap) -> Result<RgbImage> {
    check(clean, a, &t.t)?;
    if t.t.data().iter().any(|&v| !(0.0..=1.0).contains(&v)) {
        return Err(Error::invalid("t", "transmittance must lie in [0, 1]"));
    }
    let mut out = RgbImage::filled(clean.width(), clean.height(), [0.0; 3]);
    let td = t.t.data();
    for ((o, j), a) in out.channels_mut().into_iter().zip(clean.channels()).zip(a.a.channels()) {
        for (k, v) in o.data_mut().iter_mut().enumerate() {
            let tk = td[k];
            *v = j.data()[k] * tk + a.data()[k] * (1.0 - tk);
        }
    }
    Ok(out)
}
