//! Full-reference (PSNR, SSIM) and no-reference (AG, IE) quality measures,
//! plus CIEDE2000 for color-region comparisons.

mod ciede;
mod registry;

pub use ciede::{ciede2000, region_ciede, region_mean_lab, rgb_to_lab, rgb_to_xyz, xyz_to_lab, Lab, Region};
pub use registry::{Metric, MetricRegistry};

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::imgcore::{luminance, quantize, Plane, RgbImage};

pub const SSIM_WINDOW: usize = 11;
pub const SSIM_SIGMA: f64 = 1.5;
pub const SSIM_K1: f64 = 0.01;
pub const SSIM_K2: f64 = 0.03;

/// Serializes an infinite value as the string `"inf"`.
pub fn serialize_db<S: Serializer>(v: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(x) if x.is_infinite() => s.serialize_str("inf"),
        Some(x) => s.serialize_f64(*x),
        None => s.serialize_none(),
    }
}

/// Formats a metric value for CSV: empty when absent, `inf` for the PSNR sentinel.
pub fn format_value(v: Option<f64>) -> String {
    match v {
        None => String::new(),
        Some(x) if x.is_infinite() => "inf".to_string(),
        Some(x) => format!("{x:.6}"),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct MetricsReport {
    #[serde(serialize_with = "serialize_db")]
    pub psnr: Option<f64>,
    pub ssim: Option<f64>,
    pub ag: Option<f64>,
    pub ie: Option<f64>,
    pub ciede2000: Option<f64>,
}

/// `10·log10(1/MSE)` over all channels; `+∞` for identical images.
pub fn psnr(a: &RgbImage, b: &RgbImage) -> Result<f64> {
    a.check_same(b)?;
    let mut sse = 0.0;
    for (pa, pb) in a.channels().iter().zip(b.channels()) {
        for (x, y) in pa.data().iter().zip(pb.data()) {
            sse += (x - y) * (x - y);
        }
    }
    let mse = sse / (3 * a.r.len()) as f64;
    if mse == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (1.0 / mse).log10())
}

fn ssim_window() -> Vec<f64> {
    let r = (SSIM_WINDOW / 2) as isize;
    let mut k: Vec<f64> = (-r..=r)
        .map(|i| (-((i * i) as f64) / (2.0 * SSIM_SIGMA * SSIM_SIGMA)).exp())
        .collect();
    let s: f64 = k.iter().sum();
    k.iter_mut().for_each(|v| *v /= s);
    k
}

/// Separable weighted sum over every fully-contained window position.
fn filter_valid(p: &Plane, k: &[f64]) -> Plane {
    let n = k.len();
    let (w, h) = p.dims();
    let (ow, oh) = (w + 1 - n, h + 1 - n);
    let mut rows = Plane::new(ow, h, 0.0);
    for y in 0..h {
        let src = p.row(y);
        for x in 0..ow {
            rows.set(x, y, k.iter().zip(&src[x..x + n]).map(|(a, b)| a * b).sum());
        }
    }
    let mut out = Plane::new(ow, oh, 0.0);
    for y in 0..oh {
        for x in 0..ow {
            let mut acc = 0.0;
            for (j, kv) in k.iter().enumerate() {
                acc += kv * rows.get(x, y + j);
            }
            out.set(x, y, acc);
        }
    }
    out
}

/// Single-scale SSIM on luminance with an 11×11 Gaussian window (σ = 1.5).
pub fn ssim(a: &RgbImage, b: &RgbImage) -> Result<f64> {
    a.check_same(b)?;
    let (w, h) = a.dims();
    if w < SSIM_WINDOW || h < SSIM_WINDOW {
        return Err(Error::ImageTooSmall {
            width: w,
            height: h,
            min: SSIM_WINDOW,
        });
    }
    let ya = luminance(a);
    let yb = luminance(b);
    let k = ssim_window();
    let prod = |p: &Plane, q: &Plane| p.zip_map(q, |x, y| x * y).expect("same dims");
    let mu_a = filter_valid(&ya, &k);
    let mu_b = filter_valid(&yb, &k);
    let e_aa = filter_valid(&prod(&ya, &ya), &k);
    let e_bb = filter_valid(&prod(&yb, &yb), &k);
    let e_ab = filter_valid(&prod(&ya, &yb), &k);
    let c1 = SSIM_K1 * SSIM_K1;
    let c2 = SSIM_K2 * SSIM_K2;
    let mut total = 0.0;
    for i in 0..mu_a.len() {
        let (ma, mb) = (mu_a.data()[i], mu_b.data()[i]);
        let va = e_aa.data()[i] - ma * ma;
        let vb = e_bb.data()[i] - mb * mb;
        let cov = e_ab.data()[i] - ma * mb;
        total += ((2.0 * ma * mb + c1) * (2.0 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
    }
    Ok(total / mu_a.len() as f64)
}

/// Mean of `sqrt((Δx² + Δy²) / 2)` over the interior grid and all channels.
pub fn average_gradient(img: &RgbImage) -> Result<f64> {
    let (w, h) = img.dims();
    if w < 2 || h < 2 {
        return Err(Error::ImageTooSmall {
            width: w,
            height: h,
            min: 2,
        });
    }
    let mut total = 0.0;
    for c in img.channels() {
        for y in 0..h - 1 {
            for x in 0..w - 1 {
                let v = c.get(x, y);
                let dx = c.get(x + 1, y) - v;
                let dy = c.get(x, y + 1) - v;
                total += ((dx * dx + dy * dy) / 2.0).sqrt();
            }
        }
    }
    Ok(total / (3 * (w - 1) * (h - 1)) as f64)
}

/// Shannon entropy (bits) of the 256-bin histogram of quantized luminance.
pub fn information_entropy(img: &RgbImage) -> f64 {
    let y = luminance(img);
    let mut hist = [0usize; 256];
    for &v in y.data() {
        hist[quantize(v) as usize] += 1;
    }
    entropy_of_histogram(&hist)
}

pub(crate) fn entropy_of_histogram(hist: &[usize]) -> f64 {
    let n: usize = hist.iter().sum();
    let n = n as f64;
    let mut e = 0.0;
    for &count in hist {
        if count > 0 {
            let p = count as f64 / n;
            e -= p * p.log2();
        }
    }
    // -0.0 for a single occupied bin
    e.max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn psnr_examples() {
        let a = RgbImage::filled(4, 4, [0.2, 0.4, 0.6]);
        assert_eq!(psnr(&a, &a).unwrap(), f64::INFINITY);
        let zeros = RgbImage::filled(4, 4, [0.0; 3]);
        let ones = RgbImage::filled(4, 4, [1.0; 3]);
        assert_eq!(psnr(&zeros, &ones).unwrap(), 0.0);
        let shifted = a.map(|v| v + 1.0 / 255.0);
        assert!((psnr(&a, &shifted).unwrap() - 48.130_803_608_679_1).abs() < 1e-9);
        assert!(psnr(&a, &RgbImage::filled(3, 4, [0.0; 3])).is_err());
    }

    #[test]
    fn ssim_identity_and_size() {
        let a = RgbImage::from_fn(16, 12, |x, y| [(x * y) as f64 / 200.0, 0.3, x as f64 / 16.0]);
        assert!((ssim(&a, &a).unwrap() - 1.0).abs() < 1e-12);
        let small = RgbImage::filled(10, 20, [0.1; 3]);
        assert!(matches!(ssim(&small, &small), Err(Error::ImageTooSmall { .. })));
    }

    #[test]
    fn ag_examples() {
        assert_eq!(average_gradient(&RgbImage::filled(5, 5, [0.3; 3])).unwrap(), 0.0);
        let h = 0.05;
        let ramp = RgbImage::from_fn(8, 4, |x, _| [h * x as f64; 3]);
        assert!((average_gradient(&ramp).unwrap() - h / 2f64.sqrt()).abs() < 1e-12);
        assert!(average_gradient(&RgbImage::filled(1, 5, [0.3; 3])).is_err());
    }

    #[test]
    fn entropy_endpoints() {
        assert_eq!(information_entropy(&RgbImage::filled(7, 3, [0.42; 3])), 0.0);
        let uniform = RgbImage::from_fn(16, 16, |x, y| [(y * 16 + x) as f64 / 255.0; 3]);
        assert_eq!(information_entropy(&uniform), 8.0);
        let two = RgbImage::from_fn(4, 4, |x, _| if x < 2 { [0.0; 3] } else { [1.0; 3] });
        assert_eq!(information_entropy(&two), 1.0);
    }

    #[test]
    fn formatting() {
        assert_eq!(format_value(None), "");
        assert_eq!(format_value(Some(f64::INFINITY)), "inf");
        assert_eq!(format_value(Some(0.5)), "0.500000");
    }
}
