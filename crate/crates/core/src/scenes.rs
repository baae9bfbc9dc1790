//! Procedural night scenes and haze fields for synthetic benchmarks.

use crate::imgcore::{Plane, RgbImage};
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Clean night street: dark sky, building silhouettes with lit windows,
/// a few lamps and fine surface texture.
pub fn night_scene(width: usize, height: usize, seed: u64) -> Result<RgbImage> {
    if width < 8 || height < 8 {
        return Err(Error::ImageTooSmall {
            width,
            height,
            min: 8,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (w, h) = (width as f64, height as f64);
    let horizon = h * rng.gen_range(0.55..0.75);
    let sky_top = [0.01, 0.015, rng.gen_range(0.03..0.06)];
    let sky_low = [
        rng.gen_range(0.05..0.10),
        rng.gen_range(0.04..0.08),
        rng.gen_range(0.06..0.12),
    ];
    let ground = rng.gen_range(0.04..0.10);

    let mut img = RgbImage::from_fn(width, height, |x, y| {
        let fy = y as f64;
        if fy < horizon {
            let s = fy / horizon;
            [0, 1, 2].map(|c| sky_top[c] + (sky_low[c] - sky_top[c]) * s)
        } else {
            let s = (fy - horizon) / (h - horizon).max(1.0);
            let v = ground * (0.7 + 0.6 * s) * (1.0 + 0.05 * ((x as f64) * 0.9).sin());
            [v, v * 0.95, v * 0.9]
        }
    });

    let buildings = rng.gen_range(4..9);
    for _ in 0..buildings {
        let bw = w * rng.gen_range(0.08..0.22);
        let x0 = rng.gen_range(0.0..(w - bw).max(1.0));
        let top = horizon * rng.gen_range(0.15..0.8);
        let body = rng.gen_range(0.05..0.18);
        let tint = [1.0, rng.gen_range(0.85..1.05), rng.gen_range(0.8..1.1)];
        let win = (bw / 6.0).max(2.0);
        let lit_p = rng.gen_range(0.2..0.6);
        let warm = [rng.gen_range(0.75..1.0), rng.gen_range(0.55..0.85), rng.gen_range(0.2..0.5)];
        let cols = (bw / win) as usize;
        let rows = ((horizon - top) / win) as usize;
        let lit: Vec<bool> = (0..cols * rows).map(|_| rng.gen_bool(lit_p)).collect();
        for y in top as usize..(horizon as usize).min(height) {
            for x in x0 as usize..((x0 + bw) as usize).min(width) {
                let lx = x as f64 - x0;
                let ly = y as f64 - top;
                let (cx, cy) = ((lx / win) as usize, (ly / win) as usize);
                let inside = lx % win > win * 0.3 && ly % win > win * 0.3;
                let p = if inside && cx < cols && cy < rows && lit[cy * cols + cx] {
                    warm
                } else {
                    [0, 1, 2].map(|c| body * tint[c])
                };
                img.set_pixel(x, y, p);
            }
        }
    }

    let lamps = rng.gen_range(1..4);
    for _ in 0..lamps {
        let cx = rng.gen_range(0.05..0.95) * w;
        let cy = horizon * rng.gen_range(0.6..1.1);
        let radius = (w.min(h) * rng.gen_range(0.01..0.025)).max(1.0);
        let color = [1.0, rng.gen_range(0.7..1.0), rng.gen_range(0.4..0.9)];
        for y in 0..height {
            for x in 0..width {
                let d2 = (x as f64 - cx).powi(2) + (y as f64 - cy).powi(2);
                let glow = (-d2 / (2.0 * (4.0 * radius).powi(2))).exp() * 0.35;
                let core = if d2 <= radius * radius { 1.0 } else { 0.0 };
                let mut p = img.pixel(x, y);
                for c in 0..3 {
                    p[c] = (p[c] + glow * color[c]).max(core * color[c]);
                }
                img.set_pixel(x, y, p);
            }
        }
    }

    let grain: Vec<f64> = (0..width * height).map(|_| rng.gen_range(-0.04..0.04)).collect();
    let img = img.map_channels(|c| {
        Plane::from_fn(width, height, |x, y| {
            (c.get(x, y) * (1.0 + grain[y * width + x])).clamp(0.0, 1.0)
        })
    });
    Ok(img)
}

/// How a synthetic transmittance map varies over the frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum TransmittanceField {
    Constant { t: f64 },
    /// `exp(−β d)` with `d` the distance to the centre normalised by the half-diagonal.
    Radial { beta: f64, cx: f64, cy: f64 },
}

impl TransmittanceField {
    pub fn render(&self, width: usize, height: usize) -> Result<Plane> {
        match *self {
            TransmittanceField::Constant { t } => {
                if !(t > 0.0 && t <= 1.0) {
                    return Err(Error::invalid("t", "must be in (0, 1]"));
                }
                Ok(Plane::new(width, height, t))
            }
            TransmittanceField::Radial { beta, cx, cy } => {
                if !(beta.is_finite() && beta >= 0.0) {
                    return Err(Error::invalid("beta", "must be finite and non-negative"));
                }
                let half_diag = ((width * width + height * height) as f64).sqrt() / 2.0;
                Ok(Plane::from_fn(width, height, |x, y| {
                    let d = ((x as f64 - cx * (width - 1) as f64).powi(2) + (y as f64 - cy * (height - 1) as f64).powi(2)).sqrt();
                    (-beta * d / half_diag).exp()
                }))
            }
        }
    }
}

/// Synthetic airlight: flat, or a colored glow over a base level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum AirlightField {
    Constant { color: [f64; 3] },
    /// Base level plus a Gaussian bump of `color` at `(cx, cy)` (fractions of the frame),
    /// `sigma` as a fraction of the larger side.
    Bump { base: [f64; 3], color: [f64; 3], cx: f64, cy: f64, sigma: f64 },
}

impl AirlightField {
    /// Random colored bump, as used by the synthetic benchmark.
    pub fn random_bump(rng: &mut impl Rng) -> Self {
        let b = rng.gen_range(0.1..0.25);
        AirlightField::Bump {
            base: [b, b * rng.gen_range(0.85..1.0), b * rng.gen_range(0.75..1.0)],
            color: [rng.gen_range(0.45..0.7), rng.gen_range(0.3..0.55), rng.gen_range(0.1..0.4)],
            cx: rng.gen_range(0.2..0.8),
            cy: rng.gen_range(0.2..0.6),
            sigma: rng.gen_range(0.15..0.35),
        }
    }

    pub fn render(&self, width: usize, height: usize) -> Result<RgbImage> {
        match *self {
            AirlightField::Constant { color } => Ok(RgbImage::filled(width, height, color.map(|v| v.clamp(0.0, 1.0)))),
            AirlightField::Bump {
                base,
                color,
                cx,
                cy,
                sigma,
            } => {
                if !(sigma.is_finite() && sigma > 0.0) {
                    return Err(Error::invalid("sigma", "must be positive"));
                }
                let s = sigma * width.max(height) as f64;
                Ok(RgbImage::from_fn(width, height, |x, y| {
                    let d2 = (x as f64 - cx * (width - 1) as f64).powi(2) + (y as f64 - cy * (height - 1) as f64).powi(2);
                    let g = (-d2 / (2.0 * s * s)).exp();
                    [0, 1, 2].map(|c| (base[c] + color[c] * g).clamp(0.0, 1.0))
                }))
            }
        }
    }
}
