#![allow(dead_code)]

use nightdehaze::imgcore::{Plane, RgbImage};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_plane(rng: &mut ChaCha8Rng, w: usize, h: usize) -> Plane {
    Plane::from_fn(w, h, |_, _| rng.gen::<f64>())
}

pub fn random_rgb(rng: &mut ChaCha8Rng, w: usize, h: usize) -> RgbImage {
    RgbImage::new(random_plane(rng, w, h), random_plane(rng, w, h), random_plane(rng, w, h)).unwrap()
}

/// Direct 2-D correlation with replicate padding, `kernel(dx, dy)` for offsets in `[-r, r]`.
pub fn brute_convolve(p: &Plane, r: isize, kernel: impl Fn(isize, isize) -> f64) -> Plane {
    let (w, h) = (p.width() as isize, p.height() as isize);
    Plane::from_fn(p.width(), p.height(), |x, y| {
        let mut acc = 0.0;
        for dy in -r..=r {
            for dx in -r..=r {
                let sx = (x as isize + dx).clamp(0, w - 1) as usize;
                let sy = (y as isize + dy).clamp(0, h - 1) as usize;
                acc += kernel(dx, dy) * p.get(sx, sy);
            }
        }
        acc
    })
}

/// Unit-sum Gaussian weights evaluated straight from the 2-D density.
pub fn gaussian_2d(sigma: f64) -> (isize, impl Fn(isize, isize) -> f64) {
    let r = (3.0 * sigma).ceil() as isize;
    let raw = move |dx: isize, dy: isize| (-((dx * dx + dy * dy) as f64) / (2.0 * sigma * sigma)).exp();
    let mut total = 0.0;
    for dy in -r..=r {
        for dx in -r..=r {
            total += raw(dx, dy);
        }
    }
    (r, move |dx, dy| raw(dx, dy) / total)
}

pub fn max_abs_diff(a: &Plane, b: &Plane) -> f64 {
    assert_eq!(a.dims(), b.dims());
    a.data().iter().zip(b.data()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut va = 0.0;
    let mut vb = 0.0;
    for (x, y) in a.iter().zip(b) {
        cov += (x - ma) * (y - mb);
        va += (x - ma) * (x - ma);
        vb += (y - mb) * (y - mb);
    }
    cov / (va.sqrt() * vb.sqrt())
}
