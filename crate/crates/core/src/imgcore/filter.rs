use super::plane::Plane;
use crate::error::{Error, Result};

fn check_sigma(sigma: f64) -> Result<()> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::invalid("sigma", format!("must be positive, got {sigma}")));
    }
    Ok(())
}

/// Truncation radius shared by the Gaussian and LoG kernels.
pub fn kernel_radius(sigma: f64) -> usize {
    (3.0 * sigma).ceil().max(1.0) as usize
}

/// Sampled 1-D Gaussian of radius `⌈3σ⌉`, normalized to unit sum.
pub fn gaussian_kernel(sigma: f64) -> Result<Vec<f64>> {
    check_sigma(sigma)?;
    let r = kernel_radius(sigma) as isize;
    let s2 = 2.0 * sigma * sigma;
    let mut k: Vec<f64> = (-r..=r).map(|i| (-((i * i) as f64) / s2).exp()).collect();
    let sum: f64 = k.iter().sum();
    k.iter_mut().for_each(|v| *v /= sum);
    Ok(k)
}

/// Sampled 2-D Laplacian of Gaussian, row-major `(2r+1)²` entries, shifted
/// so that the entries sum to zero.
pub fn log_kernel(sigma: f64) -> Result<(Vec<f64>, usize)> {
    check_sigma(sigma)?;
    let r = kernel_radius(sigma) as isize;
    let s2 = sigma * sigma;
    let norm = -1.0 / (std::f64::consts::PI * s2 * s2);
    let mut k = Vec::with_capacity(((2 * r + 1) * (2 * r + 1)) as usize);
    for y in -r..=r {
        for x in -r..=r {
            let q = (x * x + y * y) as f64 / (2.0 * s2);
            k.push(norm * (1.0 - q) * (-q).exp());
        }
    }
    let mean = k.iter().sum::<f64>() / k.len() as f64;
    k.iter_mut().for_each(|v| *v -= mean);
    Ok((k, r as usize))
}

/// Source range and boundary weights for output index `i` of a replicate-padded
/// 1-D convolution with a symmetric kernel of radius `r` over `n` samples.
struct Taps {
    lo: usize,
    hi: usize,
    /// First kernel index used for `lo`.
    k0: usize,
    left: f64,
    right: f64,
}

fn taps(i: usize, n: usize, r: usize, cum: &[f64]) -> Taps {
    let lo = i.saturating_sub(r);
    let hi = (i + r).min(n - 1);
    let k0 = lo + r - i;
    // taps that fall left of index 0 collapse onto it
    let left = if k0 > 0 { cum[k0 - 1] } else { 0.0 };
    let k_hi = hi + r - i;
    let right = cum[cum.len() - 1] - cum[k_hi];
    Taps {
        lo,
        hi,
        k0,
        left,
        right,
    }
}

fn prefix_sums(kernel: &[f64]) -> Vec<f64> {
    kernel
        .iter()
        .scan(0.0, |acc, &v| {
            *acc += v;
            Some(*acc)
        })
        .collect()
}

fn convolve_rows(p: &Plane, kernel: &[f64]) -> Plane {
    let (w, h) = p.dims();
    let r = kernel.len() / 2;
    let cum = prefix_sums(kernel);
    let plan: Vec<Taps> = (0..w).map(|x| taps(x, w, r, &cum)).collect();
    let mut out = Plane::new(w, h, 0.0);
    for y in 0..h {
        let src = p.row(y);
        let dst = &mut out.data_mut()[y * w..(y + 1) * w];
        for (x, t) in plan.iter().enumerate() {
            let k = &kernel[t.k0..t.k0 + (t.hi - t.lo + 1)];
            let s = &src[t.lo..=t.hi];
            let mut acc = t.left * src[0] + t.right * src[w - 1];
            for (a, b) in k.iter().zip(s) {
                acc += a * b;
            }
            dst[x] = acc;
        }
    }
    out
}

fn convolve_cols(p: &Plane, kernel: &[f64]) -> Plane {
    let (w, h) = p.dims();
    let r = kernel.len() / 2;
    let cum = prefix_sums(kernel);
    let mut out = Plane::new(w, h, 0.0);
    let data = p.data();
    for y in 0..h {
        let t = taps(y, h, r, &cum);
        let dst = &mut out.data_mut()[y * w..(y + 1) * w];
        let first = &data[..w];
        let last = &data[(h - 1) * w..];
        for x in 0..w {
            dst[x] = t.left * first[x] + t.right * last[x];
        }
        for (j, s) in (t.lo..=t.hi).enumerate() {
            let wgt = kernel[t.k0 + j];
            let src = &data[s * w..(s + 1) * w];
            for (d, v) in dst.iter_mut().zip(src) {
                *d += wgt * v;
            }
        }
    }
    out
}

/// Separable Gaussian blur with replicate padding.
pub fn gaussian_filter(p: &Plane, sigma: f64) -> Result<Plane> {
    let k = gaussian_kernel(sigma)?;
    Ok(convolve_cols(&convolve_rows(p, &k), &k))
}

/// Direct 2-D correlation with a square kernel of the given radius, replicate padding.
fn convolve_2d(p: &Plane, kernel: &[f64], radius: usize) -> Plane {
    let (w, h) = p.dims();
    let r = radius as isize;
    let side = 2 * radius + 1;
    debug_assert_eq!(kernel.len(), side * side);
    let mut out = Plane::new(w, h, 0.0);
    for y in 0..h {
        for x in 0..w {
            let interior = x >= radius && y >= radius && x + radius < w && y + radius < h;
            let mut acc = 0.0;
            if interior {
                for ky in 0..side {
                    let row = &p.row(y + ky - radius)[x - radius..x + radius + 1];
                    let krow = &kernel[ky * side..(ky + 1) * side];
                    for (a, b) in krow.iter().zip(row) {
                        acc += a * b;
                    }
                }
            } else {
                for ky in -r..=r {
                    for kx in -r..=r {
                        let kv = kernel[((ky + r) as usize) * side + (kx + r) as usize];
                        acc += kv * p.get_clamped(x as isize + kx, y as isize + ky);
                    }
                }
            }
            out.set(x, y, acc);
        }
    }
    out
}

/// Laplacian-of-Gaussian response with replicate padding.
pub fn log_filter(p: &Plane, sigma: f64) -> Result<Plane> {
    let (k, r) = log_kernel(sigma)?;
    Ok(convolve_2d(p, &k, r))
}

/// Mean over a `(2r+1)²` window with replicate padding.
pub fn box_mean(p: &Plane, radius: usize) -> Plane {
    let k = vec![1.0 / (2 * radius + 1) as f64; 2 * radius + 1];
    convolve_cols(&convolve_rows(p, &k), &k)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_sigma() {
        let p = Plane::new(4, 4, 0.5);
        assert!(gaussian_filter(&p, 0.0).is_err());
        assert!(gaussian_filter(&p, -1.0).is_err());
        assert!(log_filter(&p, 0.0).is_err());
        assert!(gaussian_filter(&p, f64::NAN).is_err());
    }

    #[test]
    fn constant_plane_is_preserved() {
        let p = Plane::new(9, 7, 0.37);
        let g = gaussian_filter(&p, 2.0).unwrap();
        assert!(g.data().iter().all(|v| (v - 0.37).abs() < 1e-14));
        let l = log_filter(&p, 1.0).unwrap();
        assert!(l.data().iter().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn kernels_are_normalized() {
        let k = gaussian_kernel(1.3).unwrap();
        assert_eq!(k.len(), 2 * 4 + 1);
        assert!((k.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        let (l, r) = log_kernel(0.5).unwrap();
        assert_eq!(r, 2);
        assert!(l.iter().sum::<f64>().abs() < 1e-12);
        // negative centre lobe
        assert!(l[12] < 0.0);
    }

    #[test]
    fn huge_sigma_on_tiny_plane() {
        // radius far exceeds the plane; all taps fold onto the borders
        let p = Plane::from_fn(3, 2, |x, y| (x + 3 * y) as f64);
        let g = gaussian_filter(&p, 50.0).unwrap();
        assert!(g.is_finite());
        assert!(g.min() >= p.min() && g.max() <= p.max());
    }

    #[test]
    fn box_mean_of_constant() {
        let p = Plane::new(5, 5, 2.0);
        assert!(box_mean(&p, 1).data().iter().all(|v| (v - 2.0).abs() < 1e-14));
    }
}
