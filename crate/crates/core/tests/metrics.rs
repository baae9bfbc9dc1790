mod common;

use common::*;
use nightdehaze::imgcore::RgbImage;
use nightdehaze::metrics::*;
use proptest::prelude::*;
use std::collections::HashMap;

fn y_of(p: [f64; 3]) -> f64 {
    0.30 * p[0] + 0.59 * p[1] + 0.11 * p[2]
}

fn psnr_oracle(a: &RgbImage, b: &RgbImage) -> f64 {
    let (w, h) = a.dims();
    let mut se = 0.0;
    for y in 0..h {
        for x in 0..w {
            let (p, q) = (a.pixel(x, y), b.pixel(x, y));
            for c in 0..3 {
                se += (p[c] - q[c]).powi(2);
            }
        }
    }
    10.0 * (1.0 / (se / (3 * w * h) as f64)).log10()
}

/// Every 11x11 window summed directly with a 2-D Gaussian weight.
fn ssim_oracle(a: &RgbImage, b: &RgbImage) -> f64 {
    let (w, h) = a.dims();
    let mut weight = [[0.0; 11]; 11];
    let mut total = 0.0;
    for (j, row) in weight.iter_mut().enumerate() {
        for (i, v) in row.iter_mut().enumerate() {
            let (dx, dy) = (i as f64 - 5.0, j as f64 - 5.0);
            *v = (-(dx * dx + dy * dy) / (2.0 * 1.5 * 1.5)).exp();
            total += *v;
        }
    }
    let (c1, c2) = (0.01f64.powi(2), 0.03f64.powi(2));
    let mut acc = 0.0;
    let mut count = 0;
    for oy in 0..=h - 11 {
        for ox in 0..=w - 11 {
            let (mut ma, mut mb, mut saa, mut sbb, mut sab) = (0.0, 0.0, 0.0, 0.0, 0.0);
            for j in 0..11 {
                for i in 0..11 {
                    let k = weight[j][i] / total;
                    let ya = y_of(a.pixel(ox + i, oy + j));
                    let yb = y_of(b.pixel(ox + i, oy + j));
                    ma += k * ya;
                    mb += k * yb;
                    saa += k * ya * ya;
                    sbb += k * yb * yb;
                    sab += k * ya * yb;
                }
            }
            let (va, vb, cov) = (saa - ma * ma, sbb - mb * mb, sab - ma * mb);
            acc += (2.0 * ma * mb + c1) * (2.0 * cov + c2) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
            count += 1;
        }
    }
    acc / count as f64
}

fn ag_oracle(img: &RgbImage) -> f64 {
    let (w, h) = img.dims();
    let mut acc = 0.0;
    for y in 0..h - 1 {
        for x in 0..w - 1 {
            let p = img.pixel(x, y);
            let r = img.pixel(x + 1, y);
            let d = img.pixel(x, y + 1);
            for c in 0..3 {
                acc += (((r[c] - p[c]).powi(2) + (d[c] - p[c]).powi(2)) / 2.0).sqrt();
            }
        }
    }
    acc / (3 * (w - 1) * (h - 1)) as f64
}

fn ie_oracle(img: &RgbImage) -> f64 {
    let (w, h) = img.dims();
    let mut counts: HashMap<i64, usize> = HashMap::new();
    for y in 0..h {
        for x in 0..w {
            let v = y_of(img.pixel(x, y)).clamp(0.0, 1.0);
            *counts.entry((v * 255.0 + 0.5).floor() as i64).or_default() += 1;
        }
    }
    let n = (w * h) as f64;
    -counts.values().map(|&c| c as f64 / n).map(|p| p * p.log2()).sum::<f64>()
}

#[test]
fn metrics_match_scalar_oracles() {
    let mut rng = rng(50);
    for _ in 0..10 {
        let a = random_rgb(&mut rng, 16, 16);
        let noise = random_rgb(&mut rng, 16, 16);
        let b = RgbImage::new(
            a.r.zip_map(&noise.r, |x, n| (x + 0.2 * (n - 0.5)).clamp(0.0, 1.0)).unwrap(),
            a.g.zip_map(&noise.g, |x, n| (x + 0.2 * (n - 0.5)).clamp(0.0, 1.0)).unwrap(),
            a.b.zip_map(&noise.b, |x, n| (x + 0.2 * (n - 0.5)).clamp(0.0, 1.0)).unwrap(),
        )
        .unwrap();
        assert!((psnr(&a, &b).unwrap() - psnr_oracle(&a, &b)).abs() < 1e-8);
        assert!((ssim(&a, &b).unwrap() - ssim_oracle(&a, &b)).abs() < 1e-8);
        assert!((average_gradient(&a).unwrap() - ag_oracle(&a)).abs() < 1e-8);
        assert!((information_entropy(&a) - ie_oracle(&a)).abs() < 1e-8);
    }
}

#[test]
fn psnr_reference_values() {
    let a = RgbImage::filled(8, 8, [0.3; 3]);
    assert_eq!(psnr(&a, &a).unwrap(), f64::INFINITY);
    let b = a.map(|v| v + 1.0 / 255.0);
    assert!((psnr(&a, &b).unwrap() - 20.0 * 255f64.log10()).abs() < 1e-9);
}

#[test]
fn ssim_of_negative_is_low() {
    let mut rng = rng(51);
    let a = random_rgb(&mut rng, 32, 32);
    let neg = a.map(|v| 1.0 - v);
    assert!((ssim(&a, &a).unwrap() - 1.0).abs() < 1e-12);
    assert!(ssim(&a, &neg).unwrap() < 0.1);
}

#[test]
fn entropy_reference_values() {
    assert_eq!(information_entropy(&RgbImage::filled(5, 5, [0.4; 3])), 0.0);
    let half = RgbImage::from_fn(8, 8, |x, _| if x < 4 { [0.0; 3] } else { [1.0; 3] });
    assert!((information_entropy(&half) - 1.0).abs() < 1e-12);
    let ramp = RgbImage::from_fn(256, 1, |x, _| [x as f64 / 255.0; 3]);
    assert!((information_entropy(&ramp) - 8.0).abs() < 1e-12);
}

/// (reference, sample, published ΔE00, independent double-precision value)
fn sharma_pairs() -> Vec<([f64; 3], [f64; 3], f64, f64)> {
    include_str!("../../../testdata/ciede2000_pairs.csv")
        .lines()
        .skip(1)
        .map(|line| {
            let v: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
            ([v[0], v[1], v[2]], [v[3], v[4], v[5]], v[6], v[7])
        })
        .collect()
}

#[test]
fn ciede2000_matches_published_pairs() {
    let pairs = sharma_pairs();
    assert_eq!(pairs.len(), 34);
    for (i, (p, q, published, full)) in pairs.iter().enumerate() {
        let d = ciede2000(Lab::new(p[0], p[1], p[2]), Lab::new(q[0], q[1], q[2]));
        assert!((d - published).abs() <= 1e-4, "pair {i}: {d} vs {published}");
        assert!((d - full).abs() <= 1e-9, "pair {i}: {d} vs {full}");
        let back = ciede2000(Lab::new(q[0], q[1], q[2]), Lab::new(p[0], p[1], p[2]));
        assert!((d - back).abs() < 1e-12);
    }
}

#[test]
fn rgb_to_lab_reference_values() {
    let cases = [
        ([0.5, 0.5, 0.5], [53.38896, -0.00147, 0.00278]),
        ([1.0, 0.0, 0.0], [53.24059, 80.09231, 67.20275]),
        ([0.2, 0.6, 0.9], [60.92953, -3.06016, -46.83765]),
        ([0.02, 0.01, 0.03], [0.94874, 1.37590, -1.69492]),
    ];
    for (rgb, lab) in cases {
        let got = rgb_to_lab(rgb);
        assert!((got.l - lab[0]).abs() < 5e-3, "{rgb:?} {got:?}");
        assert!((got.a - lab[1]).abs() < 5e-3, "{rgb:?} {got:?}");
        assert!((got.b - lab[2]).abs() < 5e-3, "{rgb:?} {got:?}");
    }
    let white = rgb_to_lab([1.0; 3]);
    assert!((white.l - 100.0).abs() < 1e-3 && white.a.abs() < 1e-2 && white.b.abs() < 1e-2);
}

#[test]
fn region_ciede_averages_region_differences() {
    let mut rng = rng(52);
    let a = random_rgb(&mut rng, 20, 16);
    let b = random_rgb(&mut rng, 20, 16);
    let regions = [Region::new(0, 0, 5, 4), Region::new(10, 3, 7, 9), Region::new(19, 15, 1, 1)];
    let mean_lab = |img: &RgbImage, r: &Region| {
        let mut s = [0.0; 3];
        for y in r.y..r.y + r.height {
            for x in r.x..r.x + r.width {
                let l = rgb_to_lab(img.pixel(x, y));
                s[0] += l.l;
                s[1] += l.a;
                s[2] += l.b;
            }
        }
        let n = (r.width * r.height) as f64;
        Lab::new(s[0] / n, s[1] / n, s[2] / n)
    };
    let want = regions.iter().map(|r| ciede2000(mean_lab(&a, r), mean_lab(&b, r))).sum::<f64>() / 3.0;
    assert!((region_ciede(&a, &b, &regions).unwrap() - want).abs() < 1e-12);
    assert_eq!(region_ciede(&a, &a, &regions).unwrap(), 0.0);
    assert!(region_ciede(&a, &b, &[]).is_err());
    assert!(region_ciede(&a, &b, &[Region::new(18, 0, 3, 1)]).is_err());
}

#[test]
fn registry_reports_all_metrics() {
    let mut rng = rng(53);
    let a = random_rgb(&mut rng, 16, 16);
    let b = random_rgb(&mut rng, 16, 16);
    let reg = MetricRegistry::builtin();
    assert_eq!(reg.names(), vec!["psnr", "ssim", "ag", "ie"]);
    let with_ref = reg.report(&a, Some(&b)).unwrap();
    assert_eq!(with_ref.psnr, Some(psnr(&a, &b).unwrap()));
    assert_eq!(with_ref.ssim, Some(ssim(&a, &b).unwrap()));
    let without = reg.report(&a, None).unwrap();
    assert_eq!(without.psnr, None);
    assert_eq!(without.ag, Some(average_gradient(&a).unwrap()));
    assert_eq!(format_value(Some(f64::INFINITY)), "inf");
}

proptest! {
    #[test]
    fn full_reference_metrics_are_symmetric(seed in 0u64..200) {
        let mut rng = rng(seed);
        let a = random_rgb(&mut rng, 12, 12);
        let b = random_rgb(&mut rng, 12, 12);
        prop_assert!((psnr(&a, &b).unwrap() - psnr(&b, &a).unwrap()).abs() < 1e-12);
        prop_assert!((ssim(&a, &b).unwrap() - ssim(&b, &a).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn entropy_ignores_pixel_order(seed in 0u64..200) {
        let mut rng = rng(seed);
        let a = random_rgb(&mut rng, 9, 7);
        let flipped = RgbImage::from_fn(9, 7, |x, y| a.pixel(8 - x, 6 - y));
        prop_assert_eq!(information_entropy(&a), information_entropy(&flipped));
    }

    #[test]
    fn ciede_is_non_negative(l1 in 0.0f64..100.0, a1 in -80.0f64..80.0, b1 in -80.0f64..80.0,
                             l2 in 0.0f64..100.0, a2 in -80.0f64..80.0, b2 in -80.0f64..80.0) {
        let d = ciede2000(Lab::new(l1, a1, b1), Lab::new(l2, a2, b2));
        prop_assert!(d >= 0.0 && d.is_finite());
    }
}
