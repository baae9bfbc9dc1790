mod common;

use common::*;
use nightdehaze::dehaze::DehazedImage;
use nightdehaze::enhance::*;
use nightdehaze::fusion::*;
use nightdehaze::imgcore::{luminance, Plane, RgbImage};
use nightdehaze::scenes::night_scene;
use proptest::prelude::*;

fn log_oracle(sigma: f64) -> (isize, impl Fn(isize, isize) -> f64) {
    let r = (3.0 * sigma).ceil() as isize;
    let raw = move |dx: isize, dy: isize| {
        let q = (dx * dx + dy * dy) as f64 / (2.0 * sigma * sigma);
        -(1.0 - q) * (-q).exp() / (std::f64::consts::PI * sigma.powi(4))
    };
    let mut total = 0.0;
    for dy in -r..=r {
        for dx in -r..=r {
            total += raw(dx, dy);
        }
    }
    let mean = total / ((2 * r + 1) * (2 * r + 1)) as f64;
    (r, move |dx, dy| raw(dx, dy) - mean)
}

fn percentile_oracle(values: &[f64]) -> Vec<f64> {
    let mut s = values.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let pick = |q: f64| s[(q * (s.len() - 1) as f64).round() as usize];
    let (lo, hi) = (pick(0.01), pick(0.99));
    if hi - lo <= 1e-9 {
        return vec![0.5; values.len()];
    }
    values.iter().map(|v| ((v - lo) / (hi - lo)).clamp(0.0, 1.0)).collect()
}

/// MSRCR written pixel by pixel from its definition.
fn msrcr_oracle(img: &RgbImage, p: &MsrcrParams) -> RgbImage {
    let eps = 1e-6;
    let (w, h) = img.dims();
    let blurs: Vec<Vec<Plane>> = img
        .channels()
        .iter()
        .map(|c| {
            p.scales
                .iter()
                .map(|&s| {
                    let (r, k) = gaussian_2d(s);
                    brute_convolve(c, r, k)
                })
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    for (ci, c) in img.channels().iter().enumerate() {
        let mut vals = Vec::with_capacity(w * h);
        for y in 0..h {
            for x in 0..w {
                let v = c.get(x, y);
                let sum = img.pixel(x, y).iter().sum::<f64>();
                let crf = p.crf_beta * ((p.crf_alpha * v + eps).ln() - (sum + eps).ln());
                let msr: f64 = blurs[ci].iter().map(|b| (v + eps).ln() - (b.get(x, y) + eps).ln()).sum::<f64>()
                    / p.scales.len() as f64;
                vals.push(p.gain * (crf * msr + p.offset / 255.0));
            }
        }
        out.push(Plane::from_vec(w, h, percentile_oracle(&vals)).unwrap());
    }
    let b = out.pop().unwrap();
    let g = out.pop().unwrap();
    let r = out.pop().unwrap();
    RgbImage::new(r, g, b).unwrap()
}

fn small_scales() -> MsrcrParams {
    MsrcrParams {
        scales: [1.0, 2.0, 3.5],
        ..MsrcrParams::default()
    }
}

#[test]
fn msrcr_matches_reference() {
    let mut rng = rng(40);
    let img = random_rgb(&mut rng, 14, 11).map(|v| 0.02 + 0.9 * v);
    let p = small_scales();
    let got = msrcr(&img, &p).unwrap();
    let want = msrcr_oracle(&img, &p);
    for (a, b) in got.channels().iter().zip(want.channels()) {
        assert!(max_abs_diff(a, b) < 1e-9);
    }
}

fn cast_spread(img: &RgbImage) -> f64 {
    let m = [img.r.mean(), img.g.mean(), img.b.mean()];
    let avg = (m[0] + m[1] + m[2]) / 3.0;
    m.iter().map(|v| (v - avg).abs()).fold(0.0, f64::max) / avg
}

#[test]
fn msrcr_reduces_a_color_cast() {
    for seed in 0..4 {
        let scene = night_scene(64, 48, seed).unwrap();
        let cast = RgbImage::new(scene.r.map(|v| (1.3 * v).min(1.0)), scene.g.clone(), scene.b.clone()).unwrap();
        let out = msrcr(&cast, &MsrcrParams::default()).unwrap();
        assert!(cast_spread(&out) < cast_spread(&cast), "seed {seed}");
    }
}

#[test]
fn structure_enhancement_brightens_dark_scenes() {
    for seed in 0..4 {
        let scene = night_scene(64, 48, seed).unwrap().map(|v| 0.02 + 0.15 * v);
        let out = enhance_structure(&scene, &EnhanceParams::default(), &MsrcrParams::default()).unwrap();
        assert!(luminance(&out).mean() > luminance(&scene).mean(), "seed {seed}");
    }
}

#[test]
fn msrcr_is_nearly_scale_invariant() {
    let scene = night_scene(48, 48, 9).unwrap().map(|v| 0.05 + 0.9 * v);
    let half = scene.map(|v| 0.5 * v);
    let a = msrcr(&scene, &small_scales()).unwrap();
    let b = msrcr(&half, &small_scales()).unwrap();
    for (x, y) in a.channels().iter().zip(b.channels()) {
        assert!(max_abs_diff(x, y) < 1e-3);
    }
}

#[test]
fn sharpen_matches_reference() {
    let mut rng = rng(41);
    let t = random_plane(&mut rng, 17, 13).map(|v| 0.5 + v);
    for (sigma, kappa) in [(0.5, 1.0), (1.2, 0.3)] {
        let ep = EnhanceParams {
            log_sigma: sigma,
            sharpen_kappa: kappa,
            ..EnhanceParams::default()
        };
        let (r, k) = log_oracle(sigma);
        let lap = brute_convolve(&t, r, k);
        let want = t.zip_map(&lap, |v, l| v - kappa * l).unwrap();
        assert!(max_abs_diff(&sharpen(&t, &ep).unwrap(), &want) < 1e-10);
        let clamped = enhance_texture(&t, &ep).unwrap();
        assert!(max_abs_diff(&clamped, &want.clamp(0.0, 2.0)) < 1e-10);
    }
}

#[test]
fn sharpening_raises_edge_contrast() {
    let t = Plane::from_fn(20, 8, |x, _| if x < 10 { 0.8 } else { 1.2 });
    let out = enhance_texture(&t, &EnhanceParams::default()).unwrap();
    let before = t.get(10, 4) - t.get(9, 4);
    let after = out.get(10, 4) - out.get(9, 4);
    assert!(after > before);
    assert!(out.get(9, 4) < 0.8 && out.get(10, 4) > 1.2);
    assert!((out.get(2, 4) - 0.8).abs() < 1e-12);
}

#[test]
fn sharpening_preserves_interior_mean() {
    let mut rng = rng(42);
    let t = Plane::from_fn(30, 30, |x, y| {
        if (5..25).contains(&x) && (5..25).contains(&y) {
            0.5 + rand::Rng::gen::<f64>(&mut rng)
        } else {
            1.0
        }
    });
    let out = sharpen(&t, &EnhanceParams::default()).unwrap();
    assert!((out.mean() - t.mean()).abs() < 1e-9);
}

#[test]
fn fusion_matches_definitions() {
    let mut rng = rng(43);
    let s = random_rgb(&mut rng, 9, 7);
    let t = random_plane(&mut rng, 9, 7).map(|v| 2.0 * v);
    let fused = nonlinear_fuse(&s, &t).unwrap();
    let j = random_rgb(&mut rng, 9, 7);
    let lin = linear_fuse(&DehazedImage { j: j.clone() }, &fused, &FusionParams::default()).unwrap();
    for y in 0..7 {
        for x in 0..9 {
            for c in 0..3 {
                let f = (s.pixel(x, y)[c] * t.get(x, y)).clamp(0.0, 1.0);
                assert_eq!(fused.pixel(x, y)[c], f);
                let l = (0.5 * (j.pixel(x, y)[c] + f)).clamp(0.0, 1.0);
                assert!((lin.pixel(x, y)[c] - l).abs() < 1e-15);
            }
        }
    }
}

#[test]
fn fusion_rejects_bad_input() {
    let s = RgbImage::filled(4, 4, [0.5; 3]);
    assert!(nonlinear_fuse(&s, &Plane::new(3, 4, 1.0)).is_err());
    assert!(FusionParams { xi: 0.0 }.validate().is_err());
}

proptest! {
    #[test]
    fn linear_fusion_mean_lies_between_inputs(seed in 0u64..300) {
        let mut rng = rng(seed);
        let j = random_rgb(&mut rng, 8, 8);
        let e = random_rgb(&mut rng, 8, 8);
        let out = linear_fuse(&DehazedImage { j: j.clone() }, &e, &FusionParams::default()).unwrap();
        let (mj, me, mo) = (j.mean(), e.mean(), out.mean());
        prop_assert!(mo >= mj.min(me) - 1e-12 && mo <= mj.max(me) + 1e-12);
    }

    #[test]
    fn unit_texture_leaves_structure_alone(seed in 0u64..300) {
        let mut rng = rng(seed);
        let s = random_rgb(&mut rng, 6, 6);
        let out = nonlinear_fuse(&s, &Plane::new(6, 6, 1.0)).unwrap();
        prop_assert_eq!(out, s);
    }

    #[test]
    fn gamma_brightens(v in 0.0f64..1.0) {
        let out = gamma_correct(&RgbImage::filled(1, 1, [v; 3]), 0.4).unwrap();
        prop_assert!(out.pixel(0, 0)[0] >= v);
    }
}
