mod common;

use common::*;
use nightdehaze::imgcore::{Plane, RgbImage};
use nightdehaze::transmittance::*;
use proptest::prelude::*;

fn brute_dark_channel(img: &RgbImage, r: isize) -> Plane {
    let (w, h) = (img.width() as isize, img.height() as isize);
    Plane::from_fn(img.width(), img.height(), |x, y| {
        let mut m = f64::INFINITY;
        for dy in -r..=r {
            for dx in -r..=r {
                let sx = (x as isize + dx).clamp(0, w - 1) as usize;
                let sy = (y as isize + dy).clamp(0, h - 1) as usize;
                for c in img.pixel(sx, sy) {
                    m = m.min(c);
                }
            }
        }
        m
    })
}

#[test]
fn dark_channel_matches_exhaustive_scan() {
    let mut rng = rng(10);
    for radius in [1, 2, 7] {
        let img = random_rgb(&mut rng, 8, 8);
        let p = DcpParams {
            patch_radius: radius,
            ..Default::default()
        };
        assert_eq!(dark_channel(&img, &p), brute_dark_channel(&img, radius as isize));
    }
}

#[test]
fn global_airlight_matches_sort_and_select() {
    let mut rng = rng(11);
    for fraction in [0.001, 0.01, 0.05] {
        let img = random_rgb(&mut rng, 32, 32);
        let p = DcpParams {
            patch_radius: 2,
            bright_fraction: fraction,
        };
        let dark = brute_dark_channel(&img, 2);
        let mut idx: Vec<usize> = (0..1024).collect();
        idx.sort_by(|&a, &b| dark.data()[b].partial_cmp(&dark.data()[a]).unwrap().then(a.cmp(&b)));
        let count = (1024.0 * fraction as f64).ceil() as usize;
        let best = idx[..count]
            .iter()
            .copied()
            .fold(None::<(usize, f64)>, |acc, i| {
                let (x, y) = (i % 32, i / 32);
                let s: f64 = img.pixel(x, y).iter().sum();
                match acc {
                    Some((_, bs)) if bs >= s => acc,
                    _ => Some((i, s)),
                }
            })
            .unwrap()
            .0;
        assert_eq!(global_airlight(&img, &p), img.pixel(best % 32, best / 32));
    }
}

#[test]
fn initial_transmittance_matches_formula() {
    let mut rng = rng(12);
    let img = random_rgb(&mut rng, 16, 16);
    let bp = BoundaryParams::default();
    let a = [0.9; 3];
    let t = initial_transmittance(&img, a, &bp);
    assert_eq!(t.stage, Stage::Initial);
    for y in 0..16 {
        for x in 0..16 {
            let px = img.pixel(x, y);
            let mut want = f64::INFINITY;
            for c in 0..3 {
                let r0 = (0.9 - px[c]) / (0.9 - 20.0 / 255.0);
                let r1 = (0.9 - px[c]) / (0.9 - 300.0 / 255.0);
                want = want.min(r0.max(r1));
            }
            assert!((t.t.get(x, y) - want.clamp(0.0, 1.0)).abs() < 1e-15);
        }
    }
}

#[test]
fn light_source_values_are_from_the_table() {
    let mut rng = rng(13);
    let img = random_rgb(&mut rng, 20, 20).map(|v| v.sqrt());
    let cp = CorrectionParams::default();
    let out = light_source_compensation(&img, &cp);
    assert!(out.data().iter().all(|&v| v == 0.05 || v == 0.4 || v == 0.1));
    assert!(out.data().contains(&0.1) && out.data().contains(&0.05));
}

#[test]
fn bright_region_output_stays_zero_on_reapplication() {
    // offset values that fall below eta1 map back to 0; zeros stay zero
    let cp = CorrectionParams::default();
    let t = TransmittanceMap::new(Plane::from_vec(4, 1, vec![0.1, 0.45, 0.5, 0.0]).unwrap(), Stage::Initial);
    let once = bright_region_compensation(&t, &cp);
    let twice = bright_region_compensation(&TransmittanceMap::new(once, Stage::Initial), &cp);
    assert_eq!(twice.data(), &[0.0, 0.0, 0.0, 0.0]);
}

proptest! {
    #[test]
    fn normalized_map_hits_its_bounds(seed in 0u64..500) {
        let mut rng = rng(seed);
        let img = random_rgb(&mut rng, 12, 10);
        let cp = CorrectionParams::default();
        let a = global_airlight(&img, &DcpParams::default());
        let t = corrected_transmittance(&img, a, &BoundaryParams::default(), &cp).unwrap();
        prop_assert_eq!(t.stage, Stage::Normalized);
        prop_assert!(t.t.is_finite());
        prop_assert!(t.t.data().iter().all(|&v| (0.2..=0.85).contains(&v)));
        if t.t.max() > t.t.min() {
            prop_assert_eq!(t.t.min(), 0.2);
            prop_assert_eq!(t.t.max(), 0.85);
        }
    }

    #[test]
    fn dark_channel_is_monotone(seed in 0u64..500, lift in 0.0f64..0.5) {
        let mut rng = rng(seed);
        let img = random_rgb(&mut rng, 9, 7).map(|v| v * 0.5);
        let brighter = img.map(|v| v + lift);
        let p = DcpParams { patch_radius: 2, ..Default::default() };
        let (d0, d1) = (dark_channel(&img, &p), dark_channel(&brighter, &p));
        prop_assert!(d0.data().iter().zip(d1.data()).all(|(a, b)| b >= a));
    }

    #[test]
    fn bright_region_is_order_preserving_above_threshold(a in 0.3001f64..1.0, b in 0.3001f64..1.0) {
        let cp = CorrectionParams::default();
        let t = TransmittanceMap::new(Plane::from_vec(2, 1, vec![a, b]).unwrap(), Stage::Initial);
        let out = bright_region_compensation(&t, &cp);
        prop_assert_eq!(a < b, out.data()[0] < out.data()[1]);
    }
}
