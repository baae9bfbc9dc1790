use super::plane::{Plane, RgbImage, YuvImage};

/// Fixed RGB/YUV conversion pair. Both matrices carry two decimals only, so
/// they are close to but not exactly inverse to each other.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ColorMatrices {
    pub v_y: [[f64; 3]; 3],
    pub w_r: [[f64; 3]; 3],
}

/// RGB to YUV.
pub const V_Y: [[f64; 3]; 3] = [
    [0.30, 0.59, 0.11],
    [-0.15, -0.29, 0.44],
    [0.62, -0.52, -0.10],
];

/// YUV to RGB.
pub const W_R: [[f64; 3]; 3] = [
    [1.00, 0.00, 1.14],
    [1.00, -0.39, -0.58],
    [1.00, 2.03, 0.00],
];

pub const COLOR_MATRICES: ColorMatrices = ColorMatrices { v_y: V_Y, w_r: W_R };

#[inline]
pub fn mul3(m: &[[f64; 3]; 3], v: [f64; 3]) -> [f64; 3] {
    [
        m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
        m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
        m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
    ]
}

/// Luminance row of the forward transform.
#[inline]
pub fn luma(rgb: [f64; 3]) -> f64 {
    V_Y[0][0] * rgb[0] + V_Y[0][1] * rgb[1] + V_Y[0][2] * rgb[2]
}

fn transform(m: &[[f64; 3]; 3], a: &Plane, b: &Plane, c: &Plane) -> [Plane; 3] {
    let (w, h) = a.dims();
    let mut out = [Plane::new(w, h, 0.0), Plane::new(w, h, 0.0), Plane::new(w, h, 0.0)];
    for i in 0..a.len() {
        let v = mul3(m, [a.data()[i], b.data()[i], c.data()[i]]);
        for k in 0..3 {
            out[k].data_mut()[i] = v[k];
        }
    }
    out
}

pub fn rgb_to_yuv(img: &RgbImage) -> YuvImage {
    let [y, u, v] = transform(&V_Y, &img.r, &img.g, &img.b);
    YuvImage { y, u, v }
}

/// Inverse transform followed by a clamp to `[0, 1]`.
pub fn yuv_to_rgb(img: &YuvImage) -> RgbImage {
    yuv_to_rgb_unclamped(img).clamp01()
}

pub fn yuv_to_rgb_unclamped(img: &YuvImage) -> RgbImage {
    let [r, g, b] = transform(&W_R, &img.y, &img.u, &img.v);
    RgbImage { r, g, b }
}

pub fn luminance(img: &RgbImage) -> Plane {
    let mut y = Plane::new(img.width(), img.height(), 0.0);
    for (i, out) in y.data_mut().iter_mut().enumerate() {
        *out = luma([img.r.data()[i], img.g.data()[i], img.b.data()[i]]);
    }
    y
}
