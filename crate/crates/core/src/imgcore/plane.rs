use crate::error::{Error, Result};

/// Single-channel raster of `f64` samples in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct Plane {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl Plane {
    /// Panics if either side is zero.
    pub fn new(width: usize, height: usize, fill: f64) -> Self {
        assert!(width > 0 && height > 0, "plane must be non-empty");
        Plane {
            width,
            height,
            data: vec![fill; width * height],
        }
    }

    pub fn from_vec(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::ImageTooSmall {
                width,
                height,
                min: 1,
            });
        }
        if data.len() != width * height {
            return Err(Error::invalid(
                "data",
                format!("length {} != {}x{}", data.len(), width, height),
            ));
        }
        Ok(Plane {
            width,
            height,
            data,
        })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        assert!(width > 0 && height > 0, "plane must be non-empty");
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Plane {
            width,
            height,
            data,
        }
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: f64) {
        self.data[y * self.width + x] = v;
    }

    /// Sample with coordinates clamped into the raster (replicate padding).
    #[inline]
    pub fn get_clamped(&self, x: isize, y: isize) -> f64 {
        let xc = x.clamp(0, self.width as isize - 1) as usize;
        let yc = y.clamp(0, self.height as isize - 1) as usize;
        self.data[yc * self.width + xc]
    }

    #[inline]
    pub fn row(&self, y: usize) -> &[f64] {
        &self.data[y * self.width..(y + 1) * self.width]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Plane {
        Plane {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_map(&self, other: &Plane, f: impl Fn(f64, f64) -> f64) -> Result<Plane> {
        self.check_same(other)?;
        Ok(Plane {
            width: self.width,
            height: self.height,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn check_same(&self, other: &Plane) -> Result<()> {
        if self.dims() != other.dims() {
            return Err(Error::DimensionMismatch {
                expected: self.dims(),
                actual: other.dims(),
            });
        }
        Ok(())
    }

    pub fn clamp(&self, lo: f64, hi: f64) -> Plane {
        self.map(|v| v.clamp(lo, hi))
    }

    pub fn min(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

/// Three aligned planes holding R, G and B.
#[derive(Debug, Clone, PartialEq)]
pub struct RgbImage {
    pub r: Plane,
    pub g: Plane,
    pub b: Plane,
}

impl RgbImage {
    pub fn new(r: Plane, g: Plane, b: Plane) -> Result<Self> {
        r.check_same(&g)?;
        r.check_same(&b)?;
        Ok(RgbImage { r, g, b })
    }

    pub fn filled(width: usize, height: usize, rgb: [f64; 3]) -> Self {
        RgbImage {
            r: Plane::new(width, height, rgb[0]),
            g: Plane::new(width, height, rgb[1]),
            b: Plane::new(width, height, rgb[2]),
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> [f64; 3]) -> Self {
        let mut img = RgbImage::filled(width, height, [0.0; 3]);
        for y in 0..height {
            for x in 0..width {
                img.set_pixel(x, y, f(x, y));
            }
        }
        img
    }

    /// Gray image whose three channels all copy `p`.
    pub fn from_gray(p: &Plane) -> Self {
        RgbImage {
            r: p.clone(),
            g: p.clone(),
            b: p.clone(),
        }
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.r.width()
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.r.height()
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        self.r.dims()
    }

    pub fn pixel(&self, x: usize, y: usize) -> [f64; 3] {
        [self.r.get(x, y), self.g.get(x, y), self.b.get(x, y)]
    }

    pub fn set_pixel(&mut self, x: usize, y: usize, rgb: [f64; 3]) {
        self.r.set(x, y, rgb[0]);
        self.g.set(x, y, rgb[1]);
        self.b.set(x, y, rgb[2]);
    }

    pub fn channels(&self) -> [&Plane; 3] {
        [&self.r, &self.g, &self.b]
    }

    pub fn channels_mut(&mut self) -> [&mut Plane; 3] {
        [&mut self.r, &mut self.g, &mut self.b]
    }

    pub fn map_channels(&self, mut f: impl FnMut(&Plane) -> Plane) -> RgbImage {
        RgbImage {
            r: f(&self.r),
            g: f(&self.g),
            b: f(&self.b),
        }
    }

    pub fn try_map_channels(&self, mut f: impl FnMut(&Plane) -> Result<Plane>) -> Result<RgbImage> {
        Ok(RgbImage {
            r: f(&self.r)?,
            g: f(&self.g)?,
            b: f(&self.b)?,
        })
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> RgbImage {
        self.map_channels(|p| p.map(&f))
    }

    pub fn clamp01(&self) -> RgbImage {
        self.map(|v| v.clamp(0.0, 1.0))
    }

    pub fn check_same(&self, other: &RgbImage) -> Result<()> {
        self.r.check_same(&other.r)
    }

    pub fn check_plane(&self, other: &Plane) -> Result<()> {
        self.r.check_same(other)
    }

    /// Mean over all pixels and channels.
    pub fn mean(&self) -> f64 {
        (self.r.mean() + self.g.mean() + self.b.mean()) / 3.0
    }

    pub fn is_finite(&self) -> bool {
        self.r.is_finite() && self.g.is_finite() && self.b.is_finite()
    }
}

/// Y, U and V planes produced by the linear color transform.
#[derive(Debug, Clone, PartialEq)]
pub struct YuvImage {
    pub y: Plane,
    pub u: Plane,
    pub v: Plane,
}

impl YuvImage {
    pub fn new(y: Plane, u: Plane, v: Plane) -> Result<Self> {
        y.check_same(&u)?;
        y.check_same(&v)?;
        Ok(YuvImage { y, u, v })
    }

    pub fn dims(&self) -> (usize, usize) {
        self.y.dims()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_vec_checks_length() {
        assert!(Plane::from_vec(2, 2, vec![0.0; 3]).is_err());
        assert!(matches!(
            Plane::from_vec(0, 2, vec![]),
            Err(Error::ImageTooSmall { .. })
        ));
        let p = Plane::from_vec(2, 2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(p.get(1, 1), 4.0);
        assert_eq!(p.get_clamped(-3, 7), 3.0);
    }

    #[test]
    fn rgb_requires_matching_planes() {
        let a = Plane::new(2, 2, 0.0);
        let b = Plane::new(3, 2, 0.0);
        assert!(matches!(
            RgbImage::new(a.clone(), a.clone(), b),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
