use std::path::Path;

use image::{DynamicImage, ImageFormat};

use super::plane::{Plane, RgbImage};
use crate::error::{Error, Result};

const PNG_MAGIC: &[u8] = b"\x89PNG\r\n\x1a\n";

fn sniff(bytes: &[u8]) -> Option<ImageFormat> {
    if bytes.starts_with(PNG_MAGIC) {
        Some(ImageFormat::Png)
    } else if bytes.starts_with(b"P6") {
        Some(ImageFormat::Pnm)
    } else {
        None
    }
}

/// Decode a PNG (8/16-bit, gray or RGB, alpha dropped) or binary PPM into `[0, 1]` samples.
pub fn load_image(path: impl AsRef<Path>) -> Result<RgbImage> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|source| Error::Unreadable {
        path: path.to_path_buf(),
        source,
    })?;
    decode_image(&bytes, path)
}

pub fn decode_image(bytes: &[u8], path: &Path) -> Result<RgbImage> {
    let format = sniff(bytes).ok_or_else(|| Error::UnsupportedFormat {
        path: path.to_path_buf(),
    })?;
    let img = image::load_from_memory_with_format(bytes, format).map_err(|e| Error::CorruptImage {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })?;
    let (w, h) = (img.width() as usize, img.height() as usize);
    if w == 0 || h == 0 {
        return Err(Error::CorruptImage {
            path: path.to_path_buf(),
            reason: "empty raster".into(),
        });
    }
    let mut out = RgbImage::filled(w, h, [0.0; 3]);
    match img {
        DynamicImage::ImageLuma16(_)
        | DynamicImage::ImageLumaA16(_)
        | DynamicImage::ImageRgb16(_)
        | DynamicImage::ImageRgba16(_) => {
            let buf = img.to_rgb16();
            for (i, px) in buf.pixels().enumerate() {
                for c in 0..3 {
                    out.channels_mut()[c].data_mut()[i] = px.0[c] as f64 / 65535.0;
                }
            }
        }
        _ => {
            let buf = img.to_rgb8();
            for (i, px) in buf.pixels().enumerate() {
                for c in 0..3 {
                    out.channels_mut()[c].data_mut()[i] = px.0[c] as f64 / 255.0;
                }
            }
        }
    }
    Ok(out)
}

/// `[0, 1]` sample to 8-bit with round-half-up.
#[inline]
pub fn quantize(v: f64) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0 + 0.5).floor() as u8
}

fn write_png(buf: DynamicImage, path: &Path) -> Result<()> {
    buf.save_with_format(path, ImageFormat::Png)
        .map_err(|e| Error::Write {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })
}

/// Write an 8-bit RGB PNG.
pub fn save_image(img: &RgbImage, path: impl AsRef<Path>) -> Result<()> {
    let (w, h) = img.dims();
    let mut raw = Vec::with_capacity(w * h * 3);
    for i in 0..w * h {
        raw.push(quantize(img.r.data()[i]));
        raw.push(quantize(img.g.data()[i]));
        raw.push(quantize(img.b.data()[i]));
    }
    let buf = image::RgbImage::from_raw(w as u32, h as u32, raw).expect("buffer size matches");
    write_png(DynamicImage::ImageRgb8(buf), path.as_ref())
}

/// Write an 8-bit grayscale PNG; samples are clamped to `[0, 1]`.
pub fn save_plane(p: &Plane, path: impl AsRef<Path>) -> Result<()> {
    let raw = p.data().iter().map(|&v| quantize(v)).collect();
    let buf = image::GrayImage::from_raw(p.width() as u32, p.height() as u32, raw)
        .expect("buffer size matches");
    write_png(DynamicImage::ImageLuma8(buf), path.as_ref())
}

/// Load the first channel of an image as a plane (sidecar maps are gray).
pub fn load_plane(path: impl AsRef<Path>) -> Result<Plane> {
    Ok(load_image(path)?.r)
}
