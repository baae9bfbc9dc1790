//! Rasters, the fixed RGB/YUV transform, convolution filters and PNG/PPM I/O.

mod color;
mod filter;
mod io;
mod plane;

pub use color::{
    luma, luminance, mul3, rgb_to_yuv, yuv_to_rgb, yuv_to_rgb_unclamped, ColorMatrices,
    COLOR_MATRICES, V_Y, W_R,
};
pub use filter::{box_mean, gaussian_filter, gaussian_kernel, kernel_radius, log_filter, log_kernel};
pub use io::{decode_image, load_image, load_plane, quantize, save_image, save_plane};
pub use plane::{Plane, RgbImage, YuvImage};
