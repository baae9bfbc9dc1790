//! Two-stage nighttime image dehazing.
//!
//! Stage one estimates a region-corrected transmittance map and a spatially
//! varying atmospheric light map, then inverts the nighttime haze model.
//! Stage two splits the dehazed luminance into structure and texture layers,
//! brightens and color-corrects the structure, sharpens the texture, and fuses
//! everything back with the dehazed image.
//!
//! ```no_run
//! use nightdehaze::{imgcore, pipeline::{run_pipeline, PipelineConfig}};
//!
//! let hazy = imgcore::load_image("night.png")?;
//! let clear = run_pipeline(&hazy, &PipelineConfig::default())?;
//! imgcore::save_image(&clear, "night_clear.png")?;
//! # Ok::<(), nightdehaze::Error>(())
//! ```

pub mod airlight;
pub mod dehaze;
pub mod enhance;
mod error;
pub mod fusion;
pub mod imgcore;
pub mod metrics;
pub mod pipeline;
pub mod scenes;
pub mod star;
pub mod transmittance;

pub use error::{Error, Result};
