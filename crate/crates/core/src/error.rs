use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected:?}, got {actual:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        actual: (usize, usize),
    },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("input contains non-finite samples")]
    NonFinite,

    #[error("image too small: {width}x{height}, need at least {min} pixels per side")]
    ImageTooSmall {
        width: usize,
        height: usize,
        min: usize,
    },

    #[error("region {index} ({x},{y},{width}x{height}) lies outside the {image_width}x{image_height} image")]
    RegionOutOfBounds {
        index: usize,
        x: usize,
        y: usize,
        width: usize,
        height: usize,
        image_width: usize,
        image_height: usize,
    },

    #[error("transmittance must be strictly positive (found {0})")]
    NonPositiveTransmittance(f64),

    #[error("cannot read {path}: {source}")]
    Unreadable {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("unsupported image format: {path}")]
    UnsupportedFormat { path: PathBuf },

    #[error("corrupt image {path}: {reason}")]
    CorruptImage { path: PathBuf, reason: String },

    #[error("cannot write {path}: {reason}")]
    Write { path: PathBuf, reason: String },

    #[error("config: {0}")]
    Config(String),

    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// Stable numeric code, one per variant.
    pub fn code(&self) -> u32 {
        match self {
            Error::DimensionMismatch { .. } => 10,
            Error::InvalidParameter { .. } => 11,
            Error::NonFinite => 12,
            Error::ImageTooSmall { .. } => 13,
            Error::RegionOutOfBounds { .. } => 14,
            Error::NonPositiveTransmittance(_) => 15,
            Error::Unreadable { .. } => 20,
            Error::UnsupportedFormat { .. } => 21,
            Error::CorruptImage { .. } => 22,
            Error::Write { .. } => 23,
            Error::Config(_) => 30,
            Error::Stage { source, .. } => source.code(),
        }
    }
}

pub(crate) trait StageExt<T> {
    fn stage(self, stage: &'static str) -> Result<T>;
}

impl<T> StageExt<T> for Result<T> {
    fn stage(self, stage: &'static str) -> Result<T> {
        self.map_err(|e| Error::Stage {
            stage,
            source: Box::new(e),
        })
    }
}
