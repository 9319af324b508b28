use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("file not found: {0}")]
    FileNotFound(PathBuf),
    #[error("unsupported image format: {0}")]
    UnsupportedFormat(String),
    #[error("corrupt image data: {0}")]
    CorruptData(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("invalid buffer state: {0}")]
    InvalidBufferState(String),
    #[error("channel {channel} out of range for a {channels}-channel image")]
    ChannelOutOfRange { channel: usize, channels: usize },
    #[error("operation requires a 3-channel colour image, got {0} channel(s)")]
    NotColourImage(usize),
    #[error("image {width}x{height} is too small for a {tiles_x}x{tiles_y} tile grid")]
    ImageTooSmallForTiling {
        width: usize,
        height: usize,
        tiles_x: usize,
        tiles_y: usize,
    },
    #[error("invalid piecewise-linear map: {0}")]
    InvalidMap(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("stability budget exceeded: {0}")]
    StabilityBudgetExceeded(String),
    #[error("unknown pipeline `{0}`")]
    UnknownPipeline(String),
    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
