use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::ImageBuffer;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Sample depth used when writing files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum BitDepth {
    #[default]
    Eight,
    Sixteen,
}

impl BitDepth {
    pub fn from_bits(bits: u32) -> Result<Self> {
        match bits {
            8 => Ok(BitDepth::Eight),
            16 => Ok(BitDepth::Sixteen),
            other => Err(Error::InvalidParameter(format!(
                "bit depth must be 8 or 16, got {other}"
            ))),
        }
    }

    pub fn max_value(self) -> u32 {
        match self {
            BitDepth::Eight => 255,
            BitDepth::Sixteen => 65535,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum FileKind {
    Png,
    Netpbm,
}

fn kind_from_extension(path: &Path) -> Result<FileKind> {
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase);
    match ext.as_deref() {
        Some("png") => Ok(FileKind::Png),
        Some("ppm" | "pgm" | "pnm") => Ok(FileKind::Netpbm),
        _ => Err(Error::UnsupportedFormat(format!(
            "cannot infer format from `{}` (expected .png, .ppm, .pgm or .pnm)",
            path.display()
        ))),
    }
}

/// Loads a PNG or Netpbm (P2/P3/P5/P6) file into `[0, 1]` samples.
///
/// 8-bit samples map by `v/255`, 16-bit by `v/65535`. Images with an alpha
/// channel are rejected.
pub fn load_image<T: Scalar>(path: impl AsRef<Path>) -> Result<ImageBuffer<T>> {
    let path = path.as_ref();
    let mut bytes = Vec::new();
    match File::open(path) {
        Ok(f) => BufReader::new(f).read_to_end(&mut bytes)?,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            return Err(Error::FileNotFound(path.to_path_buf()))
        }
        Err(e) => return Err(e.into()),
    };
    if bytes.starts_with(b"\x89PNG\r\n\x1a\n") {
        decode_png(&bytes)
    } else if bytes.first() == Some(&b'P') {
        decode_netpbm(&bytes)
    } else {
        Err(Error::UnsupportedFormat(format!(
            "`{}` is neither PNG nor Netpbm",
            path.display()
        )))
    }
}

fn decode_png<T: Scalar>(bytes: &[u8]) -> Result<ImageBuffer<T>> {
    let mut decoder = png::Decoder::new(std::io::Cursor::new(bytes));
    decoder.set_transformations(png::Transformations::EXPAND);
    let mut reader = decoder
        .read_info()
        .map_err(|e| Error::CorruptData(e.to_string()))?;
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| Error::CorruptData("image too large".into()))?;
    let mut raw = vec![0u8; size];
    let info = reader
        .next_frame(&mut raw)
        .map_err(|e| Error::CorruptData(e.to_string()))?;
    let channels = match info.color_type {
        png::ColorType::Grayscale => 1,
        png::ColorType::Rgb => 3,
        png::ColorType::GrayscaleAlpha | png::ColorType::Rgba => {
            return Err(Error::UnsupportedFormat(
                "alpha channels are not supported".into(),
            ))
        }
        png::ColorType::Indexed => {
            return Err(Error::UnsupportedFormat("unexpanded palette image".into()))
        }
    };
    let (w, h) = (info.width as usize, info.height as usize);
    let samples_per_row = w * channels;
    let mut data = Vec::with_capacity(samples_per_row * h);
    for row in raw.chunks(info.line_size).take(h) {
        match info.bit_depth {
            png::BitDepth::Sixteen => {
                let scale = T::lit(65535.0);
                data.extend(
                    row.chunks_exact(2)
                        .take(samples_per_row)
                        .map(|b| T::lit(u16::from_be_bytes([b[0], b[1]]) as f64) / scale),
                );
            }
            png::BitDepth::Eight => {
                let scale = T::lit(255.0);
                data.extend(
                    row.iter()
                        .take(samples_per_row)
                        .map(|&b| T::lit(b as f64) / scale),
                );
            }
            other => {
                return Err(Error::UnsupportedFormat(format!(
                    "unexpected PNG bit depth {other:?} after expansion"
                )))
            }
        }
    }
    if data.len() != samples_per_row * h {
        return Err(Error::CorruptData("truncated PNG frame".into()));
    }
    ImageBuffer::from_interleaved(w, h, channels, &data)
}

struct NetpbmHeader {
    ascii: bool,
    channels: usize,
    width: usize,
    height: usize,
    maxval: u32,
}

/// Cursor over Netpbm header tokens, skipping whitespace and `#` comments.
struct Tokens<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Tokens<'a> {
    fn skip_space(&mut self) {
        while self.pos < self.bytes.len() {
            match self.bytes[self.pos] {
                b'#' => {
                    while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                c if c.is_ascii_whitespace() => self.pos += 1,
                _ => break,
            }
        }
    }

    fn next_token(&mut self) -> Option<&'a [u8]> {
        self.skip_space();
        let start = self.pos;
        while self.pos < self.bytes.len() && !self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        (self.pos > start).then(|| &self.bytes[start..self.pos])
    }

    fn next_uint(&mut self, what: &str) -> Result<u32> {
        let tok = self
            .next_token()
            .ok_or_else(|| Error::CorruptData(format!("missing {what}")))?;
        std::str::from_utf8(tok)
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::CorruptData(format!("invalid {what}")))
    }
}

fn decode_netpbm<T: Scalar>(bytes: &[u8]) -> Result<ImageBuffer<T>> {
    let mut tokens = Tokens { bytes, pos: 0 };
    let magic = tokens.next_token().unwrap_or_default();
    let (ascii, channels) = match magic {
        b"P2" => (true, 1),
        b"P3" => (true, 3),
        b"P5" => (false, 1),
        b"P6" => (false, 3),
        other => {
            return Err(Error::UnsupportedFormat(format!(
                "Netpbm variant `{}`",
                String::from_utf8_lossy(other)
            )))
        }
    };
    let header = NetpbmHeader {
        ascii,
        channels,
        width: tokens.next_uint("width")? as usize,
        height: tokens.next_uint("height")? as usize,
        maxval: tokens.next_uint("maxval")?,
    };
    if header.width == 0 || header.height == 0 {
        return Err(Error::CorruptData("zero image dimension".into()));
    }
    if header.maxval == 0 || header.maxval > 65535 {
        return Err(Error::CorruptData(format!(
            "maxval {} out of range",
            header.maxval
        )));
    }
    let count = header.width * header.height * header.channels;
    let mut raw = Vec::with_capacity(count);
    if header.ascii {
        for _ in 0..count {
            raw.push(tokens.next_uint("sample")?);
        }
    } else {
        // exactly one whitespace byte separates the header from the raster
        let start = tokens.pos + 1;
        let wide = header.maxval > 255;
        let need = count * if wide { 2 } else { 1 };
        let body = bytes
            .get(start..start + need)
            .ok_or_else(|| Error::CorruptData("truncated raster".into()))?;
        if wide {
            raw.extend(
                body.chunks_exact(2)
                    .map(|b| u16::from_be_bytes([b[0], b[1]]) as u32),
            );
        } else {
            raw.extend(body.iter().map(|&b| b as u32));
        }
    }
    if let Some(bad) = raw.iter().find(|&&v| v > header.maxval) {
        return Err(Error::CorruptData(format!(
            "sample {bad} exceeds maxval {}",
            header.maxval
        )));
    }
    let scale = T::lit(header.maxval as f64);
    let data: Vec<T> = raw.into_iter().map(|v| T::lit(v as f64) / scale).collect();
    ImageBuffer::from_interleaved(header.width, header.height, header.channels, &data)
}

fn quantize<T: Scalar>(buf: &ImageBuffer<T>, depth: BitDepth) -> Vec<u16> {
    let max = depth.max_value() as f64;
    buf.to_interleaved()
        .into_iter()
        .map(|v| (v.as_f64().clamp(0.0, 1.0) * max).round() as u16)
        .collect()
}

/// Writes `buf` as PNG or binary Netpbm, chosen by file extension.
///
/// Samples are quantized by `round(v · (2^depth − 1))`.
pub fn save_image<T: Scalar>(
    buf: &ImageBuffer<T>,
    path: impl AsRef<Path>,
    depth: BitDepth,
) -> Result<()> {
    let path = path.as_ref();
    let kind = kind_from_extension(path)?;
    buf.ensure_finite()?;
    let samples = quantize(buf, depth);
    let mut out = BufWriter::new(File::create(path)?);
    match kind {
        FileKind::Png => {
            let mut encoder = png::Encoder::new(&mut out, buf.width() as u32, buf.height() as u32);
            encoder.set_color(if buf.channels() == 3 {
                png::ColorType::Rgb
            } else {
                png::ColorType::Grayscale
            });
            let bytes: Vec<u8> = match depth {
                BitDepth::Eight => {
                    encoder.set_depth(png::BitDepth::Eight);
                    samples.iter().map(|&v| v as u8).collect()
                }
                BitDepth::Sixteen => {
                    encoder.set_depth(png::BitDepth::Sixteen);
                    samples.iter().flat_map(|v| v.to_be_bytes()).collect()
                }
            };
            let mut writer = encoder
                .write_header()
                .map_err(|e| Error::Io(std::io::Error::other(e)))?;
            writer
                .write_image_data(&bytes)
                .map_err(|e| Error::Io(std::io::Error::other(e)))?;
            writer
                .finish()
                .map_err(|e| Error::Io(std::io::Error::other(e)))?;
        }
        FileKind::Netpbm => {
            let magic = if buf.channels() == 3 { "P6" } else { "P5" };
            write!(
                out,
                "{magic}\n{} {}\n{}\n",
                buf.width(),
                buf.height(),
                depth.max_value()
            )?;
            match depth {
                BitDepth::Eight => {
                    out.write_all(&samples.iter().map(|&v| v as u8).collect::<Vec<_>>())?
                }
                BitDepth::Sixteen => out.write_all(
                    &samples
                        .iter()
                        .flat_map(|v| v.to_be_bytes())
                        .collect::<Vec<_>>(),
                )?,
            }
        }
    }
    out.flush()?;
    Ok(())
}
