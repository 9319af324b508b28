//! Montages, histogram plots and a tiny 3×5 bitmap font for labels.

use uwpde::analysis::Histogram;
use uwpde::{Image, ImageBuffer};

/// Gap between montage panels, in pixels.
pub const MONTAGE_SEPARATOR: usize = 8;

const GLYPH_W: usize = 3;
const GLYPH_H: usize = 5;
const SEPARATOR_LEVEL: f64 = 0.5;

/// Rows of a glyph, most significant of the low three bits leftmost.
fn glyph(c: char) -> [u8; GLYPH_H] {
    match c.to_ascii_lowercase() {
        '0' => [7, 5, 5, 5, 7],
        '1' => [2, 6, 2, 2, 7],
        '2' => [7, 1, 7, 4, 7],
        '3' => [7, 1, 7, 1, 7],
        '4' => [5, 5, 7, 1, 1],
        '5' => [7, 4, 7, 1, 7],
        '6' => [7, 4, 7, 5, 7],
        '7' => [7, 1, 1, 2, 2],
        '8' => [7, 5, 7, 5, 7],
        '9' => [7, 5, 7, 1, 7],
        'a' => [2, 5, 7, 5, 5],
        'b' => [6, 5, 6, 5, 6],
        'c' => [3, 4, 4, 4, 3],
        'd' => [6, 5, 5, 5, 6],
        'e' => [7, 4, 6, 4, 7],
        'f' => [7, 4, 6, 4, 4],
        'g' => [3, 4, 5, 5, 3],
        'h' => [5, 5, 7, 5, 5],
        'i' => [7, 2, 2, 2, 7],
        'j' => [1, 1, 1, 5, 2],
        'k' => [5, 5, 6, 5, 5],
        'l' => [4, 4, 4, 4, 7],
        'm' => [5, 7, 7, 5, 5],
        'n' => [6, 5, 5, 5, 5],
        'o' => [2, 5, 5, 5, 2],
        'p' => [6, 5, 6, 4, 4],
        'q' => [2, 5, 5, 6, 3],
        'r' => [6, 5, 6, 5, 5],
        's' => [3, 4, 2, 1, 6],
        't' => [7, 2, 2, 2, 2],
        'u' => [5, 5, 5, 5, 7],
        'v' => [5, 5, 5, 5, 2],
        'w' => [5, 5, 7, 7, 5],
        'x' => [5, 5, 2, 5, 5],
        'y' => [5, 5, 2, 2, 2],
        'z' => [7, 1, 2, 4, 7],
        '-' => [0, 0, 7, 0, 0],
        '.' => [0, 0, 0, 0, 2],
        '_' => [0, 0, 0, 0, 7],
        _ => [0; GLYPH_H],
    }
}

/// Largest integer scale (up to 3) at which `text` fits in `width`.
fn label_scale(text: &str, width: usize) -> usize {
    let cols = text.chars().count() * (GLYPH_W + 1);
    (1..=3).rev().find(|s| cols * s <= width).unwrap_or(1)
}

fn strip_height(scale: usize) -> usize {
    GLYPH_H * scale + 4
}

/// Draws `text` in white starting at `(x0, y0)`, clipped to the image.
pub fn draw_label(img: &mut Image, text: &str, x0: usize, y0: usize, scale: usize) {
    let (w, h) = (img.width(), img.height());
    for (i, ch) in text.chars().enumerate() {
        let gx = x0 + i * (GLYPH_W + 1) * scale;
        for (row, bits) in glyph(ch).iter().enumerate() {
            for col in 0..GLYPH_W {
                if bits >> (GLYPH_W - 1 - col) & 1 == 0 {
                    continue;
                }
                for dy in 0..scale {
                    for dx in 0..scale {
                        let (x, y) = (gx + col * scale + dx, y0 + row * scale + dy);
                        if x < w && y < h {
                            for c in 0..img.channels() {
                                img.set(x, y, c, 1.0);
                            }
                        }
                    }
                }
            }
        }
    }
}

/// Places labeled panels in one row separated by [`MONTAGE_SEPARATOR`]
/// gray columns. A `None` panel is drawn as a dark placeholder of the size of
/// the first real panel. Grayscale panels are shown as RGB.
pub fn montage(panels: &[(String, Option<Image>)]) -> Option<Image> {
    let first = panels.iter().find_map(|(_, p)| p.as_ref())?;
    let (pw, ph) = (first.width(), first.height());
    let scale = panels
        .iter()
        .map(|(label, _)| label_scale(label, pw))
        .min()
        .unwrap_or(1);
    let strip = strip_height(scale);
    let n = panels.len();
    let width = n * pw + (n - 1) * MONTAGE_SEPARATOR;
    let height = ph + strip;
    let mut out = ImageBuffer::filled(width, height, 3, 0.0).ok()?;
    for (i, (label, panel)) in panels.iter().enumerate() {
        let x0 = i * (pw + MONTAGE_SEPARATOR);
        if i > 0 {
            for y in 0..height {
                for x in x0 - MONTAGE_SEPARATOR..x0 {
                    for c in 0..3 {
                        out.set(x, y, c, SEPARATOR_LEVEL);
                    }
                }
            }
        }
        let rgb = panel
            .as_ref()
            .filter(|p| p.width() == pw && p.height() == ph)
            .map(Image::to_rgb);
        for y in 0..ph {
            for x in 0..pw {
                for c in 0..3 {
                    let v = rgb.as_ref().map_or(0.15, |p| p.get(x, y, c));
                    out.set(x0 + x, strip + y, c, v);
                }
            }
        }
        draw_label(&mut out, label, x0 + 1, 2, scale);
    }
    Some(out)
}

/// Overlaid per-channel histograms, two pixels per bin, each channel scaled
/// to its own tallest bin. Channel `c` lights colour component `c`.
pub fn histogram_plot(hists: &[Histogram], height: usize) -> Image {
    let bins = hists.first().map_or(256, Histogram::bins);
    let width = 2 * bins;
    let mut out = ImageBuffer::filled(width, height, 3, 0.0).expect("non-empty plot");
    for (c, hist) in hists.iter().enumerate().take(3) {
        let peak = hist.counts().iter().copied().max().unwrap_or(0).max(1) as f64;
        for (b, &count) in hist.counts().iter().enumerate() {
            let bar = ((count as f64 / peak) * height as f64).round() as usize;
            for y in height - bar.min(height)..height {
                out.set(2 * b, y, c, 1.0);
                out.set(2 * b + 1, y, c, 1.0);
            }
        }
    }
    out
}
