//! Deterministic synthetic test corpus.
//!
//! Scenes are rendered through a simple underwater formation model,
//! `I_c = J_c·t_c + A_c·(1 − t_c)` with transmission `t_c = exp(−β_c·d)`:
//! red is attenuated fastest, and the veiling light `A` is blue-green. Every
//! sample is quantized to 8-bit levels so the corpus survives a PNG round
//! trip unchanged.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::image::{clamp_unit, ImageBuffer};

pub const CORPUS_SIZE: usize = 24;
pub const DEFAULT_DIM: usize = 64;

#[derive(Debug, Clone)]
pub struct CorpusImage {
    pub name: &'static str,
    pub image: ImageBuffer<f64>,
}

fn quantize(v: f64) -> f64 {
    (clamp_unit(v) * 255.0).round() / 255.0
}

struct Water {
    beta: [f64; 3],
    ambient: [f64; 3],
}

const CLEAR_BLUE: Water = Water {
    beta: [2.2, 0.7, 0.45],
    ambient: [0.05, 0.35, 0.55],
};
const GREEN: Water = Water {
    beta: [2.0, 0.5, 1.0],
    ambient: [0.08, 0.5, 0.3],
};
const TURBID: Water = Water {
    beta: [1.6, 1.0, 0.9],
    ambient: [0.25, 0.45, 0.5],
};

/// Renders `scene(u, v) → RGB` seen through `depth(u, v)` of `water`, plus
/// Gaussian-ish noise of amplitude `noise`. `u, v ∈ [0, 1]`.
fn render(
    dim: usize,
    seed: u64,
    water: &Water,
    noise: f64,
    scene: impl Fn(f64, f64) -> [f64; 3],
    depth: impl Fn(f64, f64) -> f64,
) -> ImageBuffer<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = dim * dim;
    let mut planes = vec![vec![0.0; n]; 3];
    let s = (dim - 1).max(1) as f64;
    for y in 0..dim {
        for x in 0..dim {
            let (u, v) = (x as f64 / s, y as f64 / s);
            let j = scene(u, v);
            let d = depth(u, v);
            // sum of three uniforms: cheap bell-shaped noise
            let e: f64 = (0..3).map(|_| rng.random::<f64>() - 0.5).sum::<f64>() * noise;
            for c in 0..3 {
                let t = (-water.beta[c] * d).exp();
                planes[c][y * dim + x] = quantize(j[c] * t + water.ambient[c] * (1.0 - t) + e);
            }
        }
    }
    ImageBuffer::from_planes(dim, dim, planes).expect("valid corpus dimensions")
}

fn blob(u: f64, v: f64, cu: f64, cv: f64, r: f64) -> f64 {
    let d2 = ((u - cu).powi(2) + (v - cv).powi(2)) / (r * r);
    (-d2).exp()
}

/// Gray scene on 8-bit levels whose blue channel is lifted by `k` and clamped:
/// `R = G = pattern`, `B = min(1, R + k)`.
pub fn synthetic_cast(dim: usize, k: f64) -> ImageBuffer<f64> {
    let s = (dim - 1).max(1) as f64;
    ImageBuffer::from_fn(dim, dim, 3, |x, y, c| {
        let (u, v) = (x as f64 / s, y as f64 / s);
        let base = 0.05 + 0.65 * (0.6 * u + 0.4 * (0.5 + 0.5 * (6.0 * v).sin() * (4.0 * u).cos()));
        let r = quantize(base);
        if c == 2 {
            clamp_unit(r + k)
        } else {
            r
        }
    })
    .expect("valid dimensions")
}

/// Grayscale horizontal ramp with additive uniform noise of half-width
/// `amplitude`, clamped to `[0, 1]`.
pub fn noisy_gradient(dim: usize, amplitude: f64, seed: u64) -> ImageBuffer<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = (dim - 1).max(1) as f64;
    ImageBuffer::from_fn(dim, dim, 1, |x, _, _| {
        let noise = (rng.random::<f64>() * 2.0 - 1.0) * amplitude;
        clamp_unit(0.1 + 0.8 * x as f64 / s + noise)
    })
    .expect("valid dimensions")
}

/// The 24 bundled images at `dim × dim`.
pub fn bundled_with_dim(dim: usize) -> Vec<CorpusImage> {
    let flat = |_: f64, _: f64| 0.4;
    let slope = |_: f64, v: f64| 0.2 + 0.8 * v;
    let reef = |u: f64, v: f64| {
        [
            0.7 * blob(u, v, 0.3, 0.6, 0.2) + 0.2,
            0.4 + 0.4 * blob(u, v, 0.7, 0.4, 0.25),
            0.3 + 0.3 * (8.0 * u).sin().abs(),
        ]
    };
    let fish = |u: f64, v: f64| {
        let f =
            blob(u, v, 0.35, 0.5, 0.12) + blob(u, v, 0.65, 0.35, 0.1) + blob(u, v, 0.6, 0.7, 0.08);
        [
            0.15 + 0.8 * f.min(1.0),
            0.2 + 0.6 * f.min(1.0),
            0.25 + 0.3 * f.min(1.0),
        ]
    };
    let diver = |u: f64, v: f64| {
        let body = if (u - 0.5).abs() < 0.08 && (0.25..0.8).contains(&v) {
            1.0
        } else {
            0.0
        };
        let head = blob(u, v, 0.5, 0.2, 0.06);
        let k = (body + head).min(1.0);
        [0.5 - 0.4 * k, 0.5 - 0.4 * k, 0.5 - 0.3 * k]
    };
    let sand = |u: f64, v: f64| {
        let ripple = 0.5 + 0.5 * (20.0 * v + 3.0 * (5.0 * u).sin()).sin();
        [0.6 + 0.2 * ripple, 0.5 + 0.15 * ripple, 0.35 + 0.1 * ripple]
    };
    let rings = |u: f64, v: f64| {
        let r = ((u - 0.5).powi(2) + (v - 0.5).powi(2)).sqrt();
        let g = 0.5 + 0.5 * (40.0 * r).cos();
        [g, 0.8 * g + 0.1, 0.6 * g + 0.2]
    };
    let checker = |u: f64, v: f64| {
        let on = ((u * 8.0).floor() as i64 + (v * 8.0).floor() as i64) % 2 == 0;
        if on {
            [0.8, 0.7, 0.6]
        } else {
            [0.2, 0.25, 0.3]
        }
    };
    let stripes = |u: f64, _: f64| {
        let g = 0.5 + 0.5 * (18.0 * u).sin();
        [g, g, g]
    };
    let statue = |u: f64, v: f64| {
        let s = 0.2 + 0.7 * blob(u, v, 0.5, 0.45, 0.22) + 0.2 * blob(u, v, 0.5, 0.15, 0.08);
        [s.min(1.0), (0.95 * s).min(1.0), (0.9 * s).min(1.0)]
    };
    let wreck = |u: f64, v: f64| {
        let hull = if v > 0.55 + 0.1 * (6.0 * u).sin() && (0.15..0.85).contains(&u) {
            1.0
        } else {
            0.0
        };
        [0.6 - 0.5 * hull, 0.65 - 0.5 * hull, 0.7 - 0.5 * hull]
    };

    let gray = |f: fn(f64, f64) -> f64| {
        move |u: f64, v: f64| {
            let g = f(u, v);
            [g, g, g]
        }
    };

    let mut images = vec![
        CorpusImage {
            name: "sea-plants",
            image: render(dim, 1, &GREEN, 0.04, reef, |_, v| 0.4 + 0.6 * v),
        },
        CorpusImage {
            name: "fishes",
            image: render(dim, 2, &CLEAR_BLUE, 0.03, fish, |_, _| 0.6),
        },
        CorpusImage {
            name: "divers-haze",
            image: render(dim, 3, &TURBID, 0.02, diver, |_, _| 1.1),
        },
        CorpusImage {
            name: "dark-reef",
            image: render(
                dim,
                4,
                &CLEAR_BLUE,
                0.02,
                move |u, v| reef(u, v).map(|c| 0.35 * c),
                |_, _| 0.5,
            )
            .map(|v| quantize(0.45 * v)),
        },
        CorpusImage {
            name: "blue-cast-gradient",
            image: synthetic_cast(dim, 0.2).map(quantize),
        },
        CorpusImage {
            name: "green-cast-texture",
            image: render(dim, 6, &GREEN, 0.05, rings, |_, _| 0.9),
        },
        CorpusImage {
            name: "faded-stripes",
            image: render(dim, 7, &TURBID, 0.01, stripes, |_, _| 1.4),
        },
        CorpusImage {
            name: "noisy-gradient",
            image: noisy_gradient(dim, 0.08, 8).to_rgb().map(quantize),
        },
        CorpusImage {
            name: "checker-blue",
            image: render(dim, 9, &CLEAR_BLUE, 0.02, checker, |_, _| 0.7),
        },
        CorpusImage {
            name: "radial-glow",
            image: render(
                dim,
                10,
                &CLEAR_BLUE,
                0.02,
                |u, v| [0.9 * blob(u, v, 0.5, 0.5, 0.35) + 0.05; 3],
                |u, v| 0.3 + 1.2 * ((u - 0.5).powi(2) + (v - 0.5).powi(2)).sqrt(),
            ),
        },
        CorpusImage {
            name: "red-attenuated",
            image: render(dim, 11, &CLEAR_BLUE, 0.02, sand, slope),
        },
        CorpusImage {
            name: "gray-ramp",
            image: ImageBuffer::from_fn(dim, dim, 3, |x, _, _| {
                quantize(x as f64 / (dim - 1) as f64)
            })
            .expect("valid dimensions"),
        },
        CorpusImage {
            name: "constant-gray",
            image: ImageBuffer::filled(dim, dim, 3, quantize(0.5)).expect("valid dimensions"),
        },
        CorpusImage {
            name: "bimodal-blobs",
            image: render(
                dim,
                14,
                &TURBID,
                0.03,
                gray(|u, v| {
                    if blob(u, v, 0.3, 0.3, 0.2) + blob(u, v, 0.7, 0.7, 0.2) > 0.5 {
                        0.9
                    } else {
                        0.15
                    }
                }),
                |_, _| 0.5,
            ),
        },
        CorpusImage {
            name: "jar-misaligned",
            image: render(
                dim,
                15,
                &Water {
                    beta: [3.0, 1.2, 0.2],
                    ambient: [0.02, 0.25, 0.7],
                },
                0.02,
                statue,
                |_, _| 0.9,
            ),
        },
        CorpusImage {
            name: "ocean-floor",
            image: render(dim, 16, &TURBID, 0.03, sand, |_, v| 0.5 + v),
        },
        CorpusImage {
            name: "ship-wreck",
            image: render(dim, 17, &CLEAR_BLUE, 0.03, wreck, |_, _| 0.8),
        },
        CorpusImage {
            name: "object-rings",
            image: render(dim, 18, &CLEAR_BLUE, 0.02, rings, |_, _| 0.4),
        },
        CorpusImage {
            name: "textured-noise",
            image: render(dim, 19, &GREEN, 0.15, flat_rgb(0.45), |_, _| 0.3),
        },
        CorpusImage {
            name: "horizon",
            image: render(
                dim,
                20,
                &CLEAR_BLUE,
                0.02,
                |_, v| if v < 0.4 { [0.9; 3] } else { [0.5, 0.4, 0.3] },
                |_, v| {
                    if v < 0.4 {
                        1.5
                    } else {
                        0.4
                    }
                },
            ),
        },
        CorpusImage {
            name: "low-key-shapes",
            image: render(dim, 21, &GREEN, 0.01, checker, |_, _| 0.6).map(|v| quantize(0.3 * v)),
        },
        CorpusImage {
            name: "high-key-haze",
            image: render(dim, 22, &TURBID, 0.01, fish, |_, _| 1.8)
                .map(|v| quantize(0.5 + 0.5 * v)),
        },
        CorpusImage {
            name: "cyan-cast-sinusoid",
            image: render(
                dim,
                23,
                &Water {
                    beta: [2.5, 0.4, 0.4],
                    ambient: [0.05, 0.55, 0.55],
                },
                0.02,
                gray(|u, v| 0.5 + 0.4 * (9.0 * u).sin() * (7.0 * v).cos()),
                |_, _| 0.8,
            ),
        },
        CorpusImage {
            name: "statue",
            image: render(dim, 24, &TURBID, 0.02, statue, |_, _| 0.35),
        },
    ];
    debug_assert_eq!(images.len(), CORPUS_SIZE);
    let _ = flat;
    images.truncate(CORPUS_SIZE);
    images
}

fn flat_rgb(level: f64) -> impl Fn(f64, f64) -> [f64; 3] {
    move |_, _| [level; 3]
}

/// The 24 bundled images at the default size.
pub fn bundled() -> Vec<CorpusImage> {
    bundled_with_dim(DEFAULT_DIM)
}
