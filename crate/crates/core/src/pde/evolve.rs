use std::io::Write;

use serde::Serialize;

use super::config::{DiffusionForm, PdeConfig, PdeModel, TermMode, FORCING_BUDGET};
use super::curvature::{curvature_plane, diffusivity};
use crate::analysis::{central_gradient, stats_of, DEFAULT_BINS};
use crate::contrast::cascade;
use crate::error::{Error, Result};
use crate::image::{clamp_unit, ImageBuffer};
use crate::scalar::Scalar;

/// Anchor of the colour-correction term.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColourAnchor {
    Mean,
    Mode,
}

impl From<PdeModel> for ColourAnchor {
    fn from(model: PdeModel) -> Self {
        match model {
            PdeModel::ModeAnchored => ColourAnchor::Mode,
            PdeModel::MeanAnchored => ColourAnchor::Mean,
        }
    }
}

/// Per channel `(v − anchor) / max(σ, sigma_min)`, statistics taken from
/// `buf` itself. The result is a raw field.
pub fn colour_term<T: Scalar>(
    buf: &ImageBuffer<T>,
    anchor: ColourAnchor,
    sigma_min: f64,
) -> ImageBuffer<T> {
    let floor = T::lit(sigma_min);
    buf.map_planes(|_, plane| {
        let s = stats_of(plane, DEFAULT_BINS, 0.0, 1.0);
        let centre = match anchor {
            ColourAnchor::Mean => s.mean,
            ColourAnchor::Mode => s.mode,
        };
        let sigma = s.std.max(floor);
        plane.iter().map(|&v| (v - centre) / sigma).collect()
    })
}

/// Largest `|C|` the colour term takes on `buf`.
pub fn colour_peak<T: Scalar>(buf: &ImageBuffer<T>, anchor: ColourAnchor, sigma_min: f64) -> f64 {
    colour_term(buf, anchor, sigma_min)
        .samples()
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs().as_f64()))
}

/// Full stability pre-flight for evolving `buf` under `cfg`.
pub fn check_stability<T: Scalar>(buf: &ImageBuffer<T>, cfg: &PdeConfig) -> Result<()> {
    cfg.validate()?;
    buf.ensure_finite()?;
    if cfg.lambda_colour > 0.0 {
        let peak = colour_peak(buf, cfg.model.into(), cfg.sigma_min);
        let budget = cfg.forcing_budget(peak);
        if budget > FORCING_BUDGET {
            return Err(Error::StabilityBudgetExceeded(format!(
                "dt * (lambda_local + lambda_global + lambda_f + lambda_colour * max|C|) = {budget} > {FORCING_BUDGET} (max|C| = {peak})"
            )));
        }
    }
    Ok(())
}

/// One explicit Euler step followed by clamping to `[0, 1]`.
pub fn pde_step<T: Scalar>(buf: &ImageBuffer<T>, cfg: &PdeConfig) -> Result<ImageBuffer<T>> {
    check_stability(buf, cfg)?;
    Ok(step_unchecked(buf, cfg)?.image)
}

pub(crate) struct StepOutput<T> {
    pub image: ImageBuffer<T>,
    pub clamped: usize,
}

/// The update is written as a blend so that a unit fidelity step lands on the
/// operator output exactly:
///
/// ```text
/// I' = (1 − dt·Σλ_fid)·I + dt·(Σλ·f + λ·D·|∇I|·κ + λ_c·C)
/// ```
///
/// where the fidelity gains `λ_fid` are those whose term subtracts `I`.
pub(crate) fn step_unchecked<T: Scalar>(
    buf: &ImageBuffer<T>,
    cfg: &PdeConfig,
) -> Result<StepOutput<T>> {
    let (w, h) = (buf.width(), buf.height());
    let dt = T::lit(cfg.dt);

    let local = if cfg.lambda_local > 0.0 || cfg.lambda_f > 0.0 {
        Some(cascade(buf, &cfg.local_op)?)
    } else {
        None
    };
    let global = if cfg.lambda_global > 0.0 {
        Some(cascade(buf, &cfg.global_op)?)
    } else {
        None
    };
    let colour =
        (cfg.lambda_colour > 0.0).then(|| colour_term(buf, cfg.model.into(), cfg.sigma_min));

    let fidelity = match cfg.term_mode {
        TermMode::Residual => cfg.lambda_local + cfg.lambda_global + cfg.lambda_f,
        TermMode::Faithful => cfg.lambda_local,
    };
    let keep = T::one() - dt * T::lit(fidelity);
    let (lam_l, lam_g, lam_f) = (
        T::lit(cfg.lambda_local),
        T::lit(cfg.lambda_global),
        T::lit(cfg.lambda_f),
    );
    let (lam_d, lam_c) = (T::lit(cfg.lambda_diff), T::lit(cfg.lambda_colour));
    let pm_k = T::lit(cfg.pm_k);

    let mut clamped = 0usize;
    let image = buf.map_planes(|c, plane| {
        let kappa = (cfg.lambda_diff > 0.0).then(|| curvature_plane(plane, w, h, cfg.eps));
        let mut out = Vec::with_capacity(plane.len());
        for (i, &v) in plane.iter().enumerate() {
            let mut drive = T::zero();
            if let Some(l) = &local {
                let fl = l.plane(c)[i];
                if cfg.lambda_local > 0.0 {
                    drive = drive + lam_l * fl;
                }
                if cfg.lambda_f > 0.0 {
                    drive = drive + lam_f * fl;
                }
            }
            if let Some(g) = &global {
                drive = drive + lam_g * g.plane(c)[i];
            }
            if let Some(k) = &kappa {
                let (gx, gy) = central_gradient(plane, w, h, i % w, i / w);
                let g = (gx * gx + gy * gy).sqrt();
                let speed = match cfg.diffusion_form {
                    DiffusionForm::LevelSet => g * k[i],
                    DiffusionForm::Raw => k[i],
                };
                drive = drive + lam_d * diffusivity(g, pm_k) * speed;
            }
            if let Some(col) = &colour {
                drive = drive + lam_c * col.plane(c)[i];
            }
            let next = keep * v + dt * drive;
            if !(T::zero()..=T::one()).contains(&next) {
                clamped += 1;
            }
            out.push(clamp_unit(next));
        }
        out
    });
    if !image.is_finite() {
        return Err(Error::InvalidBufferState(
            "evolution produced a non-finite sample".into(),
        ));
    }
    Ok(StepOutput { image, clamped })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChannelSnapshot<T> {
    pub mean: T,
    pub std: T,
    pub mode: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRecord<T> {
    /// 1-based iteration number.
    pub iter: usize,
    pub mean_abs_update: T,
    pub clamped_fraction: T,
    pub channels: Vec<ChannelSnapshot<T>>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct EvolutionTrace<T> {
    pub records: Vec<TraceRecord<T>>,
    /// The last update fell below the tolerance.
    pub converged: bool,
}

impl<T: Scalar> EvolutionTrace<T> {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// `iter, mean_abs_update, clamped_fraction`, then `mean_c, std_c, mode_c`
    /// for every channel.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(out);
        let channels = self.records.first().map_or(0, |r| r.channels.len());
        let mut header = vec![
            "iter".to_string(),
            "mean_abs_update".to_string(),
            "clamped_fraction".to_string(),
        ];
        for c in 0..channels {
            header.extend([format!("mean_{c}"), format!("std_{c}"), format!("mode_{c}")]);
        }
        wtr.write_record(&header).map_err(csv_err)?;
        for r in &self.records {
            let mut row = vec![
                r.iter.to_string(),
                r.mean_abs_update.to_string(),
                r.clamped_fraction.to_string(),
            ];
            for s in &r.channels {
                row.extend([s.mean.to_string(), s.std.to_string(), s.mode.to_string()]);
            }
            wtr.write_record(&row).map_err(csv_err)?;
        }
        wtr.flush()?;
        Ok(())
    }
}

pub(crate) fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

/// Iterates [`pde_step`] until the mean absolute update falls below
/// `cfg.tol` or `cfg.max_iters` steps have run.
pub fn evolve<T: Scalar>(
    buf: &ImageBuffer<T>,
    cfg: &PdeConfig,
) -> Result<(ImageBuffer<T>, EvolutionTrace<T>)> {
    check_stability(buf, cfg)?;
    let mut cur = buf.clone();
    let mut trace = EvolutionTrace {
        records: Vec::new(),
        converged: false,
    };
    let samples = T::from_count(buf.samples().len());
    let tol = T::lit(cfg.tol);
    for iter in 1..=cfg.max_iters {
        let step = step_unchecked(&cur, cfg)?;
        let mean_abs_update = cur
            .samples()
            .iter()
            .zip(step.image.samples())
            .map(|(&a, &b)| (a - b).abs())
            .sum::<T>()
            / samples;
        let channels = step
            .image
            .planes()
            .map(|p| {
                let s = stats_of(p, DEFAULT_BINS, 0.0, 1.0);
                ChannelSnapshot {
                    mean: s.mean,
                    std: s.std,
                    mode: s.mode,
                }
            })
            .collect();
        trace.records.push(TraceRecord {
            iter,
            mean_abs_update,
            clamped_fraction: T::from_count(step.clamped) / samples,
            channels,
        });
        cur = step.image;
        if mean_abs_update < tol {
            trace.converged = true;
            break;
        }
    }
    Ok((cur, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contrast::{clahe, ClaheParams, OperatorSpec};
    use crate::image::clamp01;

    fn textured() -> ImageBuffer<f64> {
        ImageBuffer::from_fn(24, 24, 3, |x, y, c| {
            0.3 + 0.25 * ((x as f64 * 0.5 + c as f64).sin() * (y as f64 * 0.35).cos())
        })
        .unwrap()
    }

    #[test]
    fn colour_term_examples() {
        let c = ImageBuffer::<f64>::filled(4, 4, 3, 0.6).unwrap();
        assert!(colour_term(&c, ColourAnchor::Mean, 1e-3)
            .samples()
            .iter()
            .all(|&v| v == 0.0));
        assert!(colour_term(&c, ColourAnchor::Mode, 1e-3)
            .samples()
            .iter()
            .all(|&v| v == 0.0));

        let half =
            ImageBuffer::<f64>::from_fn(4, 2, 1, |x, _, _| if x < 2 { 0.0 } else { 1.0 }).unwrap();
        let t = colour_term(&half, ColourAnchor::Mean, 1e-3);
        for (&v, &src) in t.samples().iter().zip(half.samples()) {
            assert_eq!(v, if src == 0.0 { -1.0 } else { 1.0 });
        }
    }

    #[test]
    fn zero_gains_is_identity() {
        let img = textured();
        assert_eq!(pde_step(&img, &PdeConfig::inert()).unwrap(), img);
    }

    #[test]
    fn diffusion_leaves_constant_alone() {
        let c = ImageBuffer::<f64>::filled(10, 10, 1, 0.25).unwrap();
        let cfg = PdeConfig {
            lambda_diff: 1.0,
            ..PdeConfig::inert()
        };
        assert_eq!(pde_step(&c, &cfg).unwrap(), c);
    }

    #[test]
    fn unit_fidelity_step_telescopes() {
        let img = textured();
        let cfg = PdeConfig {
            dt: 1.0,
            lambda_local: 1.0,
            ..PdeConfig::inert()
        };
        let want = clamp01(&clahe(&img, &ClaheParams::default()).unwrap()).unwrap();
        assert_eq!(pde_step(&img, &cfg).unwrap(), want);

        let global = PdeConfig {
            dt: 1.0,
            lambda_global: 1.0,
            ..PdeConfig::inert()
        };
        let want = OperatorSpec::Goc2.apply(&img).unwrap();
        assert_eq!(pde_step(&img, &global).unwrap(), want);

        let identity = PdeConfig {
            dt: 1.0,
            lambda_local: 1.0,
            local_op: Vec::new(),
            ..PdeConfig::inert()
        };
        assert_eq!(pde_step(&img, &identity).unwrap(), img);
    }

    #[test]
    fn faithful_equals_residual_without_global_terms() {
        let img = textured();
        let residual = PdeConfig {
            lambda_global: 0.0,
            ..PdeConfig::default()
        };
        let faithful = PdeConfig {
            term_mode: TermMode::Faithful,
            ..residual.clone()
        };
        assert_eq!(
            evolve(&img, &residual).unwrap().0,
            evolve(&img, &faithful).unwrap().0
        );
    }

    #[test]
    fn inert_evolution_stops_after_one_step() {
        let img = textured();
        let (out, trace) = evolve(&img, &PdeConfig::inert()).unwrap();
        assert_eq!(out, img);
        assert_eq!(trace.len(), 1);
        assert!(trace.converged);
    }

    #[test]
    fn trace_respects_bounds() {
        let img = textured();
        let cfg = PdeConfig {
            max_iters: 5,
            tol: 0.0,
            ..PdeConfig::default()
        };
        let (out, trace) = evolve(&img, &cfg).unwrap();
        assert_eq!(trace.len(), 5);
        assert!(!trace.converged);
        assert!(out.in_unit_range());
        let mut csv = Vec::new();
        trace.write_csv(&mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        assert!(text.starts_with("iter,mean_abs_update,clamped_fraction,mean_0,std_0,mode_0,"));
        assert_eq!(text.lines().count(), 6);
    }

    #[test]
    fn colour_budget_is_image_dependent() {
        // a single bright pixel on a dark field drives |C| to ~sqrt(N)
        let spike =
            ImageBuffer::<f64>::from_fn(
                64,
                64,
                1,
                |x, y, _| if (x, y) == (5, 5) { 1.0 } else { 0.0 },
            )
            .unwrap();
        let cfg = PdeConfig {
            lambda_colour: 0.5,
            ..PdeConfig::default()
        };
        assert!(matches!(
            pde_step(&spike, &cfg),
            Err(Error::StabilityBudgetExceeded(_))
        ));
        let flat = ImageBuffer::<f64>::filled(64, 64, 1, 0.2).unwrap();
        pde_step(&flat, &cfg).unwrap();
    }
}
