use proptest::prelude::*;
use uwpde::analysis::{bin_index, cast_score, channel_histogram, mean_std, Histogram};
use uwpde::colour::rgb_to_xyz;
use uwpde::contrast::{
    cascade, clahe, goc, gray_world_align, stretch, ClaheParams, GocParams, OperatorSpec,
    PercentileParams, PwlMap, PwlParams, StretchParams,
};
use uwpde::pde::{pde_step, PdeConfig, PdeModel, TermMode};
use uwpde::Image;

fn image(max_side: usize, channels: usize) -> impl Strategy<Value = Image> {
    (2..=max_side, 2..=max_side).prop_flat_map(move |(w, h)| {
        prop::collection::vec(0.0..=1.0f64, w * h * channels)
            .prop_map(move |data| Image::from_planar(w, h, channels, data).unwrap())
    })
}

fn colour_image() -> impl Strategy<Value = Image> {
    image(12, 3)
}

fn fraction_pair() -> impl Strategy<Value = (f64, f64)> {
    (0.0..0.45f64, 0.55..=1.0f64)
}

fn operator() -> impl Strategy<Value = OperatorSpec> {
    prop_oneof![
        (1..=3usize, 1..=3usize, 1.0..8.0f64, any::<bool>()).prop_map(
            |(tx, ty, clip, per_channel)| {
                OperatorSpec::Clahe(ClaheParams {
                    tiles_x: tx,
                    tiles_y: ty,
                    bins: 64,
                    clip_factor: clip,
                    per_channel,
                })
            }
        ),
        fraction_pair().prop_map(|(p_low_frac, p_high_frac)| OperatorSpec::Pwl(PwlParams {
            p_low_frac,
            p_high_frac,
            points: None,
        })),
        fraction_pair().prop_map(
            |(p_low_frac, p_high_frac)| OperatorSpec::Hs(PercentileParams {
                p_low_frac,
                p_high_frac
            })
        ),
        fraction_pair().prop_map(
            |(p_low_frac, p_high_frac)| OperatorSpec::Cs(PercentileParams {
                p_low_frac,
                p_high_frac
            })
        ),
        Just(OperatorSpec::Goc2),
        (0.3..3.0f64).prop_map(|gamma| OperatorSpec::Goc3 { gamma }),
    ]
}

/// Monotone map with first input 0 and last input 1.
fn pwl_map() -> impl Strategy<Value = PwlMap> {
    (
        prop::collection::vec(0.01..0.99f64, 0..5),
        prop::collection::vec(0.0..=1.0f64, 2..7),
    )
        .prop_map(|(mut xs, mut ys)| {
            xs.sort_by(f64::total_cmp);
            xs.dedup_by(|a, b| (*a - *b).abs() < 1e-6);
            let mut inputs = vec![0.0];
            inputs.extend(xs);
            inputs.push(1.0);
            ys.resize(inputs.len(), 1.0);
            ys.sort_by(f64::total_cmp);
            PwlMap::new(inputs.into_iter().zip(ys).map(|(x, y)| [x, y]).collect()).unwrap()
        })
}

fn stable_config() -> impl Strategy<Value = PdeConfig> {
    (
        0.0..=2.5f64,
        0.0..=1.0f64,
        0.0..=1.0f64,
        0.0..=0.2f64,
        0.0..=0.5f64,
        any::<bool>(),
        any::<bool>(),
        operator(),
    )
        .prop_map(|(ld, ll, lg, lc, lf, mode, residual, op)| PdeConfig {
            model: if mode {
                PdeModel::ModeAnchored
            } else {
                PdeModel::MeanAnchored
            },
            lambda_diff: ld,
            lambda_local: ll,
            lambda_global: lg,
            lambda_colour: lc,
            lambda_f: lf,
            dt: 0.1,
            term_mode: if residual {
                TermMode::Residual
            } else {
                TermMode::Faithful
            },
            local_op: vec![op],
            ..PdeConfig::default()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn histogram_counts_every_sample(img in image(10, 1), bins in 2..300usize) {
        let h = channel_histogram(&img, 0, bins).unwrap();
        prop_assert_eq!(h.total(), img.pixel_count() as u64);
        prop_assert_eq!(h.bins(), bins);
        for &v in img.samples() {
            prop_assert!(bin_index(v, bins) < bins);
        }
    }

    #[test]
    fn mean_std_matches_direct_sums(samples in prop::collection::vec(0.0..=1.0f64, 1..200)) {
        let n = samples.len() as f64;
        let mean: f64 = samples.iter().sum::<f64>() / n;
        let var: f64 = samples.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        let (m, s) = mean_std(&samples);
        prop_assert!((m - mean).abs() < 1e-12);
        prop_assert!((s - var.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn histogram_ignores_sample_order(mut samples in prop::collection::vec(0.0..=1.0f64, 1..100)) {
        let a = Histogram::from_samples(&samples, 32);
        samples.reverse();
        let k = samples.len() / 3;
        samples.rotate_left(k);
        prop_assert_eq!(a, Histogram::from_samples(&samples, 32));
    }

    #[test]
    fn cast_score_ignores_common_shift(img in colour_image(), shift in -0.5..0.5f64) {
        let shifted = img.map(|v| v + shift);
        let (a, b) = (cast_score(&img).unwrap(), cast_score(&shifted).unwrap());
        prop_assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn operators_stay_in_unit_range(img in colour_image(), op in operator()) {
        if let Ok(out) = op.apply(&img) {
            prop_assert!(out.in_unit_range());
            prop_assert_eq!((out.width(), out.height(), out.channels()), (img.width(), img.height(), 3));
        } else {
            // only CLAHE can refuse, and only for images smaller than its grid
            prop_assert!(matches!(op, OperatorSpec::Clahe(_)));
        }
    }

    #[test]
    fn single_stage_cascade_is_the_operator(img in colour_image(), op in operator()) {
        prop_assert_eq!(cascade(&img, std::slice::from_ref(&op)).ok(), op.apply(&img).ok());
    }

    #[test]
    fn pwl_is_monotone_and_exact_at_points(map in pwl_map(), a in 0.0..=1.0f64, b in 0.0..=1.0f64) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(map.eval(lo) <= map.eval(hi));
        for &[x, y] in map.points() {
            prop_assert_eq!(map.eval(x), y);
        }
    }

    #[test]
    fn full_range_stretch_hits_zero_and_one(img in image(10, 3)) {
        let out = stretch(&img, &StretchParams { p_low_frac: 0.0, p_high_frac: 1.0, per_channel: true }).unwrap();
        for (c, plane) in out.image.planes().enumerate() {
            if out.degenerate.contains(&c) {
                prop_assert_eq!(plane, img.plane(c));
                continue;
            }
            let min = plane.iter().copied().fold(f64::INFINITY, f64::min);
            let max = plane.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            prop_assert_eq!((min, max), (0.0, 1.0));
        }
    }

    #[test]
    fn gray_world_alignment_equalizes_means(img in colour_image()) {
        let aligned = gray_world_align(&img).unwrap();
        let means: Vec<f64> = aligned.planes().map(|p| p.iter().sum::<f64>() / p.len() as f64).collect();
        prop_assert!((means[0] - means[1]).abs() < 1e-12 && (means[1] - means[2]).abs() < 1e-12);
        let out = goc(&img, &GocParams::goc2()).unwrap();
        prop_assert!(!out.passthrough && out.image.in_unit_range());
    }

    #[test]
    fn single_tile_clahe_commutes_with_permutation(img in image(10, 1), seed in any::<u64>()) {
        let p = ClaheParams { tiles_x: 1, tiles_y: 1, ..ClaheParams::default() };
        let n = img.pixel_count();
        // a fixed-point-free rotation of the flat pixel order
        let k = (seed as usize % (n - 1)) + 1;
        let permuted = img.with_samples((0..n).map(|i| img.samples()[(i + k) % n]).collect()).unwrap();
        let (a, b) = (clahe(&img, &p).unwrap(), clahe(&permuted, &p).unwrap());
        for i in 0..n {
            prop_assert_eq!(b.samples()[i], a.samples()[(i + k) % n]);
        }
    }

    #[test]
    fn rgb_to_xyz_is_linear(p in colour_image(), alpha in -2.0..2.0f64, beta in -2.0..2.0f64) {
        let q = p.map(|v| 1.0 - v * v);
        let combo = p.with_samples(p.samples().iter().zip(q.samples()).map(|(a, b)| alpha * a + beta * b).collect()).unwrap();
        let (fp, fq, fc) = (rgb_to_xyz(&p).unwrap(), rgb_to_xyz(&q).unwrap(), rgb_to_xyz(&combo).unwrap());
        for i in 0..fc.samples().len() {
            let want = alpha * fp.samples()[i] + beta * fq.samples()[i];
            prop_assert!((fc.samples()[i] - want).abs() < 1e-12);
        }
    }

    #[test]
    fn pde_step_stays_in_range(img in image(12, 3), cfg in stable_config()) {
        match pde_step(&img, &cfg) {
            Ok(out) => prop_assert!(out.is_finite() && out.in_unit_range()),
            Err(uwpde::Error::StabilityBudgetExceeded(_)) | Err(uwpde::Error::ImageTooSmallForTiling { .. }) => {}
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }
}
