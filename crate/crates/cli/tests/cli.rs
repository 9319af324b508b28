use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use uwpde::corpus::{bundled_with_dim, synthetic_cast};
use uwpde::image::{load_image, save_image};
use uwpde::pipeline::PipelineSpec;
use uwpde::{BitDepth, Image};
use uwpde_cli::{
    cmd_analyze, cmd_compare, cmd_enhance, cmd_presets, cmd_seed_corpus, CliError, CompareRequest,
    PipelineSource, RunManifest, BATCH_REPORT, COMPARE_CSV, MONTAGE_SEPARATOR,
};

const FAST: &str = "pde-clahe-hs";

fn write(dir: &Path, name: &str, img: &Image) -> PathBuf {
    let path = dir.join(name);
    save_image(img, &path, BitDepth::Eight).unwrap();
    path
}

fn corpus_inputs(dir: &Path, n: usize) -> Vec<PathBuf> {
    bundled_with_dim(24)
        .iter()
        .take(n)
        .map(|c| write(dir, &format!("{}.png", c.name), &c.image))
        .collect()
}

fn read_rows(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut rdr = csv::Reader::from_path(path).unwrap();
    let header = rdr.headers().unwrap().iter().map(str::to_string).collect();
    let rows = rdr
        .records()
        .map(|r| r.unwrap().iter().map(str::to_string).collect())
        .collect();
    (header, rows)
}

fn manifest(inputs: Vec<PathBuf>, out: &Path, pipeline: &str) -> RunManifest {
    RunManifest {
        jobs: Some(1),
        ..RunManifest::new(inputs, out, PipelineSource::Named(pipeline.into()))
    }
}

#[test]
fn enhance_batch_writes_one_output_per_image() {
    let dir = tempfile::tempdir().unwrap();
    let inputs = corpus_inputs(dir.path(), 3);
    let before: Vec<Vec<u8>> = inputs.iter().map(|p| fs::read(p).unwrap()).collect();
    let out = dir.path().join("out");
    let summary = cmd_enhance(&manifest(inputs.clone(), &out, FAST)).unwrap();
    assert!(summary.success());
    assert_eq!(summary.outcomes.len(), 3);
    for (input, bytes) in inputs.iter().zip(&before) {
        let stem = input.file_stem().unwrap().to_string_lossy();
        let result: Image = load_image(out.join(format!("{stem}.{FAST}.png"))).unwrap();
        assert_eq!(result.width(), 24);
        assert!(out.join(format!("{stem}.{FAST}.report.csv")).exists());
        assert!(out.join(format!("{stem}.{FAST}.trace.csv")).exists());
        assert_eq!(&fs::read(input).unwrap(), bytes, "input modified");
    }
    let (header, rows) = read_rows(&out.join(BATCH_REPORT));
    assert_eq!(&header[..4], ["input", "output", "status", "error"]);
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r[2] == "ok" && r[3].is_empty()));
}

#[test]
fn enhance_continues_past_a_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    let mut inputs = corpus_inputs(dir.path(), 2);
    let bad = dir.path().join("broken.png");
    fs::write(&bad, b"not an image").unwrap();
    inputs.push(bad.clone());
    let out = dir.path().join("out");
    let summary = cmd_enhance(&manifest(inputs, &out, FAST)).unwrap();
    assert!(!summary.success());
    let failed: Vec<_> = summary.failures().map(|(p, _)| p.to_path_buf()).collect();
    assert_eq!(failed, vec![bad]);
    let (_, rows) = read_rows(&out.join(BATCH_REPORT));
    assert_eq!(rows.iter().filter(|r| r[2] == "ok").count(), 2);
    assert_eq!(rows.iter().filter(|r| r[2] == "failed").count(), 1);
}

#[test]
fn enhance_rejects_bad_manifests_before_writing() {
    let dir = tempfile::tempdir().unwrap();
    let inputs = corpus_inputs(dir.path(), 1);
    let out = dir.path().join("out");

    let unknown = cmd_enhance(&manifest(inputs.clone(), &out, "pde-nope"));
    assert!(matches!(unknown, Err(CliError::Core(_))));
    let twice = cmd_enhance(&manifest(
        vec![inputs[0].clone(), inputs[0].clone()],
        &out,
        FAST,
    ));
    assert!(matches!(twice, Err(CliError::Usage(_))));
    let empty = cmd_enhance(&manifest(Vec::new(), &out, FAST));
    assert!(matches!(empty, Err(CliError::Usage(_))));

    let mut bad_key = manifest(inputs.clone(), &out, FAST);
    bad_key.overrides = vec!["pde.nonsense=1".into()];
    assert!(cmd_enhance(&bad_key).is_err());
    let mut unstable = manifest(inputs.clone(), &out, FAST);
    unstable.overrides = vec!["pde.lambda_diff=100".into()];
    assert!(cmd_enhance(&unstable).is_err());
    let mut malformed = manifest(inputs, &out, FAST);
    malformed.overrides = vec!["pde.dt".into()];
    assert!(matches!(cmd_enhance(&malformed), Err(CliError::Usage(_))));

    assert!(!out.exists());
}

#[test]
fn enhance_applies_overrides_and_configs() {
    let dir = tempfile::tempdir().unwrap();
    let inputs = corpus_inputs(dir.path(), 1);
    let stem = inputs[0]
        .file_stem()
        .unwrap()
        .to_string_lossy()
        .into_owned();

    let mut tuned = manifest(inputs.clone(), &dir.path().join("a"), FAST);
    tuned.overrides = vec!["pde.max_iters=2".into(), "pde.tol=0".into()];
    cmd_enhance(&tuned).unwrap();
    let trace = fs::read_to_string(dir.path().join(format!("a/{stem}.{FAST}.trace.csv"))).unwrap();
    assert_eq!(trace.lines().count(), 3);

    let config = dir.path().join("mine.toml");
    let spec = PipelineSpec::from_toml(&cmd_presets(Some(FAST)).unwrap()).unwrap();
    fs::write(
        &config,
        PipelineSpec {
            name: "mine".into(),
            ..spec
        }
        .to_toml()
        .unwrap(),
    )
    .unwrap();
    let from_file = RunManifest {
        jobs: Some(1),
        ..RunManifest::new(
            inputs.clone(),
            dir.path().join("b"),
            PipelineSource::Config(config),
        )
    };
    let summary = cmd_enhance(&from_file).unwrap();
    assert_eq!(summary.pipeline, "mine");
    let named: Image = load_image(dir.path().join(format!("b/{stem}.mine.png"))).unwrap();
    cmd_enhance(&manifest(inputs, &dir.path().join("c"), FAST)).unwrap();
    let direct: Image = load_image(dir.path().join(format!("c/{stem}.{FAST}.png"))).unwrap();
    assert_eq!(named, direct);
}

#[test]
fn sixteen_bit_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let inputs = corpus_inputs(dir.path(), 1);
    let mut m = manifest(inputs.clone(), &dir.path().join("out"), FAST);
    m.bit_depth = BitDepth::Sixteen;
    m.write_reports = false;
    let summary = cmd_enhance(&m).unwrap();
    let (path, _) = summary.outcomes[0].result.as_ref().unwrap();
    // IHDR bit depth sits right after the signature, chunk header, width and height
    assert_eq!(fs::read(path).unwrap()[24], 16);
    assert!(!dir.path().join("out").read_dir().unwrap().any(|e| {
        e.unwrap()
            .file_name()
            .to_string_lossy()
            .ends_with(".trace.csv")
    }));
}

#[test]
fn analyze_reports_cast_and_histograms() {
    let dir = tempfile::tempdir().unwrap();
    let gray = Image::from_fn(16, 16, 3, |x, y, _| (x * 16 + y) as f64 / 255.0).unwrap();
    let gray_path = write(dir.path(), "gray.png", &gray);
    let summary = cmd_analyze(&gray_path, &dir.path().join("gray.hist.csv")).unwrap();
    assert_eq!(summary.cast_score, 0.0);
    assert!(summary.plot.exists());
    let (header, rows) = read_rows(&summary.histogram_csv);
    assert_eq!(header, ["bin", "red", "green", "blue"]);
    assert_eq!(rows.len(), 256);
    assert!(rows.iter().all(|r| r[1] == r[2] && r[2] == r[3]));

    let cast_path = write(
        dir.path(),
        "cast.png",
        &synthetic_cast(32, 0.2).map(|v| (v * 255.0).round() / 255.0),
    );
    let summary = cmd_analyze(&cast_path, &dir.path().join("nested/cast.csv")).unwrap();
    assert!(summary.cast_score > 0.15);
    assert!(summary.describe().contains("colour cast"));
    let (_, rows) = read_rows(&summary.histogram_csv);
    let mean_bin = |col: usize| {
        let (mut num, mut den) = (0.0, 0.0);
        for r in &rows {
            let count: f64 = r[col].parse().unwrap();
            num += count * r[0].parse::<f64>().unwrap();
            den += count;
        }
        num / den
    };
    assert!(mean_bin(3) > mean_bin(1));

    let mono = write(
        dir.path(),
        "mono.pgm",
        &Image::filled(8, 8, 1, 0.5).unwrap(),
    );
    assert!(cmd_analyze(&mono, &dir.path().join("mono.csv")).is_err());
}

#[test]
fn compare_builds_matrix_and_montage() {
    let dir = tempfile::tempdir().unwrap();
    let inputs = corpus_inputs(dir.path(), 1);
    let out = dir.path().join("cmp");
    let req = CompareRequest {
        inputs: inputs.clone(),
        pipelines: vec![FAST.into(), "pde-goc2-clahe".into()],
        out_dir: out.clone(),
        jobs: Some(1),
    };
    let summary = cmd_compare(&req).unwrap();
    assert!(summary.success());
    assert_eq!(summary.csv, out.join(COMPARE_CSV));
    let (header, rows) = read_rows(&summary.csv);
    assert_eq!(header.first().map(String::as_str), Some("image"));
    assert_eq!(header.last().map(String::as_str), Some("reason"));
    let pipelines: Vec<&str> = rows.iter().map(|r| r[1].as_str()).collect();
    assert_eq!(pipelines, ["original", FAST, "pde-goc2-clahe"]);
    assert_eq!(summary.montages.len(), 1);
    let m: Image = load_image(&summary.montages[0]).unwrap();
    assert_eq!(m.width(), 3 * 24 + 2 * MONTAGE_SEPARATOR);
    assert!(m.height() > 24);

    let none = CompareRequest {
        pipelines: Vec::new(),
        ..req.clone()
    };
    assert!(matches!(cmd_compare(&none), Err(CliError::Usage(_))));
    let unknown = CompareRequest {
        pipelines: vec!["nope".into()],
        ..req
    };
    assert!(cmd_compare(&unknown).is_err());
}

#[test]
fn presets_list_and_dump_round_trip() {
    let list = cmd_presets(None).unwrap();
    let names: Vec<&str> = list.lines().collect();
    assert!(names.contains(&"pa-1") && names.contains(&"pa-2") && names.contains(&"pde-pwl-clahe"));
    for name in names {
        let text = cmd_presets(Some(name)).unwrap();
        let spec = PipelineSpec::from_toml(&text).unwrap();
        assert_eq!(spec.name, name);
        assert_eq!(spec.to_toml().unwrap(), text);
    }
    assert!(cmd_presets(Some("nope")).is_err());
}

#[test]
fn seed_corpus_writes_every_image() {
    let dir = tempfile::tempdir().unwrap();
    let paths = cmd_seed_corpus(dir.path()).unwrap();
    assert_eq!(paths.len(), uwpde::corpus::CORPUS_SIZE);
    let first: Image = load_image(&paths[0]).unwrap();
    assert_eq!(first, uwpde::corpus::bundled()[0].image);
    assert!(paths[0]
        .file_name()
        .unwrap()
        .to_string_lossy()
        .starts_with("00-"));
}

#[test]
fn binary_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let inputs = corpus_inputs(dir.path(), 1);
    let bin = env!("CARGO_BIN_EXE_uwpde");
    let run = |args: &[&str]| Command::new(bin).args(args).output().unwrap();

    let listed = run(&["presets"]);
    assert!(listed.status.success());
    assert!(String::from_utf8_lossy(&listed.stdout).contains("pa-1"));

    let out = dir.path().join("out");
    let ok = run(&[
        "--jobs",
        "1",
        "--out",
        out.to_str().unwrap(),
        "enhance",
        "--pipeline",
        FAST,
        inputs[0].to_str().unwrap(),
    ]);
    assert_eq!(
        ok.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&ok.stderr)
    );

    let missing = dir.path().join("missing.png");
    let partial = run(&[
        "--out",
        out.to_str().unwrap(),
        "enhance",
        "--pipeline",
        FAST,
        inputs[0].to_str().unwrap(),
        missing.to_str().unwrap(),
    ]);
    assert_eq!(partial.status.code(), Some(1));

    let unknown = run(&[
        "--out",
        out.to_str().unwrap(),
        "enhance",
        "--pipeline",
        "nope",
        inputs[0].to_str().unwrap(),
    ]);
    assert_eq!(unknown.status.code(), Some(2));
}
