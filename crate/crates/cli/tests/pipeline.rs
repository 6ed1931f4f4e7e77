use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use specmel_core::dataset::{parse_manifest, GenreTable};

fn specmel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_specmel")).args(args).output().expect("run specmel")
}

fn ok(args: &[&str]) -> String {
    let out = specmel(args);
    assert!(
        out.status.success(),
        "specmel {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn corpus(dir: &Path, size: &str, genres: &str) -> std::path::PathBuf {
    let out = dir.join("corpus");
    ok(&["synth-corpus", "--out", s(&out), "--size", size, "--genres", genres, "--seed", "11"]);
    out.join("experiment.conf")
}

fn log_statuses(log: &str) -> Vec<String> {
    log.lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split('\t').nth(1).unwrap().to_string())
        .collect()
}

#[test]
fn extract_writes_both_kinds_and_is_idempotent() {
    let tmp = tempfile::tempdir().unwrap();
    let conf = corpus(tmp.path(), "3", "2");
    ok(&["extract", "--config", s(&conf)]);
    let spg = tmp.path().join("corpus/results/spectrograms");
    assert_eq!(fs::read_dir(&spg).unwrap().count(), 6);
    let log_path = tmp.path().join("corpus/results/extract.log");
    let first = fs::read_to_string(&log_path).unwrap();
    assert!(first.starts_with("# config_hash = "));
    assert_eq!(log_statuses(&first), ["extracted"; 3]);

    let stdout = ok(&["extract", "--config", s(&conf)]);
    assert!(stdout.contains("0 extracted, 3 skipped"));
    let second = fs::read_to_string(&log_path).unwrap();
    assert_eq!(log_statuses(&second), ["skipped"; 3]);
    // same checksums either way
    let sums = |log: &str| -> Vec<String> {
        log.lines().filter(|l| !l.starts_with('#')).map(|l| l.split('\t').skip(2).collect()).collect()
    };
    assert_eq!(sums(&first), sums(&second));

    ok(&["extract", "--config", s(&conf), "--force"]);
    assert_eq!(log_statuses(&fs::read_to_string(&log_path).unwrap()), ["extracted"; 3]);
}

#[test]
fn corrupt_audio_is_isolated_then_fatal_past_half() {
    let tmp = tempfile::tempdir().unwrap();
    let conf = corpus(tmp.path(), "3", "2");
    let audio = tmp.path().join("corpus/audio");
    fs::write(audio.join("syn00001.wav"), b"RIFF\x10\x00\x00\x00WAVEjunk").unwrap();
    ok(&["extract", "--config", s(&conf)]);
    let log = fs::read_to_string(tmp.path().join("corpus/results/extract.log")).unwrap();
    assert_eq!(log_statuses(&log), ["extracted", "failed", "extracted"]);

    fs::write(audio.join("syn00002.wav"), b"not a wav at all").unwrap();
    let out = specmel(&["extract", "--config", s(&conf), "--force"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn synthetic_corpus_is_reproducible_and_well_formed() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for d in [&a, &b] {
        ok(&["synth-corpus", "--out", s(d), "--size", "160", "--seed", "3"]);
    }
    for f in ["manifest.csv", "genres.csv", "audio/syn00000.wav", "audio/syn00159.wav"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
    let table = GenreTable::load(a.join("genres.csv")).unwrap();
    let manifest = fs::read_to_string(a.join("manifest.csv")).unwrap();
    let load = parse_manifest(&manifest, &table).unwrap();
    assert_eq!(load.tracks.len(), 160);
    assert!(load.tracks.iter().all(|t| (1..=3).contains(&t.subgenres.len())));
    let counts = load.labels.column_counts();
    assert_eq!(*counts.iter().max().unwrap(), 50);
    assert_eq!(*counts.iter().min().unwrap(), 3);

    let other = tmp.path().join("c");
    ok(&["synth-corpus", "--out", s(&other), "--size", "160", "--seed", "4"]);
    assert_ne!(fs::read(a.join("audio/syn00000.wav")).unwrap(), fs::read(other.join("audio/syn00000.wav")).unwrap());
}

#[test]
fn staged_pipeline_contracts() {
    let tmp = tempfile::tempdir().unwrap();
    let conf = corpus(tmp.path(), "60", "3");
    let c = s(&conf);
    let fast = ["--set", "variants=b32", "--set", "epochs=30"];
    let run = |stage: &str, extra: &[&str]| {
        let mut args = vec![stage, "--config", c];
        args.extend_from_slice(&fast);
        args.extend_from_slice(extra);
        ok(&args)
    };
    let results = tmp.path().join("corpus/results");

    // training before a split is a validation error
    let mut early = vec!["train", "--config", c];
    early.extend_from_slice(&fast);
    assert_eq!(specmel(&early).status.code(), Some(1));

    run("extract", &[]);
    let split_out = run("split", &[]);
    assert!(split_out.contains("disjoint: yes"));
    let plan = fs::read(results.join("split.txt")).unwrap();
    run("split", &[]);
    assert_eq!(plan, fs::read(results.join("split.txt")).unwrap());

    let trained = run("train", &[]);
    assert!(trained.contains("6 cells trained"), "{trained}");
    let models = results.join("models/b32");
    let params = fs::read(models.join("mel/hip-hop.params")).unwrap();
    assert!(String::from_utf8_lossy(&params).contains("# config_hash = "));
    assert!(run("train", &[]).contains("0 cells trained, 6 already present"));
    fs::remove_file(models.join("linear/jazz.params")).unwrap();
    assert!(run("train", &[]).contains("1 cells trained"));
    run("train", &["--force"]);
    assert_eq!(params, fs::read(models.join("mel/hip-hop.params")).unwrap());
    let loss = fs::read_to_string(models.join("mel/hip-hop.loss")).unwrap();
    assert_eq!(loss.lines().filter(|l| !l.starts_with('#')).count(), 31);

    run("evaluate", &[]);
    let metrics = fs::read_to_string(results.join("eval/metrics.csv")).unwrap();
    assert_eq!(metrics.lines().filter(|l| !l.starts_with('#')).count(), 7);
    assert!(results.join("eval/macro.csv").exists() && results.join("eval/genres.csv").exists());

    // Three cells; model pairing gives a single pair. Compare loss because
    // every cell may reach F1 = 1 on so small a corpus.
    run("compare", &["--set", "compare_metric=loss"]);
    let doc = fs::read_to_string(results.join("compare/result.txt")).unwrap();
    assert!(doc.contains("pairing = cell") && doc.contains("metric = loss") && doc.contains("n = 3\n"));
    let mut model = vec!["compare", "--config", c, "--pairing", "model", "--set", "compare_metric=loss"];
    model.extend_from_slice(&fast);
    assert_eq!(specmel(&model).status.code(), Some(1));

    let report = run("report", &[]);
    assert!(report.contains("macro scores per model"));

    run("render", &["--track", "syn00000", "--kind", "linear"]);
    let img = fs::read(results.join("render/syn00000.linear.ppm")).unwrap();
    assert!(img.starts_with(b"P6\n44 1025\n255\n"));
    run("render", &["--track", "syn00000", "--kind", "linear"]);
    assert_eq!(img, fs::read(results.join("render/syn00000.linear.ppm")).unwrap());
    let mut missing = vec!["render", "--config", c, "--track", "nope"];
    missing.extend_from_slice(&fast);
    assert_eq!(specmel(&missing).status.code(), Some(1));

    // divergence names the failing cell and is a runtime failure
    let out = specmel(&[
        "train", "--config", c, "--force", "--kind", "mel", "--set", "variants=b32", "--set", "learning_rate=1e308",
        "--set", "l2=1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("b32/mel/") && err.contains("diverged"), "{err}");
}

#[test]
fn command_line_overrides_config_file() {
    let tmp = tempfile::tempdir().unwrap();
    let conf = tmp.path().join("x.conf");
    fs::write(&conf, "seed = 5\nsplit_fraction = 0.2\n").unwrap();
    let cli = |extra: &[&str]| {
        let mut args = vec!["specmel", "split", "--config", s(&conf)];
        args.extend_from_slice(extra);
        let parsed = <specmel_cli::Cli as clap::Parser>::try_parse_from(args).unwrap();
        parsed.experiment_config().unwrap()
    };
    let from_file = cli(&[]);
    assert_eq!((from_file.seed, from_file.split_fraction), (5, 0.2));
    let overridden = cli(&["--seed", "9", "--set", "split_fraction=0.3"]);
    assert_eq!((overridden.seed, overridden.split_fraction), (9, 0.3));
    assert_eq!(from_file.manifest, None);
}

#[test]
fn validation_errors_exit_with_one() {
    assert_eq!(specmel(&["split", "--set", "nonsense=1"]).status.code(), Some(1));
    assert_eq!(specmel(&["split", "--set", "manifest=/does/not/exist.csv"]).status.code(), Some(1));
    assert_eq!(specmel(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(specmel(&["--help"]).status.code(), Some(0));
}
