use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::OnceLock;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_handgeom"))
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).output().expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> Output {
    let o = run_in(dir, args);
    assert!(
        o.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    o
}

fn read(path: impl AsRef<Path>) -> String {
    std::fs::read_to_string(path.as_ref()).unwrap_or_else(|e| panic!("{}: {e}", path.as_ref().display()))
}

fn manifest_value(path: impl AsRef<Path>, key: &str) -> String {
    read(path)
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{key}=")).map(str::to_string))
        .unwrap_or_else(|| panic!("no {key}"))
}

/// The documented walk-through, run once and shared.
fn cohort() -> &'static Path {
    static DIR: OnceLock<PathBuf> = OnceLock::new();
    DIR.get_or_init(|| {
        let d = tempfile::tempdir().unwrap().keep();
        ok(&d, &["synth", "--subjects", "20", "--seed", "7", "--out", "synth"]);
        ok(&d, &["preprocess", "--input", "synth", "--out", "pre"]);
        ok(&d, &["extract", "--input", "pre", "--out", "feat"]);
        d
    })
}

#[test]
fn twenty_subjects_give_300_feature_rows() {
    let d = cohort();
    let csv = read(d.join("feat/features.csv"));
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("subject,sample,hand,finger,a1,"));
    assert_eq!(lines.count(), 20 * 3 * 5);
    assert_eq!(read(d.join("synth/scans.csv")).lines().count(), 61);
    assert_eq!(read(d.join("synth/truth/features.csv")).lines().count(), 1 + 20 * 5);
    assert_eq!(manifest_value(d.join("feat/manifest.txt"), "result.subjects_in"), "20");
    assert_eq!(
        manifest_value(d.join("feat/manifest.txt"), "result.subjects_rejected"),
        "0"
    );
}

#[test]
fn separable_cohort_verifies_with_zero_eer() {
    let d = cohort();
    ok(d, &["select", "--input", "feat/features.csv", "--out", "sel"]);
    ok(
        d,
        &[
            "verify",
            "--input",
            "feat/features.csv",
            "--out",
            "ver",
            "--population",
            "20",
            "--subset",
            "b_opt",
            "--selection",
            "sel/subsets.txt",
        ],
    );
    assert!(read(d.join("ver/eer.txt")).starts_with("EER=0.0000 at t="));
    let curve = read(d.join("ver/verification.csv"));
    assert_eq!(curve.lines().next().unwrap(), "threshold,far,frr");
    assert_eq!(curve.lines().count(), 501);
    assert_eq!(
        manifest_value(d.join("ver/manifest.txt"), "result.genuine_comparisons"),
        "40"
    );
    assert_eq!(
        manifest_value(d.join("ver/manifest.txt"), "result.imposter_comparisons"),
        "760"
    );

    ok(
        d,
        &[
            "identify",
            "--input",
            "feat/features.csv",
            "--out",
            "id",
            "--subset",
            "b_opt",
            "--selection",
            "sel/subsets.txt",
        ],
    );
    assert!(read(d.join("id/identification.txt")).contains("mean accuracy: 1.0000"));
    assert!(read(d.join("id/identification.csv")).starts_with("fingers,rotation,accuracy\n"));

    ok(d, &["report", "--input", "sel,id,ver", "--out", "rep"]);
    let summary = read(d.join("rep/summary.txt"));
    assert!(summary.contains("== ver (verify)"));
    assert!(summary.contains("EER=0.0000"));
}

#[test]
fn stage_dumps_are_pbm_images() {
    let d = tempfile::tempdir().unwrap();
    ok(
        d.path(),
        &[
            "synth",
            "--subjects",
            "2",
            "--samples",
            "1",
            "--out",
            "s",
            "--truth-masks",
        ],
    );
    ok(d.path(), &["preprocess", "--input", "s", "--out", "p", "--dump-stages"]);
    let stages = d.path().join("p/stages/s0000_1");
    for name in ["binary", "contour", "lsfp", "rsfp", "nlp", "nrp"] {
        assert!(std::fs::read(stages.join(format!("{name}.pbm")))
            .unwrap()
            .starts_with(b"P4"));
    }
    assert!(d.path().join("s/truth/masks/s0001_1_little.pbm").exists());
    assert!(d.path().join("p/fingers/s0001_1/thumb_boundary.txt").exists());
}

#[test]
fn rejected_scans_are_listed_and_counted() {
    let d = tempfile::tempdir().unwrap();
    ok(
        d.path(),
        &[
            "synth",
            "--subjects",
            "3",
            "--out",
            "s",
            "--artifact",
            "crop-little",
            "--artifact-subjects",
            "1",
        ],
    );
    ok(d.path(), &["preprocess", "--input", "s", "--out", "p"]);
    let m = d.path().join("p/manifest.txt");
    assert_eq!(manifest_value(&m, "result.subjects_in"), "3");
    assert_eq!(manifest_value(&m, "result.subjects_processed"), "2");
    assert_eq!(manifest_value(&m, "result.subjects_rejected"), "1");
    assert_eq!(manifest_value(&m, "result.images_rejected"), "3");
    ok(d.path(), &["extract", "--input", "p", "--out", "f"]);
    let rej = read(d.path().join("f/rejections.csv"));
    assert_eq!(rej.lines().count(), 4);
    assert!(rej.lines().skip(1).all(|l| l.starts_with("s0001,")));
    assert_eq!(read(d.path().join("f/features.csv")).lines().count(), 1 + 2 * 3 * 5);
}

#[test]
fn exit_codes() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(run_in(d.path(), &["synth"]).status.code(), Some(2));
    assert_eq!(
        run_in(d.path(), &["synth", "--out", "x", "--bogus", "1"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run_in(d.path(), &["synth", "--out", "x", "--subjects", "1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run_in(d.path(), &["preprocess", "--input", "missing", "--out", "p"])
            .status
            .code(),
        Some(4)
    );
    assert_eq!(
        run_in(d.path(), &["synth", "--out", "x", "--config", "nope.txt"])
            .status
            .code(),
        Some(4)
    );

    ok(
        d.path(),
        &[
            "synth",
            "--subjects",
            "2",
            "--samples",
            "1",
            "--out",
            "s",
            "--artifact",
            "crop-little",
        ],
    );
    let o = run_in(d.path(), &["preprocess", "--input", "s", "--out", "p"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("correct_lsfp"));
    assert_eq!(
        manifest_value(d.path().join("p/manifest.txt"), "result.subjects_rejected"),
        "2"
    );
}

#[test]
fn config_file_fills_in_and_flags_win() {
    let d = tempfile::tempdir().unwrap();
    std::fs::write(
        d.path().join("run.cfg"),
        "# cohort\nsubjects = 2\nsamples=1\nseed=5\nout=a\ndelta=0.02\n",
    )
    .unwrap();
    ok(d.path(), &["synth", "--config", "run.cfg"]);
    assert_eq!(manifest_value(d.path().join("a/manifest.txt"), "subjects"), "2");
    assert_eq!(manifest_value(d.path().join("a/manifest.txt"), "seed"), "5");
    ok(d.path(), &["synth", "--config", "run.cfg", "--seed", "6", "--out", "b"]);
    assert_eq!(manifest_value(d.path().join("b/manifest.txt"), "seed"), "6");
    assert_ne!(
        std::fs::read(d.path().join("a/images/s0000_1.pgm")).unwrap(),
        std::fs::read(d.path().join("b/images/s0000_1.pgm")).unwrap()
    );

    std::fs::write(d.path().join("bad.cfg"), "subjectz=2\n").unwrap();
    assert_eq!(
        run_in(d.path(), &["synth", "--out", "c", "--config", "bad.cfg"])
            .status
            .code(),
        Some(2)
    );
    std::fs::write(d.path().join("wrong.cfg"), "command=verify\n").unwrap();
    assert_eq!(
        run_in(d.path(), &["synth", "--out", "c", "--config", "wrong.cfg"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn manifest_replays_a_run_byte_for_byte() {
    let d = tempfile::tempdir().unwrap();
    ok(
        d.path(),
        &[
            "--jobs",
            "1",
            "synth",
            "--subjects",
            "2",
            "--samples",
            "2",
            "--seed",
            "3",
            "--out",
            "s",
        ],
    );
    let first = std::fs::read(d.path().join("s/images/s0001_2.pgm")).unwrap();
    let manifest = read(d.path().join("s/manifest.txt"));
    std::fs::remove_dir_all(d.path().join("s")).unwrap();
    std::fs::write(d.path().join("m.txt"), &manifest).unwrap();
    ok(d.path(), &["--jobs", "4", "synth", "--config", "m.txt"]);
    assert_eq!(std::fs::read(d.path().join("s/images/s0001_2.pgm")).unwrap(), first);
    assert_eq!(read(d.path().join("s/manifest.txt")), manifest);
}
