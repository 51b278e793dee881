pub mod extract;
pub mod identify;
pub mod preprocess;
pub mod report;
pub mod select;
pub mod synth;
pub mod verify;

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use anyhow::Context;

use handgeom::batch::Rejection;
use handgeom::classify::LabeledDataset;
use handgeom::features::{read_features, HandFeatureVector};

use crate::config::read_pairs;
use crate::manifest::Manifest;
use crate::{StageFailure, UsageError};

pub fn create_dir(dir: &Path) -> anyhow::Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

pub fn write_text(path: &Path, text: &str) -> anyhow::Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn read_text(path: &Path) -> anyhow::Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

pub fn csv_reader(path: &Path) -> anyhow::Result<csv::Reader<File>> {
    csv::Reader::from_path(path).with_context(|| format!("reading {}", path.display()))
}

pub fn csv_writer(path: &Path) -> anyhow::Result<csv::Writer<BufWriter<File>>> {
    let f = File::create(path).with_context(|| format!("writing {}", path.display()))?;
    Ok(csv::Writer::from_writer(BufWriter::new(f)))
}

/// Runs `f` on a pool of `jobs` workers (0 = one per core).
pub fn with_jobs<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> anyhow::Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .context("starting worker pool")?;
    Ok(pool.install(f))
}

pub fn stage_name(r: &Rejection) -> &'static str {
    r.stage.map_or("none", |s| s.as_str())
}

pub fn write_rejections(path: &Path, rejections: &[Rejection]) -> anyhow::Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["subject", "sample", "stage", "reason"])?;
    for r in rejections {
        w.write_record([r.subject.as_str(), r.sample.as_str(), stage_name(r), r.reason.as_str()])?;
    }
    w.flush()?;
    Ok(())
}

/// Subject and image accounting, plus rejections per stage, in stage order
/// of first appearance.
pub fn record_rejections(m: &mut Manifest, subjects_in: usize, images_in: usize, rejections: &[Rejection]) {
    let mut subjects: Vec<&str> = rejections.iter().map(|r| r.subject.as_str()).collect();
    subjects.sort_unstable();
    subjects.dedup();
    m.result("subjects_in", subjects_in)
        .result("subjects_processed", subjects_in - subjects.len())
        .result("subjects_rejected", subjects.len())
        .result("images_in", images_in)
        .result("images_rejected", rejections.len());
    let mut stages: Vec<(&str, usize)> = Vec::new();
    for r in rejections {
        match stages.iter_mut().find(|(s, _)| *s == stage_name(r)) {
            Some(e) => e.1 += 1,
            None => stages.push((stage_name(r), 1)),
        }
    }
    for (s, n) in stages {
        m.result(&format!("rejected.{s}"), n);
    }
}

/// Fails when nothing survived, naming the first rejection.
pub fn ensure_survivors(processed: usize, rejections: &[Rejection]) -> anyhow::Result<()> {
    if processed == 0 {
        let why = rejections.first().map_or("no input".to_string(), |r| {
            format!(
                "{}: {} (subject {} sample {})",
                stage_name(r),
                r.reason,
                r.subject,
                r.sample
            )
        });
        return Err(StageFailure(format!("every subject was rejected; first: {why}")).into());
    }
    Ok(())
}

pub fn load_hands(path: &Path) -> anyhow::Result<Vec<HandFeatureVector>> {
    let f = File::open(path).with_context(|| format!("reading {}", path.display()))?;
    read_features(std::io::BufReader::new(f)).with_context(|| format!("parsing {}", path.display()))
}

/// Resolves `all`, a named subset from a selection file, or a list of
/// feature names to ordinals.
pub fn resolve_subset(data: &LabeledDataset, subset: &str, selection: Option<&Path>) -> anyhow::Result<Vec<usize>> {
    if subset == "all" {
        return Ok((0..data.width()).collect());
    }
    let list = if matches!(subset, "b_sel" | "b_opt" | "b_opt_delta") {
        let path = selection.ok_or_else(|| UsageError(format!("--subset {subset} needs --selection")))?;
        let text = read_text(path)?;
        let pairs = read_pairs(&text, &path.display().to_string()).map_err(|e| UsageError(e.to_string()))?;
        pairs
            .into_iter()
            .find(|(_, k, _)| k == subset)
            .map(|(_, _, v)| v)
            .ok_or_else(|| UsageError(format!("{} has no `{subset}` line", path.display())))?
    } else {
        subset.to_string()
    };
    let mut out = Vec::new();
    for name in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let f = data
            .names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| UsageError(format!("unknown feature `{name}`")))?;
        if !out.contains(&f) {
            out.push(f);
        }
    }
    if out.is_empty() {
        return Err(UsageError("empty feature subset".into()).into());
    }
    Ok(out)
}

pub fn feature_names(data: &LabeledDataset, features: &[usize]) -> String {
    features
        .iter()
        .map(|&f| data.names[f].as_str())
        .collect::<Vec<_>>()
        .join(",")
}
