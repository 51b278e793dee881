//! Parallel per-image processing with results in input order, so output never
//! depends on the worker count.

use rayon::prelude::*;

use crate::error::{Error, Result, Stage};
use crate::features::{extract_features, HandFeatureVector};
use crate::hand::Hand;
use crate::image::GrayImage;
use crate::profile::{extract_profiles, PipelineParams};
use crate::synth::{render_hand, Anatomy, Artifacts, CohortPlan, HandParams, PoseModel};

/// Runs `f` over `items` on `jobs` worker threads (0 = all cores) and returns
/// the results in input order.
pub fn map_ordered<I, T, F>(items: &[I], jobs: usize, f: F) -> Result<Vec<T>>
where
    I: Sync,
    T: Send,
    F: Fn(&I) -> T + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::invalid(format!("cannot start {jobs} workers: {e}")))?;
    Ok(pool.install(|| items.par_iter().map(&f).collect()))
}

/// A sample the pipeline refused.
#[derive(Debug, Clone, PartialEq)]
pub struct Rejection {
    pub subject: String,
    pub sample: String,
    pub stage: Option<Stage>,
    pub reason: String,
}

impl Rejection {
    pub fn new(subject: &str, sample: &str, err: &Error) -> Self {
        Rejection {
            subject: subject.to_string(),
            sample: sample.to_string(),
            stage: err.stage(),
            reason: err.root().to_string(),
        }
    }
}

/// Feature vectors of the accepted samples plus the rejections, both in input
/// order.
#[derive(Debug, Clone, Default)]
pub struct BatchResult {
    pub vectors: Vec<HandFeatureVector>,
    pub rejections: Vec<Rejection>,
    pub subjects_in: usize,
}

impl BatchResult {
    /// Drops every subject with a rejected sample, so that each remaining
    /// subject keeps its full set of samples.
    pub fn complete_subjects(&self) -> Vec<HandFeatureVector> {
        let bad: std::collections::HashSet<&str> = self.rejections.iter().map(|r| r.subject.as_str()).collect();
        self.vectors
            .iter()
            .filter(|v| !bad.contains(v.subject.as_str()))
            .cloned()
            .collect()
    }

    pub fn subjects_rejected(&self) -> usize {
        let mut s: Vec<&str> = self.rejections.iter().map(|r| r.subject.as_str()).collect();
        s.sort_unstable();
        s.dedup();
        s.len()
    }

    pub fn subjects_processed(&self) -> usize {
        self.subjects_in - self.subjects_rejected()
    }
}

/// One scan to process.
#[derive(Debug, Clone)]
pub struct ScanInput {
    pub subject: String,
    pub sample: String,
    pub hand: Hand,
    pub image: GrayImage,
}

pub fn extract_one(
    gray: &GrayImage,
    hand: Hand,
    subject: &str,
    sample: &str,
    params: &PipelineParams,
) -> Result<HandFeatureVector> {
    let set = extract_profiles(gray, hand, params)?;
    extract_features(&set, subject, sample)
}

fn collect(outcomes: Vec<(String, String, Result<HandFeatureVector>)>) -> BatchResult {
    let mut subjects: Vec<&str> = outcomes.iter().map(|o| o.0.as_str()).collect();
    subjects.sort_unstable();
    subjects.dedup();
    let subjects_in = subjects.len();
    let mut out = BatchResult {
        subjects_in,
        ..BatchResult::default()
    };
    for (subject, sample, r) in outcomes {
        match r {
            Ok(v) => out.vectors.push(v),
            Err(e) => out.rejections.push(Rejection::new(&subject, &sample, &e)),
        }
    }
    out
}

pub fn extract_batch(scans: &[ScanInput], params: &PipelineParams, jobs: usize) -> Result<BatchResult> {
    let outcomes = map_ordered(scans, jobs, |s| {
        (
            s.subject.clone(),
            s.sample.clone(),
            extract_one(&s.image, s.hand, &s.subject, &s.sample, params),
        )
    })?;
    Ok(collect(outcomes))
}

/// Renders and processes every sample of a cohort without keeping the images.
/// Subjects are named by index and samples are numbered from 1.
pub fn extract_cohort(plan: &CohortPlan, params: &PipelineParams, jobs: usize) -> Result<BatchResult> {
    let outcomes = map_ordered(&plan.samples, jobs, |spec| {
        let subject = spec.subject.to_string();
        let sample = (spec.sample + 1).to_string();
        let r = plan
            .render(spec)
            .and_then(|(img, truth)| extract_one(&img, truth.hand, &subject, &sample, params));
        (subject, sample, r)
    })?;
    Ok(collect(outcomes))
}

/// Features of a subject's anatomy rendered without pose jitter, sensor
/// noise, thumb perturbation or artifacts: the reference values that the
/// subject's samples scatter around.
pub fn reference_features(
    params: &HandParams,
    anatomy: &Anatomy,
    subject: &str,
    pipeline: &PipelineParams,
) -> Result<HandFeatureVector> {
    let mut clean = params.clone();
    clean.pose = PoseModel {
        max_rotation_deg: 0.0,
        max_shift: 0.0,
    };
    clean.intensity.noise_sigma = 0.0;
    clean.thumb_jitter = 0.0;
    clean.artifacts = Artifacts::default();
    let (img, truth) = render_hand(&clean, anatomy, 0)?;
    extract_one(&img, truth.hand, subject, "reference", pipeline)
}
