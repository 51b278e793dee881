use anyhow::Context;

use handgeom::batch::{map_ordered, reference_features};
use handgeom::features::write_features;
use handgeom::pnm::{save_pbm, save_pgm};
use handgeom::profile::PipelineParams;
use handgeom::synth::{mirror_sample, plan_cohort, render_hand, HandParams};
use handgeom::FINGER_NAMES;

use super::{create_dir, csv_writer};
use crate::args::{ArtifactArg, HandArg, SynthArgs};
use crate::manifest::Manifest;
use crate::{StageFailure, UsageError};

pub fn subject_name(i: usize) -> String {
    format!("s{i:04}")
}

pub fn run(a: &SynthArgs, jobs: usize) -> anyhow::Result<()> {
    if let Some(&s) = a.artifact_subjects.iter().find(|&&s| s >= a.subjects) {
        return Err(UsageError(format!("artifact subject {s} is outside the cohort")).into());
    }
    let params = HandParams {
        separability: a.separability,
        thumb_jitter: a.thumb_jitter,
        ..HandParams::default()
    };
    let plan = plan_cohort(a.subjects, a.samples, a.seed, &params)?;
    let mut flawed = params.clone();
    match a.artifact {
        ArtifactArg::None => {}
        ArtifactArg::CropLittle => flawed.artifacts.crop_little = true,
        ArtifactArg::SleeveBlob => flawed.artifacts.sleeve_blob = true,
        ArtifactArg::NailSpot => flawed.artifacts.nail_bright_spot = true,
    }
    let has_artifact = |subject: usize| {
        a.artifact != ArtifactArg::None && (a.artifact_subjects.is_empty() || a.artifact_subjects.contains(&subject))
    };

    let images = a.out.join("images");
    let masks = a.out.join("truth").join("masks");
    create_dir(&images)?;
    create_dir(&a.out.join("truth"))?;
    if a.truth_masks {
        create_dir(&masks)?;
    }

    let written = map_ordered(&plan.samples, jobs, |spec| -> anyhow::Result<[String; 4]> {
        let anatomy = &plan.anatomies[spec.subject];
        let p = if has_artifact(spec.subject) { &flawed } else { &params };
        let (mut img, mut truth) = render_hand(p, anatomy, spec.sample_seed)?;
        if a.hand == HandArg::Left {
            (img, truth) = mirror_sample(&img, &truth);
        }
        let subject = subject_name(spec.subject);
        let sample = (spec.sample + 1).to_string();
        let file = format!("images/{subject}_{sample}.pgm");
        save_pgm(&img, a.out.join(&file))?;
        if a.truth_masks {
            save_pbm(&truth.hand_mask(), masks.join(format!("{subject}_{sample}_hand.pbm")))?;
            for (i, m) in truth.finger_masks()?.iter().enumerate() {
                save_pbm(m, masks.join(format!("{subject}_{sample}_{}.pbm", FINGER_NAMES[i])))?;
            }
        }
        Ok([subject, sample, truth.hand.to_string(), file])
    })?
    .into_iter()
    .collect::<anyhow::Result<Vec<_>>>()?;

    let mut w = csv_writer(&a.out.join("scans.csv"))?;
    w.write_record(["subject", "sample", "hand", "image"])?;
    for row in &written {
        w.write_record(row)?;
    }
    w.flush()?;

    let subjects: Vec<usize> = (0..plan.subject_count()).collect();
    let pipeline = PipelineParams::default();
    let reference = map_ordered(&subjects, jobs, |&s| {
        reference_features(&params, &plan.anatomies[s], &subject_name(s), &pipeline)
    })?
    .into_iter()
    .enumerate()
    .map(|(s, r)| r.map_err(|e| StageFailure(format!("reference features of subject {}: {e}", subject_name(s)))))
    .collect::<Result<Vec<_>, _>>()?;
    let path = a.out.join("truth").join("features.csv");
    let f = std::fs::File::create(&path).with_context(|| format!("writing {}", path.display()))?;
    write_features(std::io::BufWriter::new(f), &reference)?;

    let mut m = Manifest::new("synth");
    m.set("out", a.out.display())
        .set("subjects", a.subjects)
        .set("samples", a.samples)
        .set("seed", a.seed)
        .set("separability", a.separability)
        .set("thumb-jitter", a.thumb_jitter)
        .set("hand", if a.hand == HandArg::Left { "left" } else { "right" })
        .set("artifact", a.artifact.name());
    if !a.artifact_subjects.is_empty() {
        m.set_list("artifact-subjects", &a.artifact_subjects);
    }
    m.set("truth-masks", a.truth_masks)
        .result("images", written.len())
        .result("subjects", plan.subject_count());
    m.write(&a.out)
}
