use std::collections::HashSet;

use anyhow::Context;

use handgeom::batch::{map_ordered, Rejection};
use handgeom::features::{finger_features, write_features, HandFeatureVector};
use handgeom::{Error, Hand, Stage};

use super::{create_dir, csv_reader, ensure_survivors, record_rejections, write_rejections};
use crate::args::ExtractArgs;
use crate::fingerset;
use crate::manifest::Manifest;

struct Entry {
    subject: String,
    sample: String,
    hand: Hand,
    /// Set when preprocessing already refused the scan.
    earlier: Option<Rejection>,
}

fn read_index(a: &ExtractArgs) -> anyhow::Result<Vec<Entry>> {
    let mut r = csv_reader(&a.input.join("index.csv"))?;
    let mut out = Vec::new();
    for rec in r.deserialize::<(String, String, String, String, String, String)>() {
        let (subject, sample, hand, status, stage, reason) = rec?;
        let earlier = (status != "ok").then(|| Rejection {
            subject: subject.clone(),
            sample: sample.clone(),
            stage: stage.parse().ok(),
            reason,
        });
        out.push(Entry {
            subject,
            sample,
            hand: hand.parse()?,
            earlier,
        });
    }
    Ok(out)
}

pub fn run(a: &ExtractArgs, jobs: usize) -> anyhow::Result<()> {
    let entries = read_index(a)?;
    create_dir(&a.out)?;
    let outcomes = map_ordered(
        &entries,
        jobs,
        |e| -> anyhow::Result<Result<HandFeatureVector, Rejection>> {
            if let Some(r) = &e.earlier {
                return Ok(Err(r.clone()));
            }
            let dir = a.input.join("fingers").join(format!("{}_{}", e.subject, e.sample));
            let shapes = fingerset::load(&dir)?;
            let fingers: Result<Vec<_>, Error> = shapes
                .iter()
                .enumerate()
                .map(|(i, s)| {
                    finger_features(s).map_err(|err| {
                        Error::FeatureFailure {
                            finger: i,
                            reason: err.to_string(),
                        }
                        .at(Stage::Features)
                    })
                })
                .collect();
            Ok(match fingers {
                Ok(fingers) => Ok(HandFeatureVector {
                    subject: e.subject.clone(),
                    sample: e.sample.clone(),
                    hand: e.hand,
                    fingers,
                }),
                Err(err) => Err(Rejection::new(&e.subject, &e.sample, &err)),
            })
        },
    )?
    .into_iter()
    .collect::<anyhow::Result<Vec<_>>>()?;

    let mut vectors = Vec::new();
    let mut rejections = Vec::new();
    for o in outcomes {
        match o {
            Ok(v) => vectors.push(v),
            Err(r) => rejections.push(r),
        }
    }
    // Protocols need every sample of a subject, so a single rejected scan
    // excludes the whole subject.
    let excluded: HashSet<&str> = rejections.iter().map(|r| r.subject.as_str()).collect();
    let kept: Vec<HandFeatureVector> = vectors
        .iter()
        .filter(|v| !excluded.contains(v.subject.as_str()))
        .cloned()
        .collect();

    let path = a.out.join("features.csv");
    let f = std::fs::File::create(&path).with_context(|| format!("writing {}", path.display()))?;
    write_features(std::io::BufWriter::new(f), &kept)?;
    write_rejections(&a.out.join("rejections.csv"), &rejections)?;

    let mut subjects: Vec<&str> = entries.iter().map(|e| e.subject.as_str()).collect();
    subjects.sort_unstable();
    subjects.dedup();
    let mut m = Manifest::new("extract");
    m.set("input", a.input.display()).set("out", a.out.display());
    record_rejections(&mut m, subjects.len(), entries.len(), &rejections);
    m.result("rows", kept.len() * 5);
    m.write(&a.out)?;
    ensure_survivors(subjects.len() - excluded.len(), &rejections)
}
