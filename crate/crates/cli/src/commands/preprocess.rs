use std::path::PathBuf;

use handgeom::batch::{map_ordered, Rejection};
use handgeom::pnm::{load_pgm, save_pbm};
use handgeom::profile::extract_detailed;
use handgeom::Hand;

use super::{create_dir, csv_reader, csv_writer, ensure_survivors, record_rejections, stage_name};
use crate::args::PreprocessArgs;
use crate::fingerset;
use crate::manifest::Manifest;

#[derive(Debug, Clone)]
struct Scan {
    subject: String,
    sample: String,
    hand: Hand,
    image: PathBuf,
}

fn read_scans(a: &PreprocessArgs) -> anyhow::Result<Vec<Scan>> {
    let mut r = csv_reader(&a.input.join("scans.csv"))?;
    let mut out = Vec::new();
    for rec in r.deserialize::<(String, String, String, String)>() {
        let (subject, sample, hand, image) = rec?;
        out.push(Scan {
            subject,
            sample,
            hand: hand.parse()?,
            image: a.input.join(image),
        });
    }
    Ok(out)
}

pub fn run(a: &PreprocessArgs, jobs: usize) -> anyhow::Result<()> {
    let params = a.pipeline.params()?;
    let scans = read_scans(a)?;
    create_dir(&a.out.join("fingers"))?;

    let outcomes = map_ordered(&scans, jobs, |s| -> anyhow::Result<Option<Rejection>> {
        let img = load_pgm(&s.image)?;
        let x = match extract_detailed(&img, s.hand, &params) {
            Ok(x) => x,
            Err(e) => return Ok(Some(Rejection::new(&s.subject, &s.sample, &e))),
        };
        let id = format!("{}_{}", s.subject, s.sample);
        fingerset::save(&a.out.join("fingers").join(&id), &x.fingers)?;
        if a.dump_stages {
            let dir = a.out.join("stages").join(&id);
            create_dir(&dir)?;
            for (name, img) in x.stages() {
                save_pbm(img, dir.join(format!("{name}.pbm")))?;
            }
        }
        Ok(None)
    })?
    .into_iter()
    .collect::<anyhow::Result<Vec<_>>>()?;

    let mut w = csv_writer(&a.out.join("index.csv"))?;
    w.write_record(["subject", "sample", "hand", "status", "stage", "reason"])?;
    let mut rejections = Vec::new();
    for (s, o) in scans.iter().zip(outcomes) {
        let hand = s.hand.to_string();
        match o {
            None => w.write_record([s.subject.as_str(), s.sample.as_str(), hand.as_str(), "ok", "", ""])?,
            Some(r) => {
                w.write_record([
                    s.subject.as_str(),
                    s.sample.as_str(),
                    hand.as_str(),
                    "rejected",
                    stage_name(&r),
                    r.reason.as_str(),
                ])?;
                rejections.push(r);
            }
        }
    }
    w.flush()?;

    let mut subjects: Vec<&str> = scans.iter().map(|s| s.subject.as_str()).collect();
    subjects.sort_unstable();
    subjects.dedup();
    let mut m = Manifest::new("preprocess");
    m.set("input", a.input.display())
        .set("out", a.out.display())
        .set("dump-stages", a.dump_stages);
    a.pipeline.record(&mut m);
    record_rejections(&mut m, subjects.len(), scans.len(), &rejections);
    m.write(&a.out)?;
    for r in &rejections {
        eprintln!(
            "rejected {} sample {}: {}: {}",
            r.subject,
            r.sample,
            stage_name(r),
            r.reason
        );
    }
    ensure_survivors(scans.len() - rejections.len(), &rejections)
}
