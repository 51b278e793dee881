use std::fmt::Write as _;

use handgeom::classify::LabeledDataset;
use handgeom::eval::{
    enumerate_combinations, identification_protocol, partition_protocol, partition_subjects, Variant,
};

use super::{create_dir, feature_names, load_hands, resolve_subset, with_jobs, write_text};
use crate::args::IdentifyArgs;
use crate::manifest::Manifest;

pub fn run(a: &IdentifyArgs, jobs: usize) -> anyhow::Result<()> {
    let hands = load_hands(&a.data.input)?;
    let data = LabeledDataset::from_hands(&hands, &a.data.fingers)?;
    let features = resolve_subset(&data, &a.subset.subset, a.subset.selection.as_deref())?;
    let clf = a.classifier.build()?;
    let report = with_jobs(jobs, || {
        identification_protocol(&hands, &a.data.fingers, &features, clf.as_ref())
    })??;
    create_dir(&a.data.out)?;

    let mut text = report.text();
    let mut m = Manifest::new("identify");
    a.data.record(&mut m);
    m.set("subset", feature_names(&data, &features));
    a.classifier.record(&mut m);
    m.result("subjects", report.population)
        .result("mean_accuracy", format!("{:.6}", report.mean_accuracy));

    if let Some(pop) = a.population {
        let ids: Vec<usize> = (0..data.class_count()).collect();
        let scheme = partition_subjects(&ids, a.segment_size, a.variant, a.partition_seed)?;
        let combos = enumerate_combinations(&scheme, pop)?;
        let runs = with_jobs(jobs, || partition_protocol(&data, &combos, &features, clf.as_ref()))??;
        let mut csv = String::from("combination,rotation,accuracy\n");
        for (c, r) in runs.iter().enumerate() {
            for (k, acc) in r.iter().enumerate() {
                let _ = writeln!(csv, "{},{},{acc:.6}", c + 1, k + 1);
            }
        }
        write_text(&a.data.out.join("partition.csv"), &csv)?;
        let all: Vec<f64> = runs.iter().flatten().copied().collect();
        let mean = all.iter().sum::<f64>() / all.len() as f64;
        let min = all.iter().copied().fold(f64::INFINITY, f64::min);
        let max = all.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let _ = writeln!(
            text,
            "\npopulation {pop}: {} combinations, {} tests, accuracy mean {mean:.4} min {min:.4} max {max:.4}",
            combos.len(),
            all.len()
        );
        m.set("population", pop)
            .set("segment-size", a.segment_size)
            .set("variant", if a.variant == Variant::Tc1 { "tc1" } else { "tc2" })
            .set("partition-seed", a.partition_seed)
            .result("combinations", combos.len())
            .result("tests", all.len())
            .result("partition_mean_accuracy", format!("{mean:.6}"));
    }
    write_text(&a.data.out.join("identification.txt"), &text)?;
    write_text(&a.data.out.join("identification.csv"), &report.csv())?;
    m.write(&a.data.out)
}
