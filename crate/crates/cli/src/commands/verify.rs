use rand::seq::SliceRandom;

use handgeom::classify::LabeledDataset;
use handgeom::eval::{closed_set_verification, disjoint_imposter_protocol};
use handgeom::seed;

use super::{create_dir, feature_names, load_hands, resolve_subset, write_text};
use crate::args::VerifyArgs;
use crate::manifest::Manifest;
use crate::UsageError;

pub fn run(a: &VerifyArgs, _jobs: usize) -> anyhow::Result<()> {
    if !(1..=3).contains(&a.probe) {
        return Err(UsageError("--probe must be 1, 2 or 3".into()).into());
    }
    if a.imposters > 0 && a.probe != 3 {
        return Err(UsageError("disjoint imposters are probed with the third sample; use --probe 3".into()).into());
    }
    let hands = load_hands(&a.data.input)?;
    let data = LabeledDataset::from_hands(&hands, &a.data.fingers)?;
    let features = resolve_subset(&data, &a.subset.subset, a.subset.selection.as_deref())?;
    let n = data.class_count();
    let pop = a.population.unwrap_or(n.saturating_sub(a.imposters));
    if pop < 2 || pop + a.imposters > n {
        return Err(UsageError(format!(
            "{pop} enrolled plus {} imposter subjects do not fit a cohort of {n}",
            a.imposters
        ))
        .into());
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut seed::rng(a.seed));
    let mut enrolled = order[..pop].to_vec();
    let mut outsiders = order[pop..pop + a.imposters].to_vec();
    enrolled.sort_unstable();
    outsiders.sort_unstable();

    let genuine = data.subset_classes(&enrolled);
    let report = if outsiders.is_empty() {
        closed_set_verification(&genuine, &features, a.probe - 1, a.grid)?
    } else {
        disjoint_imposter_protocol(&genuine, &data.subset_classes(&outsiders), &features, a.grid)?
    };
    create_dir(&a.data.out)?;
    write_text(&a.data.out.join("verification.csv"), &report.curve_csv())?;
    write_text(&a.data.out.join("eer.txt"), &format!("{}\n", report.summary()))?;

    let mut m = Manifest::new("verify");
    a.data.record(&mut m);
    m.set("subset", feature_names(&data, &features))
        .set("population", pop)
        .set("imposters", a.imposters)
        .set("probe", a.probe)
        .set("grid", a.grid)
        .set("seed", a.seed);
    let fmt = |v: Option<f64>| v.map_or("na".to_string(), |x| format!("{x:.6}"));
    m.result("eer", fmt(report.sweep.eer))
        .result("eer_threshold", fmt(report.sweep.eer_threshold))
        .result("probes", report.probes)
        .result("genuine_claims", report.genuine_scores.len())
        .result("imposter_claims", report.imposter_scores.len())
        .result("genuine_comparisons", report.counts.genuine)
        .result("imposter_comparisons", report.counts.imposter)
        .result("floored_features", report.floored.len());
    m.write(&a.data.out)
}
