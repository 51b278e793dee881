use std::fmt::Write as _;

use handgeom::classify::LabeledDataset;
use handgeom::selection::{rfoba, Scored, SelectionParams};

use super::{create_dir, feature_names, load_hands, with_jobs, write_text};
use crate::args::SelectArgs;
use crate::manifest::Manifest;
use crate::UsageError;

pub fn run(a: &SelectArgs, jobs: usize) -> anyhow::Result<()> {
    if !(0.0..=0.05).contains(&a.delta) {
        return Err(UsageError("--delta must lie in [0, 0.05]".into()).into());
    }
    let hands = load_hands(&a.data.input)?;
    let data = LabeledDataset::from_hands(&hands, &a.data.fingers)?;
    let clf = a.classifier.build()?;
    let params = SelectionParams {
        delta: a.delta,
        repeats: a.repeats,
        subsample: a.subsample,
        seed: a.seed,
    };
    let r = with_jobs(jobs, || rfoba(&data, clf.as_ref(), &params))??;
    create_dir(&a.data.out)?;
    write_text(&a.data.out.join("selection.txt"), &r.report())?;

    let all = Scored {
        features: (0..data.width()).collect(),
        accuracy: r.all,
    };
    let sets = [
        ("all", &all),
        ("b_sel", &r.b_sel),
        ("b_opt", &r.b_opt),
        ("b_opt_delta", &r.b_opt_delta),
    ];
    let mut subsets = String::new();
    for (name, s) in sets {
        let _ = writeln!(subsets, "{name}={}", feature_names(&data, &s.features));
    }
    for (name, s) in sets {
        let _ = writeln!(subsets, "accuracy.{name}={:.6}", s.accuracy);
    }
    write_text(&a.data.out.join("subsets.txt"), &subsets)?;

    let mut m = Manifest::new("select");
    a.data.record(&mut m);
    m.set("delta", a.delta)
        .set("repeats", a.repeats)
        .set("subsample", a.subsample)
        .set("seed", a.seed);
    a.classifier.record(&mut m);
    m.result("subjects", data.class_count())
        .result("features", data.width())
        .result("b_sel", r.b_sel.features.len())
        .result("b_opt", r.b_opt.features.len())
        .result("b_opt_delta", r.b_opt_delta.features.len())
        .result("forward_fallback", r.forward_fallback);
    m.write(&a.data.out)
}
