//! RFoBa wrapper feature selection: relevance ranking, rank-ordered forward
//! selection, backward elimination and Δ-relaxation, each scored with the
//! 2-train/1-test rotation protocol.

use std::fmt::Write as _;

use rand::seq::index::sample;
use rayon::prelude::*;

use crate::classify::{rotation_accuracies, Classifier, LabeledDataset};
use crate::error::{Error, Result};
use crate::seed;

/// Mean rotation accuracy of `clf` on the listed features.
pub fn score_subset(data: &LabeledDataset, subset: &[usize], clf: &dyn Classifier) -> Result<f64> {
    if subset.is_empty() {
        return Err(Error::invalid("cannot score an empty feature subset"));
    }
    let mut sorted = subset.to_vec();
    sorted.sort_unstable();
    let rows = data.project(&sorted)?;
    let acc = rotation_accuracies(&rows, &data.labels, clf)?;
    Ok(acc.iter().sum::<f64>() / 3.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectionParams {
    /// Accuracy that the relaxation pass may give up, in [0, 0.05].
    pub delta: f64,
    /// Subject subsamples averaged when ranking.
    pub repeats: usize,
    /// Subjects per ranking subsample.
    pub subsample: usize,
    pub seed: u64,
}

impl Default for SelectionParams {
    fn default() -> Self {
        SelectionParams {
            delta: 0.01,
            repeats: 5,
            subsample: 100,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankedFeature {
    pub feature: usize,
    pub name: String,
    /// Mean single-feature accuracy over the ranking subsamples.
    pub accuracy: f64,
}

/// Single-feature accuracies averaged over random subject subsamples, best
/// first; equal means go to the lower ordinal.
pub fn rank_features(
    data: &LabeledDataset,
    clf: &dyn Classifier,
    params: &SelectionParams,
) -> Result<Vec<RankedFeature>> {
    let w = data.width();
    if w == 0 {
        return Err(Error::invalid("dataset has no features"));
    }
    if params.repeats == 0 || params.subsample < 2 {
        return Err(Error::invalid(
            "ranking needs at least one subsample of two or more subjects",
        ));
    }
    let n = data.class_count();
    let m = params.subsample.min(n);
    let draws: Vec<LabeledDataset> = if m == n {
        // every draw would hold the whole cohort
        vec![data.clone()]
    } else {
        let mut rng = seed::rng(params.seed);
        (0..params.repeats)
            .map(|_| {
                let mut pick = sample(&mut rng, n, m).into_vec();
                pick.sort_unstable();
                data.subset_classes(&pick)
            })
            .collect()
    };
    let scores = (0..w)
        .into_par_iter()
        .map(|f| {
            let total = draws.iter().map(|d| score_subset(d, &[f], clf)).sum::<Result<f64>>()?;
            Ok(total / draws.len() as f64)
        })
        .collect::<Result<Vec<f64>>>()?;
    let mut order: Vec<usize> = (0..w).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    Ok(order
        .into_iter()
        .map(|f| RankedFeature {
            feature: f,
            name: data.names[f].clone(),
            accuracy: scores[f],
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Full,
    Forward,
    Backward,
    Relax,
}

impl Phase {
    pub fn as_str(self) -> &'static str {
        match self {
            Phase::Full => "all",
            Phase::Forward => "forward",
            Phase::Backward => "backward",
            Phase::Relax => "relax",
        }
    }
}

/// One evaluated candidate.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceStep {
    pub phase: Phase,
    /// Feature added or removed; None for whole-set evaluations.
    pub feature: Option<usize>,
    /// The evaluated subset, ascending.
    pub subset: Vec<usize>,
    pub accuracy: f64,
    pub accepted: bool,
}

/// Subset in rank order with its accuracy.
#[derive(Debug, Clone, PartialEq)]
pub struct Scored {
    pub features: Vec<usize>,
    pub accuracy: f64,
}

fn sorted(set: &[usize]) -> Vec<usize> {
    let mut v = set.to_vec();
    v.sort_unstable();
    v
}

fn without(set: &[usize], f: usize) -> Vec<usize> {
    set.iter().copied().filter(|&g| g != f).collect()
}

/// Seeds with the top-ranked feature and adds features in rank order when they
/// strictly raise accuracy, sweeping the rejected ones again until a sweep
/// adds nothing.
pub fn forward_select(
    data: &LabeledDataset,
    ranked: &[usize],
    clf: &dyn Classifier,
    trace: &mut Vec<TraceStep>,
) -> Result<Scored> {
    let (&first, rest) = ranked.split_first().ok_or_else(|| Error::invalid("empty ranking"))?;
    let mut sel = vec![first];
    let mut s = score_subset(data, &sel, clf)?;
    trace.push(TraceStep {
        phase: Phase::Forward,
        feature: Some(first),
        subset: sorted(&sel),
        accuracy: s,
        accepted: true,
    });
    let mut rejected: Vec<usize> = rest.to_vec();
    loop {
        let mut still = Vec::new();
        let before = sel.len();
        for &f in &rejected {
            let mut cand = sel.clone();
            cand.push(f);
            let sc = score_subset(data, &cand, clf)?;
            let accepted = sc > s;
            trace.push(TraceStep {
                phase: Phase::Forward,
                feature: Some(f),
                subset: sorted(&cand),
                accuracy: sc,
                accepted,
            });
            if accepted {
                sel = cand;
                s = sc;
            } else {
                still.push(f);
            }
        }
        rejected = still;
        if sel.len() == before || rejected.is_empty() {
            break;
        }
    }
    Ok(Scored {
        features: sel,
        accuracy: s,
    })
}

/// Drops features, in the order given, whenever accuracy stays the same or
/// improves; repeats until nothing more can go. Never empties the set.
pub fn backward_eliminate(
    data: &LabeledDataset,
    start: &Scored,
    clf: &dyn Classifier,
    trace: &mut Vec<TraceStep>,
) -> Result<Scored> {
    if start.features.is_empty() {
        return Err(Error::invalid("nothing to eliminate from"));
    }
    let mut cur = start.clone();
    loop {
        let mut removed = false;
        for f in cur.features.clone() {
            if cur.features.len() == 1 {
                break;
            }
            let cand = without(&cur.features, f);
            let sc = score_subset(data, &cand, clf)?;
            let accepted = sc >= cur.accuracy;
            trace.push(TraceStep {
                phase: Phase::Backward,
                feature: Some(f),
                subset: sorted(&cand),
                accuracy: sc,
                accepted,
            });
            if accepted {
                cur = Scored {
                    features: cand,
                    accuracy: sc,
                };
                removed = true;
            }
        }
        if !removed {
            return Ok(cur);
        }
    }
}

/// One pass in rank order removing features while the accuracy stays within
/// `delta` of the starting set's.
pub fn relax_delta(
    data: &LabeledDataset,
    start: &Scored,
    delta: f64,
    clf: &dyn Classifier,
    trace: &mut Vec<TraceStep>,
) -> Result<Scored> {
    if !(0.0..=0.05).contains(&delta) {
        return Err(Error::invalid(format!("delta {delta} outside [0, 0.05]")));
    }
    let floor = start.accuracy - delta;
    let mut cur = start.clone();
    for &f in &start.features {
        if cur.features.len() == 1 {
            break;
        }
        let cand = without(&cur.features, f);
        let sc = score_subset(data, &cand, clf)?;
        // tolerance keeps a drop of exactly delta on the accepting side
        let accepted = sc >= floor - 1e-12;
        trace.push(TraceStep {
            phase: Phase::Relax,
            feature: Some(f),
            subset: sorted(&cand),
            accuracy: sc,
            accepted,
        });
        if accepted {
            cur = Scored {
                features: cand,
                accuracy: sc,
            };
        }
    }
    Ok(cur)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionResult {
    pub ranked: Vec<RankedFeature>,
    /// Accuracy with every feature.
    pub all: f64,
    pub b_sel: Scored,
    /// True when the forward pass ended below the full set and was replaced
    /// by it.
    pub forward_fallback: bool,
    pub b_opt: Scored,
    pub b_opt_delta: Scored,
    pub params: SelectionParams,
    pub classifier: String,
    pub names: Vec<String>,
    pub trace: Vec<TraceStep>,
}

pub fn rfoba(data: &LabeledDataset, clf: &dyn Classifier, params: &SelectionParams) -> Result<SelectionResult> {
    if !(0.0..=0.05).contains(&params.delta) {
        return Err(Error::invalid(format!("delta {} outside [0, 0.05]", params.delta)));
    }
    let ranked = rank_features(data, clf, params)?;
    let order: Vec<usize> = ranked.iter().map(|r| r.feature).collect();
    let mut trace = Vec::new();
    let all = score_subset(data, &order, clf)?;
    trace.push(TraceStep {
        phase: Phase::Full,
        feature: None,
        subset: sorted(&order),
        accuracy: all,
        accepted: true,
    });
    let mut b_sel = forward_select(data, &order, clf, &mut trace)?;
    let forward_fallback = b_sel.accuracy < all;
    if forward_fallback {
        b_sel = Scored {
            features: order.clone(),
            accuracy: all,
        };
    }
    let b_opt = backward_eliminate(data, &b_sel, clf, &mut trace)?;
    let b_opt_delta = relax_delta(data, &b_opt, params.delta, clf, &mut trace)?;
    Ok(SelectionResult {
        ranked,
        all,
        b_sel,
        forward_fallback,
        b_opt,
        b_opt_delta,
        params: *params,
        classifier: clf.describe(),
        names: data.names.clone(),
        trace,
    })
}

impl SelectionResult {
    fn labels(&self, set: &[usize]) -> String {
        set.iter()
            .map(|&f| self.names[f].as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Plain-text report: ranking, the three subsets and the full trace.
    pub fn report(&self) -> String {
        let mut s = String::new();
        let p = &self.params;
        let _ = writeln!(s, "classifier: {}", self.classifier);
        let _ = writeln!(
            s,
            "delta: {}  repeats: {}  subsample: {}  seed: {}",
            p.delta, p.repeats, p.subsample, p.seed
        );
        let _ = writeln!(s, "\nrank feature accuracy");
        for (i, r) in self.ranked.iter().enumerate() {
            let _ = writeln!(s, "{:>4} {:<7} {:.4}", i + 1, r.name, r.accuracy);
        }
        let _ = writeln!(s);
        let rows = [
            (
                "all",
                &Scored {
                    features: self.ranked.iter().map(|r| r.feature).collect(),
                    accuracy: self.all,
                },
            ),
            ("b_sel", &self.b_sel),
            ("b_opt", &self.b_opt),
            ("b_opt_delta", &self.b_opt_delta),
        ];
        for (name, set) in rows {
            let _ = writeln!(
                s,
                "{name:<11} n={:<3} S={:.4}  {}",
                set.features.len(),
                set.accuracy,
                self.labels(&set.features)
            );
        }
        if self.forward_fallback {
            let _ = writeln!(s, "note: forward pass scored below the full set; b_sel is the full set");
        }
        let _ = writeln!(s, "\nphase    feature size accuracy accepted");
        for t in &self.trace {
            let f = t.feature.map_or("-", |f| self.names[f].as_str());
            let _ = writeln!(
                s,
                "{:<8} {:<7} {:>4} {:.4}   {}",
                t.phase.as_str(),
                f,
                t.subset.len(),
                t.accuracy,
                if t.accepted { "yes" } else { "no" }
            );
        }
        s
    }
}
