//! Identification and verification protocols: 2-train/1-test rotations,
//! subject partitions, standardized-distance verification with FAR/FRR/EER.

mod partition;
mod verify;

pub use partition::{combinations, enumerate_combinations, partition_subjects, PartitionScheme, Variant};
pub use verify::{
    closed_set_verification, comparison_counts, disjoint_imposter_protocol, estimate_sigma, standardized_distance,
    sweep, uniform_grid, verification_sweep, ComparisonCounts, Sweep, VerificationReport, SIGMA_FLOOR,
};

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::classify::{rotation_accuracies, Classifier, LabeledDataset};
use crate::error::{Error, Result};
use crate::features::HandFeatureVector;
use crate::hand::FINGER_NAMES;

/// Accuracy of each rotation on the listed features.
pub fn identify(data: &LabeledDataset, features: &[usize], clf: &dyn Classifier) -> Result<[f64; 3]> {
    rotation_accuracies(&data.project(features)?, &data.labels, clf)
}

fn mean3(a: &[f64; 3]) -> f64 {
    a.iter().sum::<f64>() / 3.0
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentificationReport {
    pub population: usize,
    pub fingers: Vec<usize>,
    pub features: Vec<String>,
    pub rotation_accuracy: [f64; 3],
    pub mean_accuracy: f64,
    /// Each listed finger on its own.
    pub per_finger: Vec<(usize, f64)>,
    pub classifier: String,
}

fn finger_list(fingers: &[usize]) -> String {
    fingers.iter().map(|&f| FINGER_NAMES[f]).collect::<Vec<_>>().join("+")
}

impl IdentificationReport {
    pub fn text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "classifier: {}", self.classifier);
        let _ = writeln!(s, "population: {}", self.population);
        let _ = writeln!(s, "fingers: {}", finger_list(&self.fingers));
        let _ = writeln!(s, "features ({}): {}", self.features.len(), self.features.join(" "));
        for (r, a) in self.rotation_accuracy.iter().enumerate() {
            let _ = writeln!(s, "rotation {}: {:.4}", r + 1, a);
        }
        let _ = writeln!(s, "mean accuracy: {:.4}", self.mean_accuracy);
        for (f, a) in &self.per_finger {
            let _ = writeln!(s, "{:<7} {:.4}", FINGER_NAMES[*f], a);
        }
        s
    }

    pub fn csv(&self) -> String {
        let mut s = String::from("fingers,rotation,accuracy\n");
        let all = finger_list(&self.fingers);
        for (r, a) in self.rotation_accuracy.iter().enumerate() {
            let _ = writeln!(s, "{all},{},{a:.6}", r + 1);
        }
        let _ = writeln!(s, "{all},mean,{:.6}", self.mean_accuracy);
        for (f, a) in &self.per_finger {
            let _ = writeln!(s, "{},mean,{a:.6}", FINGER_NAMES[*f]);
        }
        s
    }
}

/// Rotation protocol on the listed fingers jointly, plus each finger alone.
pub fn identification_protocol(
    hands: &[HandFeatureVector],
    fingers: &[usize],
    features: &[usize],
    clf: &dyn Classifier,
) -> Result<IdentificationReport> {
    let data = LabeledDataset::from_hands(hands, fingers)?;
    let rotation_accuracy = identify(&data, features, clf)?;
    let per_finger = fingers
        .par_iter()
        .map(|&f| {
            let d = LabeledDataset::from_hands(hands, &[f])?;
            Ok((f, mean3(&identify(&d, features, clf)?)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(IdentificationReport {
        population: data.class_count(),
        fingers: fingers.to_vec(),
        features: features.iter().map(|&f| data.names[f].clone()).collect(),
        rotation_accuracy,
        mean_accuracy: mean3(&rotation_accuracy),
        per_finger,
        classifier: clf.describe(),
    })
}

/// Fingers ordered by their accuracy averaged over every classifier, best
/// first; ties go to the finger nearer the thumb.
pub fn rank_fingers(
    hands: &[HandFeatureVector],
    features: &[usize],
    classifiers: &[&dyn Classifier],
) -> Result<Vec<(usize, f64)>> {
    if classifiers.is_empty() {
        return Err(Error::invalid("no classifiers to vote"));
    }
    let mut scored = (0..5)
        .map(|f| {
            let d = LabeledDataset::from_hands(hands, &[f])?;
            let mut total = 0.0;
            for c in classifiers {
                total += mean3(&identify(&d, features, *c)?);
            }
            Ok((f, total / classifiers.len() as f64))
        })
        .collect::<Result<Vec<_>>>()?;
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    Ok(scored)
}

/// Accuracy of growing finger combinations: the first finger of `order`, then
/// the first two, and so on.
pub fn cumulative_fingers(
    hands: &[HandFeatureVector],
    order: &[usize],
    features: &[usize],
    clf: &dyn Classifier,
) -> Result<Vec<(Vec<usize>, f64)>> {
    (1..=order.len())
        .map(|k| {
            let d = LabeledDataset::from_hands(hands, &order[..k])?;
            Ok((order[..k].to_vec(), mean3(&identify(&d, features, clf)?)))
        })
        .collect()
}

/// Rotation accuracies on every subject combination: `combos.len() × 3` tests.
pub fn partition_protocol(
    data: &LabeledDataset,
    combos: &[Vec<usize>],
    features: &[usize],
    clf: &dyn Classifier,
) -> Result<Vec<[f64; 3]>> {
    combos
        .par_iter()
        .map(|classes| identify(&data.subset_classes(classes), features, clf))
        .collect()
}
