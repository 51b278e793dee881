//! Nearest-neighbour and bagged-forest classifiers, the 2-train/1-test
//! rotation protocol and stratified k-fold cross-validation.

mod dataset;
mod forest;
mod knn;

pub use dataset::{feature_label, rotations, LabeledDataset, Split};
pub use forest::{features_per_split, train_forest, Forest, OobEstimate, PredictionScore, Tree};
pub use knn::{apply_scale, column_scale, euclidean, pearson, KnnModel, Metric};

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::seed;

/// Anything that can be trained on labelled rows and then label new rows.
pub trait Classifier: Sync {
    fn fit_predict(&self, train: &[Vec<f64>], labels: &[usize], test: &[Vec<f64>]) -> Result<Vec<usize>>;

    fn describe(&self) -> String;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KnnConfig {
    pub k: usize,
    pub metric: Metric,
    /// z-score every column with the training mean and spread first.
    pub standardize: bool,
}

impl Default for KnnConfig {
    fn default() -> Self {
        KnnConfig {
            k: 1,
            metric: Metric::Euclidean,
            standardize: true,
        }
    }
}

impl Classifier for KnnConfig {
    fn fit_predict(&self, train: &[Vec<f64>], labels: &[usize], test: &[Vec<f64>]) -> Result<Vec<usize>> {
        let (train, test) = if self.standardize {
            let (m, s) = column_scale(train);
            (apply_scale(train, &m, &s), apply_scale(test, &m, &s))
        } else {
            (train.to_vec(), test.to_vec())
        };
        let model = KnnModel::new(train, labels.to_vec(), self.k, self.metric)?;
        test.iter().map(|q| model.classify(q)).collect()
    }

    fn describe(&self) -> String {
        format!(
            "knn k={} metric={}{}",
            self.k,
            self.metric.as_str(),
            if self.standardize { " standardized" } else { "" }
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ForestConfig {
    pub n_trees: usize,
    pub seed: u64,
}

impl Default for ForestConfig {
    fn default() -> Self {
        ForestConfig { n_trees: 150, seed: 0 }
    }
}

impl Classifier for ForestConfig {
    fn fit_predict(&self, train: &[Vec<f64>], labels: &[usize], test: &[Vec<f64>]) -> Result<Vec<usize>> {
        let f = train_forest(train, labels, self.n_trees, self.seed)?;
        test.iter().map(|q| f.predict(q).map(|s| s.class)).collect()
    }

    fn describe(&self) -> String {
        format!("forest trees={} seed={}", self.n_trees, self.seed)
    }
}

fn pick(rows: &[Vec<f64>], idx: &[usize]) -> Vec<Vec<f64>> {
    idx.iter().map(|&i| rows[i].clone()).collect()
}

/// Fraction of `idx` test rows labelled correctly after training on `train`.
pub fn holdout_accuracy(rows: &[Vec<f64>], labels: &[usize], split: &Split, clf: &dyn Classifier) -> Result<f64> {
    if split.test.is_empty() {
        return Err(Error::invalid("empty test split"));
    }
    let train_labels: Vec<usize> = split.train.iter().map(|&i| labels[i]).collect();
    let pred = clf.fit_predict(&pick(rows, &split.train), &train_labels, &pick(rows, &split.test))?;
    let hits = pred.iter().zip(&split.test).filter(|(p, &i)| **p == labels[i]).count();
    Ok(hits as f64 / split.test.len() as f64)
}

/// Accuracy of each of the three 2-train/1-test rotations.
pub fn rotation_accuracies(rows: &[Vec<f64>], labels: &[usize], clf: &dyn Classifier) -> Result<[f64; 3]> {
    let splits = rotations(labels)?;
    let mut out = [0.0; 3];
    for (o, s) in out.iter_mut().zip(&splits) {
        *o = holdout_accuracy(rows, labels, s, clf)?;
    }
    Ok(out)
}

/// Per-fold errors of a stratified k-fold run.
#[derive(Debug, Clone, PartialEq)]
pub struct CvReport {
    pub fold_errors: Vec<f64>,
    pub mean_error: f64,
    pub seed: u64,
}

/// Stratified fold assignment: each class is shuffled and dealt round-robin,
/// the dealing position carrying over from one class to the next.
pub fn stratified_folds(labels: &[usize], folds: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if folds < 2 {
        return Err(Error::invalid("cross-validation needs at least 2 folds"));
    }
    if folds > labels.len() {
        return Err(Error::invalid(format!("{folds} folds for {} samples", labels.len())));
    }
    let n_classes = labels.iter().max().map_or(0, |m| m + 1);
    let mut by_class = vec![Vec::new(); n_classes];
    for (i, &l) in labels.iter().enumerate() {
        by_class[l].push(i);
    }
    let mut rng = seed::rng(seed);
    let mut out = vec![Vec::new(); folds];
    let mut next = 0usize;
    for members in &mut by_class {
        members.shuffle(&mut rng);
        for &i in members.iter() {
            out[next].push(i);
            next = (next + 1) % folds;
        }
    }
    for f in &mut out {
        f.sort_unstable();
    }
    Ok(out)
}

pub fn cross_validate(
    rows: &[Vec<f64>],
    labels: &[usize],
    folds: usize,
    clf: &dyn Classifier,
    seed: u64,
) -> Result<CvReport> {
    if rows.len() != labels.len() {
        return Err(Error::invalid(format!(
            "{} rows but {} labels",
            rows.len(),
            labels.len()
        )));
    }
    let assignment = stratified_folds(labels, folds, seed)?;
    let mut fold_errors = Vec::with_capacity(folds);
    for test in &assignment {
        let mut in_test = vec![false; rows.len()];
        test.iter().for_each(|&i| in_test[i] = true);
        let split = Split {
            train: (0..rows.len()).filter(|&i| !in_test[i]).collect(),
            test: test.clone(),
        };
        fold_errors.push(1.0 - holdout_accuracy(rows, labels, &split, clf)?);
    }
    let mean_error = fold_errors.iter().sum::<f64>() / folds as f64;
    Ok(CvReport {
        fold_errors,
        mean_error,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_fold_on_separable_points() {
        let rows = vec![vec![0.0], vec![0.1], vec![10.0], vec![10.1]];
        let labels = vec![0, 0, 1, 1];
        let r = cross_validate(&rows, &labels, 2, &KnnConfig::default(), 1).unwrap();
        assert_eq!(r.mean_error, 0.0);
        assert!(cross_validate(&rows, &labels, 5, &KnnConfig::default(), 1).is_err());
        assert!(cross_validate(&rows, &labels, 1, &KnnConfig::default(), 1).is_err());
    }

    #[test]
    fn folds_partition_and_stratify() {
        let labels: Vec<usize> = (0..40).map(|i| i % 4).collect();
        let folds = stratified_folds(&labels, 10, 3).unwrap();
        let mut all: Vec<usize> = folds.concat();
        all.sort_unstable();
        assert_eq!(all, (0..40).collect::<Vec<_>>());
        for f in &folds {
            assert_eq!(f.len(), 4);
        }
        // a class smaller than the fold count never shares a fold
        for c in 0..4 {
            for f in &folds {
                assert!(f.iter().filter(|&&i| labels[i] == c).count() <= 1);
            }
        }
        assert_eq!(folds, stratified_folds(&labels, 10, 3).unwrap());
    }

    #[test]
    fn identity_features_give_perfect_rotation_accuracy() {
        let labels = vec![0, 1, 0, 1, 0, 1];
        let rows: Vec<Vec<f64>> = labels.iter().map(|&l| vec![l as f64]).collect();
        assert_eq!(
            rotation_accuracies(&rows, &labels, &KnnConfig::default()).unwrap(),
            [1.0; 3]
        );
        let f = ForestConfig { n_trees: 5, seed: 1 };
        assert_eq!(rotation_accuracies(&rows, &labels, &f).unwrap(), [1.0; 3]);
    }
}
