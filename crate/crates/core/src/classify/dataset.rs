use crate::error::{Error, Result};
use crate::features::{HandFeatureVector, FEATURES_PER_FINGER, FEATURES_PER_SET};

/// Feature rows with class labels. A feature ordinal may span several columns
/// (one per finger), so selecting a feature selects its whole column group.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    pub rows: Vec<Vec<f64>>,
    pub labels: Vec<usize>,
    /// Columns of each feature ordinal.
    pub groups: Vec<Vec<usize>>,
    /// Symbolic feature labels, one per ordinal.
    pub names: Vec<String>,
    /// Subject id behind each class label, when known.
    pub subjects: Vec<String>,
}

/// Symbolic label of a per-finger feature ordinal: a1..a10, b1..b10, c1..c10.
pub fn feature_label(ordinal: usize) -> String {
    let set = ["a", "b", "c"][(ordinal / FEATURES_PER_SET).min(2)];
    format!("{set}{}", ordinal % FEATURES_PER_SET + 1)
}

impl LabeledDataset {
    /// One column per feature, named f1, f2, ...
    pub fn new(rows: Vec<Vec<f64>>, labels: Vec<usize>) -> Result<Self> {
        let w = rows.first().map_or(0, Vec::len);
        let names = (1..=w).map(|i| format!("f{i}")).collect();
        Self::with_groups(rows, labels, (0..w).map(|c| vec![c]).collect(), names)
    }

    pub fn with_groups(
        rows: Vec<Vec<f64>>,
        labels: Vec<usize>,
        groups: Vec<Vec<usize>>,
        names: Vec<String>,
    ) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::invalid("empty dataset"));
        }
        if rows.len() != labels.len() {
            return Err(Error::invalid(format!(
                "{} rows but {} labels",
                rows.len(),
                labels.len()
            )));
        }
        let dim = rows[0].len();
        if let Some(r) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::invalid(format!("ragged rows: {} vs {dim} columns", r.len())));
        }
        if groups.len() != names.len() {
            return Err(Error::invalid("one name per feature group is required"));
        }
        if groups.iter().flatten().any(|&c| c >= dim) {
            return Err(Error::invalid("feature group refers to a missing column"));
        }
        let subjects = {
            let n = labels.iter().max().map_or(0, |m| m + 1);
            (0..n).map(|i| i.to_string()).collect()
        };
        Ok(LabeledDataset {
            rows,
            labels,
            groups,
            names,
            subjects,
        })
    }

    /// Dataset over the listed fingers (0 = thumb). Feature ordinal j groups
    /// column j of every listed finger. Subjects become class ids in order of
    /// first appearance.
    pub fn from_hands(vectors: &[HandFeatureVector], fingers: &[usize]) -> Result<Self> {
        if fingers.is_empty() {
            return Err(Error::invalid("no fingers selected"));
        }
        if let Some(&f) = fingers.iter().find(|&&f| f >= 5) {
            return Err(Error::invalid(format!("finger index {f} out of range")));
        }
        let mut subjects: Vec<String> = Vec::new();
        let mut labels = Vec::with_capacity(vectors.len());
        for v in vectors {
            let id = match subjects.iter().position(|s| *s == v.subject) {
                Some(i) => i,
                None => {
                    subjects.push(v.subject.clone());
                    subjects.len() - 1
                }
            };
            labels.push(id);
        }
        let rows = vectors.iter().map(|v| v.values(fingers)).collect();
        let groups = (0..FEATURES_PER_FINGER)
            .map(|j| (0..fingers.len()).map(|k| k * FEATURES_PER_FINGER + j).collect())
            .collect();
        let names = (0..FEATURES_PER_FINGER).map(feature_label).collect();
        let mut data = Self::with_groups(rows, labels, groups, names)?;
        data.subjects = subjects;
        Ok(data)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Number of feature ordinals.
    pub fn width(&self) -> usize {
        self.groups.len()
    }

    pub fn class_count(&self) -> usize {
        self.labels.iter().max().map_or(0, |m| m + 1)
    }

    /// Columns of the listed features, in the given order.
    pub fn columns(&self, features: &[usize]) -> Result<Vec<usize>> {
        if features.is_empty() {
            return Err(Error::invalid("empty feature subset"));
        }
        features
            .iter()
            .map(|&f| {
                self.groups
                    .get(f)
                    .cloned()
                    .ok_or_else(|| Error::invalid(format!("feature ordinal {f} out of range")))
            })
            .collect::<Result<Vec<_>>>()
            .map(|g| g.concat())
    }

    /// Rows restricted to the listed features.
    pub fn project(&self, features: &[usize]) -> Result<Vec<Vec<f64>>> {
        let cols = self.columns(features)?;
        Ok(self.rows.iter().map(|r| cols.iter().map(|&c| r[c]).collect()).collect())
    }

    /// The rows of the listed subjects' classes, relabelled 0.. in the given
    /// order.
    pub fn subset_classes(&self, classes: &[usize]) -> LabeledDataset {
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for (new, &c) in classes.iter().enumerate() {
            for (r, &l) in self.rows.iter().zip(&self.labels) {
                if l == c {
                    rows.push(r.clone());
                    labels.push(new);
                }
            }
        }
        LabeledDataset {
            rows,
            labels,
            groups: self.groups.clone(),
            names: self.names.clone(),
            subjects: classes
                .iter()
                .map(|&c| self.subjects.get(c).cloned().unwrap_or_else(|| c.to_string()))
                .collect(),
        }
    }
}

/// Train/test index lists for one rotation of the 2-train/1-test protocol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// The three rotations: rotation r tests each subject's r-th sample (in order of
/// appearance) and trains on the other two.
pub fn rotations(labels: &[usize]) -> Result<[Split; 3]> {
    let n = labels.iter().max().map_or(0, |m| m + 1);
    let mut seen = vec![0usize; n];
    let mut rank = Vec::with_capacity(labels.len());
    for &l in labels {
        rank.push(seen[l]);
        seen[l] += 1;
    }
    if let Some((c, &k)) = seen.iter().enumerate().find(|(_, &k)| k != 3) {
        return Err(Error::ProtocolViolation(format!(
            "class {c} has {k} samples, expected 3"
        )));
    }
    Ok(std::array::from_fn(|r| {
        let (test, train) = (0..labels.len()).partition(|&i| rank[i] == r);
        Split { train, test }
    }))
}
