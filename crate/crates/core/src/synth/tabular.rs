//! Feature tables with planted signal, for exercising selection and
//! classification without rendering images.

use rand_distr::{Distribution, Normal};

use crate::classify::LabeledDataset;
use crate::error::{Error, Result};
use crate::seed;

/// `subjects` classes with `samples` rows each. Feature j of subject c is
/// `strengths[j] * mu[c][j] + e` with `mu` and `e` standard normal, so the
/// strength is the feature's between/within spread ratio. Rows are grouped by
/// sample: every subject's first sample, then every second sample, and so on.
pub fn planted_corpus(subjects: usize, samples: usize, strengths: &[f64], seed: u64) -> Result<LabeledDataset> {
    if subjects < 2 || samples == 0 || strengths.is_empty() {
        return Err(Error::invalid("need at least 2 subjects, 1 sample and 1 feature"));
    }
    if strengths.iter().any(|s| !s.is_finite() || *s < 0.0) {
        return Err(Error::invalid("strengths must be finite and non-negative"));
    }
    let unit = Normal::new(0.0, 1.0).expect("unit normal");
    let mut rng = seed::rng(seed);
    let means: Vec<Vec<f64>> = (0..subjects)
        .map(|_| strengths.iter().map(|s| s * unit.sample(&mut rng)).collect())
        .collect();
    let mut rows = Vec::with_capacity(subjects * samples);
    let mut labels = Vec::with_capacity(subjects * samples);
    for _ in 0..samples {
        for (c, mu) in means.iter().enumerate() {
            rows.push(mu.iter().map(|m| m + unit.sample(&mut rng)).collect());
            labels.push(c);
        }
    }
    LabeledDataset::new(rows, labels)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_and_determinism() {
        let d = planted_corpus(4, 3, &[1.0, 0.0], 9).unwrap();
        assert_eq!(d.len(), 12);
        assert_eq!(d.width(), 2);
        assert_eq!(&d.labels[..5], &[0, 1, 2, 3, 0]);
        assert_eq!(d, planted_corpus(4, 3, &[1.0, 0.0], 9).unwrap());
        assert!(planted_corpus(1, 3, &[1.0], 0).is_err());
        assert!(planted_corpus(3, 3, &[-1.0], 0).is_err());
    }
}
