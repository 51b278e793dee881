use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Metric {
    #[default]
    Euclidean,
    /// 1 − Pearson correlation.
    Pearson,
}

impl Metric {
    pub fn as_str(self) -> &'static str {
        match self {
            Metric::Euclidean => "euclidean",
            Metric::Pearson => "pearson",
        }
    }

    pub fn distance(self, a: &[f64], b: &[f64]) -> Result<f64> {
        match self {
            Metric::Euclidean => Ok(euclidean(a, b)),
            Metric::Pearson => Ok(1.0 - pearson(a, b)?),
        }
    }
}

impl std::str::FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "euclidean" | "ed" => Ok(Metric::Euclidean),
            "pearson" | "pc" => Ok(Metric::Pearson),
            _ => Err(Error::invalid(format!("unknown metric '{s}'"))),
        }
    }
}

pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Pearson correlation coefficient of two equally long vectors.
pub fn pearson(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::invalid(format!("length mismatch: {} vs {}", u.len(), v.len())));
    }
    if u.len() < 2 {
        return Err(Error::invalid("correlation needs at least two values"));
    }
    let n = u.len() as f64;
    let mu = u.iter().sum::<f64>() / n;
    let mv = v.iter().sum::<f64>() / n;
    let (mut suv, mut suu, mut svv) = (0.0, 0.0, 0.0);
    for (a, b) in u.iter().zip(v) {
        let (a, b) = (a - mu, b - mv);
        suv += a * b;
        suu += a * a;
        svv += b * b;
    }
    if suu == 0.0 || svv == 0.0 {
        return Err(Error::UndefinedCorrelation);
    }
    Ok((suv / (suu.sqrt() * svv.sqrt())).clamp(-1.0, 1.0))
}

/// Stored training set for nearest-neighbour lookups.
#[derive(Debug, Clone, PartialEq)]
pub struct KnnModel {
    rows: Vec<Vec<f64>>,
    labels: Vec<usize>,
    k: usize,
    metric: Metric,
}

impl KnnModel {
    pub fn new(rows: Vec<Vec<f64>>, labels: Vec<usize>, k: usize, metric: Metric) -> Result<Self> {
        if rows.len() != labels.len() {
            return Err(Error::invalid(format!(
                "{} rows but {} labels",
                rows.len(),
                labels.len()
            )));
        }
        if k == 0 || k > rows.len() {
            return Err(Error::invalid(format!("k = {k} with {} training vectors", rows.len())));
        }
        let dim = rows[0].len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::invalid("ragged training rows"));
        }
        Ok(KnnModel {
            rows,
            labels,
            k,
            metric,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.rows[0].len()
    }

    /// Indices of the k nearest training vectors, nearest first; equal
    /// distances go to the lower index.
    pub fn neighbors(&self, query: &[f64]) -> Result<Vec<(usize, f64)>> {
        if query.len() != self.dim() {
            return Err(Error::invalid(format!(
                "query has {} values, model expects {}",
                query.len(),
                self.dim()
            )));
        }
        let mut d = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| Ok((i, self.metric.distance(query, r)?)))
            .collect::<Result<Vec<_>>>()?;
        let order = |a: &(usize, f64), b: &(usize, f64)| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0));
        if self.k < d.len() {
            d.select_nth_unstable_by(self.k - 1, order);
            d.truncate(self.k);
        }
        d.sort_by(order);
        Ok(d)
    }

    /// Majority label among the k nearest; vote ties go to the smallest label.
    pub fn classify(&self, query: &[f64]) -> Result<usize> {
        let nb = self.neighbors(query)?;
        let mut votes: Vec<(usize, usize)> = Vec::with_capacity(nb.len());
        for (i, _) in nb {
            let l = self.labels[i];
            match votes.iter_mut().find(|(c, _)| *c == l) {
                Some(v) => v.1 += 1,
                None => votes.push((l, 1)),
            }
        }
        let best = votes.iter().map(|v| v.1).max().expect("k >= 1");
        Ok(votes
            .iter()
            .filter(|v| v.1 == best)
            .map(|v| v.0)
            .min()
            .expect("non-empty vote"))
    }
}

/// Per-column mean and standard deviation of `rows`; zero spreads become 1 so
/// constant columns drop out of distance comparisons.
pub fn column_scale(rows: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
    let dim = rows.first().map_or(0, Vec::len);
    let n = rows.len().max(1) as f64;
    let mut mean = vec![0.0; dim];
    for r in rows {
        for (m, x) in mean.iter_mut().zip(r) {
            *m += x;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n);
    let mut sd = vec![0.0; dim];
    for r in rows {
        for ((s, x), m) in sd.iter_mut().zip(r).zip(&mean) {
            *s += (x - m) * (x - m);
        }
    }
    for s in &mut sd {
        *s = (*s / n).sqrt();
        if *s == 0.0 || !s.is_finite() {
            *s = 1.0;
        }
    }
    (mean, sd)
}

pub fn apply_scale(rows: &[Vec<f64>], mean: &[f64], sd: &[f64]) -> Vec<Vec<f64>> {
    rows.iter()
        .map(|r| r.iter().zip(mean).zip(sd).map(|((x, m), s)| (x - m) / s).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn pearson_examples() {
        let u = [1.0, 2.0, 3.0];
        assert!((pearson(&u, &u).unwrap() - 1.0).abs() < 1e-12);
        assert!((pearson(&u, &[-1.0, -2.0, -3.0]).unwrap() + 1.0).abs() < 1e-12);
        let r = pearson(&u, &[1.0, 2.0, 4.0]).unwrap();
        // centered: (-1, 0, 1) and (-4/3, -1/3, 5/3)
        let oracle = 3.0 / (2.0f64 * (14.0 / 3.0)).sqrt();
        assert!((r - oracle).abs() < 1e-12);
        assert!((r - 0.9820).abs() < 1e-4);
        assert!(matches!(
            pearson(&[2.0, 2.0, 2.0], &u),
            Err(Error::UndefinedCorrelation)
        ));
        assert!(pearson(&[1.0], &[1.0]).is_err());
    }

    #[test]
    fn nearest_vector_wins() {
        let m = KnnModel::new(
            vec![vec![0.0], vec![5.0], vec![9.0]],
            vec![2, 0, 1],
            1,
            Metric::Euclidean,
        )
        .unwrap();
        assert_eq!(m.classify(&[5.0]).unwrap(), 0);
        assert_eq!(m.classify(&[8.0]).unwrap(), 1);
        assert!(m.classify(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn nearer_class_wins_at_k3() {
        // class 1 at distances 1 and 2, class 0 at distance 5
        let m = KnnModel::new(
            vec![vec![5.0], vec![1.0], vec![2.0], vec![20.0]],
            vec![0, 1, 1, 0],
            3,
            Metric::Euclidean,
        )
        .unwrap();
        assert_eq!(m.classify(&[0.0]).unwrap(), 1);
    }

    #[test]
    fn ties_use_lower_index_and_smaller_class() {
        let m = KnnModel::new(vec![vec![1.0], vec![-1.0]], vec![7, 3], 1, Metric::Euclidean).unwrap();
        assert_eq!(m.classify(&[0.0]).unwrap(), 7);
        let m = KnnModel::new(vec![vec![1.0], vec![-1.0]], vec![7, 3], 2, Metric::Euclidean).unwrap();
        assert_eq!(m.classify(&[0.0]).unwrap(), 3);
    }

    #[test]
    fn invalid_k() {
        assert!(KnnModel::new(vec![vec![1.0]], vec![0], 0, Metric::Euclidean).is_err());
        assert!(KnnModel::new(vec![vec![1.0]], vec![0], 2, Metric::Euclidean).is_err());
    }

    #[test]
    fn pearson_metric_ignores_scale() {
        let m = KnnModel::new(
            vec![vec![1.0, 2.0, 3.0], vec![3.0, 1.0, 2.0]],
            vec![0, 1],
            1,
            Metric::Pearson,
        )
        .unwrap();
        assert_eq!(m.classify(&[10.0, 20.0, 30.0]).unwrap(), 0);
    }

    proptest! {
        #[test]
        fn pearson_is_affine_invariant(
            u in prop::collection::vec(-100.0f64..100.0, 3..20),
            seed in prop::collection::vec(-100.0f64..100.0, 20),
            a in 0.01f64..50.0,
            b in -100.0f64..100.0,
        ) {
            let v = &seed[..u.len()];
            if let Ok(r) = pearson(&u, v) {
                let w: Vec<f64> = u.iter().map(|x| a * x + b).collect();
                let r2 = pearson(&w, v).unwrap();
                prop_assert!((r - r2).abs() <= 1e-9);
                prop_assert!((-1.0..=1.0).contains(&r));
            }
        }

        #[test]
        fn k1_has_zero_resubstitution_error(
            pts in prop::collection::vec((-50i32..50, -50i32..50), 2..30),
        ) {
            let mut rows: Vec<Vec<f64>> = pts.iter().map(|&(x, y)| vec![x as f64, y as f64]).collect();
            rows.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
            rows.dedup();
            let labels: Vec<usize> = (0..rows.len()).map(|i| i % 3).collect();
            let m = KnnModel::new(rows.clone(), labels.clone(), 1, Metric::Euclidean).unwrap();
            for (r, l) in rows.iter().zip(&labels) {
                prop_assert_eq!(m.classify(r).unwrap(), *l);
            }
        }
    }
}
