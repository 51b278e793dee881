use handgeom::classify::{
    cross_validate, rotation_accuracies, train_forest, Classifier, ForestConfig, KnnConfig, KnnModel, Metric,
};
use handgeom::seed;
use handgeom::synth::planted_corpus;
use proptest::prelude::*;
use rand::Rng;

fn random_rows(n: usize, d: usize, seed_: u64) -> Vec<Vec<f64>> {
    let mut rng = seed::rng(seed_);
    (0..n)
        .map(|_| (0..d).map(|_| rng.random_range(-5.0..5.0)).collect())
        .collect()
}

/// Straight textbook formulas, written independently of the library.
fn brute_distance(metric: Metric, a: &[f64], b: &[f64]) -> f64 {
    match metric {
        Metric::Euclidean => a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt(),
        Metric::Pearson => {
            let n = a.len() as f64;
            let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
            let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
            let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
            let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
            1.0 - cov / (va * vb).sqrt()
        }
    }
}

#[test]
fn nearest_neighbour_matches_brute_force() {
    let train = random_rows(300, 6, 1);
    let labels: Vec<usize> = (0..300).map(|i| i % 17).collect();
    let queries = random_rows(100, 6, 2);
    for metric in [Metric::Euclidean, Metric::Pearson] {
        let model = KnnModel::new(train.clone(), labels.clone(), 1, metric).unwrap();
        for q in &queries {
            let best = (0..train.len())
                .min_by(|&i, &j| brute_distance(metric, q, &train[i]).total_cmp(&brute_distance(metric, q, &train[j])))
                .unwrap();
            assert_eq!(model.classify(q).unwrap(), labels[best], "{metric:?}");
            let nn = model.neighbors(q).unwrap();
            assert!((nn[0].1 - brute_distance(metric, q, &train[best])).abs() < 1e-9);
        }
    }
}

#[test]
fn knn_vote_follows_the_k_nearest() {
    let train = random_rows(120, 4, 3);
    let labels: Vec<usize> = (0..120).map(|i| i % 5).collect();
    let model = KnnModel::new(train.clone(), labels.clone(), 5, Metric::Euclidean).unwrap();
    for q in random_rows(50, 4, 4) {
        let mut order: Vec<usize> = (0..train.len()).collect();
        order.sort_by(|&i, &j| {
            brute_distance(Metric::Euclidean, &q, &train[i]).total_cmp(&brute_distance(
                Metric::Euclidean,
                &q,
                &train[j],
            ))
        });
        let mut votes = [0usize; 5];
        order[..5].iter().for_each(|&i| votes[labels[i]] += 1);
        let top = *votes.iter().max().unwrap();
        let want = votes.iter().position(|&v| v == top).unwrap();
        assert_eq!(model.classify(&q).unwrap(), want);
    }
}

#[test]
fn cross_validation_on_twinned_data_is_error_free() {
    // Every sample appears twice. A class holds at most as many rows as there
    // are folds, so stratified dealing never puts both twins in one test fold
    // and each test row finds its twin at distance zero.
    let base = planted_corpus(40, 3, &[0.5; 6], 11).unwrap();
    let mut rows = base.rows.clone();
    rows.extend(base.rows.iter().cloned());
    let mut labels = base.labels.clone();
    labels.extend(base.labels.iter().copied());
    for s in 0..3 {
        let cv = cross_validate(&rows, &labels, 10, &KnnConfig::default(), s).unwrap();
        assert_eq!(cv.mean_error, 0.0);
        assert!(cv.fold_errors.iter().all(|&e| e == 0.0));
    }
}

#[test]
fn cross_validation_error_grows_with_k() {
    let d = planted_corpus(60, 3, &[2.0, 1.5, 1.0, 0.8, 0.5], 5).unwrap();
    let err: Vec<f64> = (1..=5)
        .map(|k| {
            let clf = KnnConfig {
                k,
                ..KnnConfig::default()
            };
            cross_validate(&d.rows, &d.labels, 10, &clf, 1).unwrap().mean_error
        })
        .collect();
    for w in err.windows(2) {
        assert!(w[1] >= w[0] - 0.02, "{err:?}");
    }
    assert!(err[4] > err[0], "{err:?}");
}

#[test]
fn shuffled_labels_sit_at_chance() {
    let n_classes = 10;
    let mut total = 0.0;
    let seeds = 8;
    for s in 0..seeds {
        let rows = random_rows(300, 5, 100 + s);
        let mut rng = seed::rng(200 + s);
        let labels: Vec<usize> = (0..300).map(|_| rng.random_range(0..n_classes)).collect();
        let cv = cross_validate(&rows, &labels, 10, &KnnConfig::default(), s).unwrap();
        total += 1.0 - cv.mean_error;
    }
    let acc = total / seeds as f64;
    assert!((acc - 0.1).abs() <= 0.05, "accuracy {acc}");
}

fn relabel_check(clf: &dyn Classifier) {
    let d = planted_corpus(15, 3, &[1.0, 0.7, 0.4], 8).unwrap();
    let perm: Vec<usize> = (0..15).map(|c| (c * 7 + 3) % 15).collect();
    let train: Vec<usize> = (0..30).collect();
    let test: Vec<usize> = (30..45).collect();
    let pick = |idx: &[usize]| -> Vec<Vec<f64>> { idx.iter().map(|&i| d.rows[i].clone()).collect() };
    let y: Vec<usize> = train.iter().map(|&i| d.labels[i]).collect();
    let y_perm: Vec<usize> = y.iter().map(|&l| perm[l]).collect();
    let a = clf.fit_predict(&pick(&train), &y, &pick(&test)).unwrap();
    let b = clf.fit_predict(&pick(&train), &y_perm, &pick(&test)).unwrap();
    assert_eq!(a.iter().map(|&l| perm[l]).collect::<Vec<_>>(), b);
}

#[test]
fn predictions_follow_a_relabelling() {
    relabel_check(&KnnConfig::default());
    relabel_check(&KnnConfig {
        metric: Metric::Pearson,
        ..KnnConfig::default()
    });
    relabel_check(&ForestConfig { n_trees: 60, seed: 4 });
}

#[test]
fn forest_scores_genuine_class_above_every_imposter() {
    let d = planted_corpus(40, 3, &[8.0, 8.0, 6.0, 6.0, 4.0, 4.0], 21).unwrap();
    let train: Vec<usize> = (0..80).collect();
    let rows: Vec<Vec<f64>> = train.iter().map(|&i| d.rows[i].clone()).collect();
    let labels: Vec<usize> = train.iter().map(|&i| d.labels[i]).collect();
    let f = train_forest(&rows, &labels, 150, 2).unwrap();
    let mut wins = 0;
    for i in 80..120 {
        let p = f.distribution(&d.rows[i]).unwrap();
        let g = d.labels[i];
        let imposter = p
            .iter()
            .enumerate()
            .filter(|(c, _)| *c != g)
            .map(|(_, v)| *v)
            .fold(0.0, f64::max);
        if p[g] > imposter {
            wins += 1;
        }
    }
    assert!(wins as f64 >= 0.95 * 40.0, "{wins}/40");
}

#[test]
fn out_of_bag_error_does_not_grow_with_more_trees() {
    let d = planted_corpus(50, 3, &[1.5, 1.2, 1.0, 0.8, 0.6, 0.4], 31).unwrap();
    let full = train_forest(&d.rows, &d.labels, 150, 9).unwrap();
    let est: Vec<_> = [50, 100, 150]
        .iter()
        .map(|&n| full.truncated(n).unwrap().oob_error(&d.rows, &d.labels).unwrap())
        .collect();
    assert!(est[2].error <= est[0].error, "{est:?}");
    assert_eq!(est[2].total, d.len());
    assert_eq!(est[2].covered, d.len());
    assert!(est[0].covered <= est[2].covered);
}

#[test]
fn rotation_protocol_on_strong_signal_is_perfect() {
    let d = planted_corpus(30, 3, &[20.0; 6], 3).unwrap();
    assert_eq!(
        rotation_accuracies(&d.rows, &d.labels, &KnnConfig::default()).unwrap(),
        [1.0; 3]
    );
    assert_eq!(
        rotation_accuracies(&d.rows, &d.labels, &ForestConfig { n_trees: 30, seed: 1 }).unwrap(),
        [1.0; 3]
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn knn_ignores_row_order(seed_ in 0u64..1000) {
        let train = random_rows(40, 3, seed_);
        let labels: Vec<usize> = (0..40).map(|i| i % 4).collect();
        let q = random_rows(10, 3, seed_ + 1);
        let a = KnnModel::new(train.clone(), labels.clone(), 1, Metric::Euclidean).unwrap();
        let rev_rows: Vec<Vec<f64>> = train.iter().rev().cloned().collect();
        let rev_labels: Vec<usize> = labels.iter().rev().copied().collect();
        let b = KnnModel::new(rev_rows, rev_labels, 1, Metric::Euclidean).unwrap();
        for x in &q {
            prop_assert_eq!(a.classify(x).unwrap(), b.classify(x).unwrap());
        }
    }
}
