use std::fmt::Write as _;

use crate::classify::{rotations, LabeledDataset};
use crate::error::{Error, Result};

/// Spread floor applied to zero-variance features.
pub const SIGMA_FLOOR: f64 = 1e-8;

/// Comparisons made by the 1-to-1 protocol with `n_g` enrolled subjects,
/// `n_tr` templates and `n_ts` test samples each.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ComparisonCounts {
    pub genuine: u64,
    pub imposter: u64,
    pub total: u64,
}

pub fn comparison_counts(n_g: u64, n_tr: u64, n_ts: u64) -> Result<ComparisonCounts> {
    if n_g == 0 {
        return Err(Error::invalid("no enrolled subjects"));
    }
    let overflow = || Error::invalid("comparison count overflows 64 bits");
    let genuine = n_tr
        .checked_mul(n_g)
        .and_then(|x| x.checked_mul(n_ts))
        .ok_or_else(overflow)?;
    let imposter = n_tr
        .checked_mul(n_g - 1)
        .and_then(|x| x.checked_mul(n_g))
        .ok_or_else(overflow)?;
    let total = genuine.checked_add(imposter).ok_or_else(overflow)?;
    Ok(ComparisonCounts {
        genuine,
        imposter,
        total,
    })
}

/// sqrt(Σ (a_j − b_j)² / σ_j²).
pub fn standardized_distance(a: &[f64], b: &[f64], sigma: &[f64]) -> Result<f64> {
    if a.len() != b.len() || a.len() != sigma.len() {
        return Err(Error::invalid(format!(
            "lengths {} / {} / {}",
            a.len(),
            b.len(),
            sigma.len()
        )));
    }
    let mut s = 0.0;
    for (j, ((x, y), sd)) in a.iter().zip(b).zip(sigma).enumerate() {
        if *sd <= 0.0 {
            return Err(Error::ZeroVariance(j));
        }
        let d = (x - y) / sd;
        s += d * d;
    }
    Ok(s.sqrt())
}

/// Per-feature sample standard deviations of the enrolled vectors, with zero
/// spreads raised to [`SIGMA_FLOOR`]. The floored columns are listed.
pub fn estimate_sigma(rows: &[Vec<f64>]) -> Result<(Vec<f64>, Vec<usize>)> {
    if rows.len() < 2 {
        return Err(Error::invalid("need at least two enrolled vectors to estimate spreads"));
    }
    let n = rows.len() as f64;
    let dim = rows[0].len();
    let mut sigma = Vec::with_capacity(dim);
    let mut floored = Vec::new();
    for j in 0..dim {
        let m = rows.iter().map(|r| r[j]).sum::<f64>() / n;
        let v = rows.iter().map(|r| (r[j] - m).powi(2)).sum::<f64>() / (n - 1.0);
        let s = v.sqrt();
        if s > SIGMA_FLOOR && s.is_finite() {
            sigma.push(s);
        } else {
            sigma.push(SIGMA_FLOOR);
            floored.push(j);
        }
    }
    Ok((sigma, floored))
}

/// `points` thresholds evenly spanning [lo, hi].
pub fn uniform_grid(lo: f64, hi: f64, points: usize) -> Result<Vec<f64>> {
    if points < 2 || !(lo.is_finite() && hi.is_finite()) || hi < lo {
        return Err(Error::invalid(
            "grid needs two or more points over a finite, ordered span",
        ));
    }
    Ok((0..points)
        .map(|i| {
            if i + 1 == points {
                hi
            } else {
                lo + (hi - lo) * i as f64 / (points - 1) as f64
            }
        })
        .collect())
}

/// FAR and FRR over a threshold grid. A claim is accepted when its distance is
/// at most the threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub thresholds: Vec<f64>,
    /// None when there were no imposter claims.
    pub far: Option<Vec<f64>>,
    /// None when there were no genuine claims.
    pub frr: Option<Vec<f64>>,
    pub eer: Option<f64>,
    pub eer_threshold: Option<f64>,
}

fn rates(scores: &[f64], grid: &[f64], accepted: bool) -> Option<Vec<f64>> {
    if scores.is_empty() {
        return None;
    }
    let mut sorted = scores.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    Some(
        grid.iter()
            .map(|&t| {
                let below = sorted.partition_point(|&d| d <= t) as f64;
                if accepted {
                    below / n
                } else {
                    1.0 - below / n
                }
            })
            .collect(),
    )
}

/// EER from the first grid point where FAR reaches FRR, interpolated linearly
/// from the point before.
fn equal_error(grid: &[f64], far: &[f64], frr: &[f64]) -> (f64, f64) {
    let diff = |i: usize| far[i] - frr[i];
    match (0..grid.len()).find(|&i| diff(i) >= 0.0) {
        Some(0) => {
            let e = if diff(0) == 0.0 {
                far[0]
            } else {
                (far[0] + frr[0]) / 2.0
            };
            (e, grid[0])
        }
        Some(i) => {
            let (d0, d1) = (diff(i - 1), diff(i));
            let u = -d0 / (d1 - d0);
            let t = grid[i - 1] + u * (grid[i] - grid[i - 1]);
            (far[i - 1] + u * (far[i] - far[i - 1]), t)
        }
        None => {
            let i = grid.len() - 1;
            ((far[i] + frr[i]) / 2.0, grid[i])
        }
    }
}

pub fn sweep(genuine: &[f64], imposter: &[f64], grid: &[f64]) -> Result<Sweep> {
    if grid.is_empty() {
        return Err(Error::invalid("empty threshold grid"));
    }
    if grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::invalid("threshold grid must be ascending"));
    }
    if genuine.is_empty() && imposter.is_empty() {
        return Err(Error::EmptyInput("no claims to sweep".into()));
    }
    let far = rates(imposter, grid, true);
    let frr = rates(genuine, grid, false);
    let (eer, eer_threshold) = match (&far, &frr) {
        (Some(a), Some(r)) => {
            let (e, t) = equal_error(grid, a, r);
            (Some(e), Some(t))
        }
        _ => (None, None),
    };
    Ok(Sweep {
        thresholds: grid.to_vec(),
        far,
        frr,
        eer,
        eer_threshold,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub sweep: Sweep,
    /// Claim distances: each probe against its own identity.
    pub genuine_scores: Vec<f64>,
    /// Claim distances: each probe against every other enrolled identity.
    pub imposter_scores: Vec<f64>,
    /// Template-level counts for the enrolled population.
    pub counts: ComparisonCounts,
    pub enrolled_subjects: usize,
    pub probes: usize,
    /// Feature columns whose spread was floored.
    pub floored: Vec<usize>,
}

impl VerificationReport {
    /// Plot-ready `threshold,far,frr` lines; missing rates are written `na`.
    pub fn curve_csv(&self) -> String {
        let mut s = String::from("threshold,far,frr\n");
        let fmt = |v: Option<&Vec<f64>>, i: usize| v.map_or("na".to_string(), |r| format!("{:.6}", r[i]));
        for (i, t) in self.sweep.thresholds.iter().enumerate() {
            let _ = writeln!(
                s,
                "{t:.6},{},{}",
                fmt(self.sweep.far.as_ref(), i),
                fmt(self.sweep.frr.as_ref(), i)
            );
        }
        s
    }

    pub fn summary(&self) -> String {
        match (self.sweep.eer, self.sweep.eer_threshold) {
            (Some(e), Some(t)) => format!("EER={e:.4} at t={t:.4}"),
            _ => "EER=na at t=na".to_string(),
        }
    }
}

/// Enrolled templates grouped by identity.
struct Gallery<'a> {
    ids: Vec<usize>,
    templates: Vec<Vec<&'a [f64]>>,
}

impl<'a> Gallery<'a> {
    fn new(rows: &'a [Vec<f64>], labels: &[usize]) -> Self {
        let mut ids: Vec<usize> = labels.to_vec();
        ids.sort_unstable();
        ids.dedup();
        let mut templates = vec![Vec::new(); ids.len()];
        for (r, l) in rows.iter().zip(labels) {
            let k = ids.binary_search(l).expect("label is enrolled");
            templates[k].push(r.as_slice());
        }
        Gallery { ids, templates }
    }
}

/// Claim-level sweep: a probe claiming identity g is scored by its smallest
/// standardized distance to g's templates. Probes labelled `None` come from
/// outside the gallery and only make imposter claims.
pub fn verification_sweep(
    enrolled: &[Vec<f64>],
    enrolled_labels: &[usize],
    probes: &[Vec<f64>],
    probe_labels: &[Option<usize>],
    grid_points: usize,
) -> Result<VerificationReport> {
    if probes.is_empty() {
        return Err(Error::EmptyInput("no probes".into()));
    }
    if enrolled.len() != enrolled_labels.len() || probes.len() != probe_labels.len() {
        return Err(Error::invalid("rows and labels differ in length"));
    }
    if grid_points < 100 {
        return Err(Error::invalid("the threshold grid needs at least 100 points"));
    }
    let (sigma, floored) = estimate_sigma(enrolled)?;
    let gallery = Gallery::new(enrolled, enrolled_labels);
    let n_tr = gallery.templates[0].len();
    let mut genuine = Vec::new();
    let mut imposter = Vec::new();
    for (p, label) in probes.iter().zip(probe_labels) {
        if let Some(l) = label {
            if gallery.ids.binary_search(l).is_err() {
                return Err(Error::invalid(format!("probe claims unenrolled identity {l}")));
            }
        }
        for (id, temps) in gallery.ids.iter().zip(&gallery.templates) {
            let mut best = f64::INFINITY;
            for t in temps {
                best = best.min(standardized_distance(p, t, &sigma)?);
            }
            if *label == Some(*id) {
                genuine.push(best);
            } else {
                imposter.push(best);
            }
        }
    }
    let lo = genuine.iter().chain(&imposter).copied().fold(f64::INFINITY, f64::min);
    let hi = genuine
        .iter()
        .chain(&imposter)
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    let grid = uniform_grid(lo, hi, grid_points)?;
    let n_g = gallery.ids.len() as u64;
    let in_gallery = probe_labels.iter().filter(|l| l.is_some()).count() as u64;
    let counts = comparison_counts(n_g, n_tr as u64, in_gallery / n_g)?;
    Ok(VerificationReport {
        sweep: sweep(&genuine, &imposter, &grid)?,
        genuine_scores: genuine,
        imposter_scores: imposter,
        counts,
        enrolled_subjects: gallery.ids.len(),
        probes: probes.len(),
        floored,
    })
}

/// Closed-set verification on one rotation: two samples per subject enrolled,
/// the third used as a probe.
pub fn closed_set_verification(
    data: &LabeledDataset,
    features: &[usize],
    rotation: usize,
    grid_points: usize,
) -> Result<VerificationReport> {
    if rotation > 2 {
        return Err(Error::invalid("rotation must be 0, 1 or 2"));
    }
    let rows = data.project(features)?;
    let split = &rotations(&data.labels)?[rotation];
    let pick = |idx: &[usize]| -> Vec<Vec<f64>> { idx.iter().map(|&i| rows[i].clone()).collect() };
    let enrolled_labels: Vec<usize> = split.train.iter().map(|&i| data.labels[i]).collect();
    let probe_labels: Vec<Option<usize>> = split.test.iter().map(|&i| Some(data.labels[i])).collect();
    verification_sweep(
        &pick(&split.train),
        &enrolled_labels,
        &pick(&split.test),
        &probe_labels,
        grid_points,
    )
}

/// Enrolls the genuine subjects' first two samples; probes are their third
/// samples plus every sample of the disjoint imposter subjects.
pub fn disjoint_imposter_protocol(
    genuine: &LabeledDataset,
    imposters: &LabeledDataset,
    features: &[usize],
    grid_points: usize,
) -> Result<VerificationReport> {
    if let Some(s) = imposters.subjects.iter().find(|s| genuine.subjects.contains(s)) {
        return Err(Error::invalid(format!(
            "subject {s} appears among both genuine and imposter subjects"
        )));
    }
    let rows = genuine.project(features)?;
    let split = &rotations(&genuine.labels)?[2];
    let enrolled: Vec<Vec<f64>> = split.train.iter().map(|&i| rows[i].clone()).collect();
    let enrolled_labels: Vec<usize> = split.train.iter().map(|&i| genuine.labels[i]).collect();
    let mut probes: Vec<Vec<f64>> = split.test.iter().map(|&i| rows[i].clone()).collect();
    let mut probe_labels: Vec<Option<usize>> = split.test.iter().map(|&i| Some(genuine.labels[i])).collect();
    for r in imposters.project(features)? {
        probes.push(r);
        probe_labels.push(None);
    }
    verification_sweep(&enrolled, &enrolled_labels, &probes, &probe_labels, grid_points)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn published_count_instance() {
        let c = comparison_counts(638, 2, 1).unwrap();
        assert_eq!((c.genuine, c.imposter, c.total), (1276, 812812, 814088));
        assert!(comparison_counts(0, 2, 1).is_err());
        assert!(comparison_counts(u64::MAX, 2, 1).is_err());
    }

    #[test]
    fn distance_examples() {
        assert_eq!(
            standardized_distance(&[1.0, 2.0], &[1.0, 2.0], &[1.0, 3.0]).unwrap(),
            0.0
        );
        assert_eq!(
            standardized_distance(&[3.0, 4.0], &[0.0, 0.0], &[1.0, 1.0]).unwrap(),
            5.0
        );
        assert_eq!(
            standardized_distance(&[2.0, 0.0], &[0.0, 0.0], &[2.0, 1.0]).unwrap(),
            1.0
        );
        assert!(matches!(
            standardized_distance(&[1.0], &[0.0], &[0.0]),
            Err(Error::ZeroVariance(0))
        ));
    }

    #[test]
    fn separable_claims_give_zero_eer() {
        let grid: Vec<f64> = (0..=50).map(|i| i as f64 * 0.1).collect();
        assert!(grid.contains(&2.5));
        let s = sweep(&[1.0, 2.0], &[3.0, 4.0], &grid).unwrap();
        assert_eq!(s.eer, Some(0.0));
        let far = s.far.unwrap();
        let frr = s.frr.unwrap();
        assert!(far.windows(2).all(|w| w[0] <= w[1]));
        assert!(frr.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn interpolated_crossing() {
        // FAR 0 -> 1 and FRR 1 -> 0 between the two grid points
        let s = sweep(&[1.0], &[1.0], &[0.5, 1.5]).unwrap();
        assert_eq!(s.eer, Some(0.5));
        assert_eq!(s.eer_threshold, Some(1.0));
    }

    #[test]
    fn missing_imposters_mean_no_far() {
        let s = sweep(&[1.0, 2.0], &[], &[0.0, 3.0]).unwrap();
        assert!(s.far.is_none() && s.eer.is_none());
        assert!(sweep(&[], &[], &[1.0]).is_err());
    }

    #[test]
    fn floored_sigma_is_reported() {
        let (s, floored) = estimate_sigma(&[vec![1.0, 5.0], vec![3.0, 5.0]]).unwrap();
        assert_eq!(floored, vec![1]);
        assert_eq!(s[1], SIGMA_FLOOR);
        assert!((s[0] - 2f64.sqrt()).abs() < 1e-12);
    }
}
