use handgeom::batch::reference_features;
use handgeom::features::{extract_features, set_a2, FingerShape, HandFeatureVector};
use handgeom::imaging::{rotate_gray_with, Border, RotationFrame};
use handgeom::profile::{extract_profiles, FingerSet, PipelineParams};
use handgeom::synth::{draw_anatomy, generate_hand, render_hand, HandParams};
use handgeom::{GrayImage, Hand, Point};

fn fingers(img: &GrayImage, hand: Hand) -> FingerSet {
    extract_profiles(img, hand, &PipelineParams::default()).unwrap()
}

/// Centroidal distances read off a 1000-entry table of points spaced equally
/// along the closed outline.
fn dense_oracle(boundary: &[Point], region: &[Point]) -> [f64; 10] {
    let n = region.len() as f64;
    let xc = region.iter().map(|p| p.x as f64).sum::<f64>() / n;
    let yc = region.iter().map(|p| p.y as f64).sum::<f64>() / n;
    let pts: Vec<(f64, f64)> = boundary.iter().map(|p| (p.x as f64, p.y as f64)).collect();
    let mut closed = pts.clone();
    closed.push(pts[0]);
    let seg: Vec<f64> = closed
        .windows(2)
        .map(|w| (w[1].0 - w[0].0).hypot(w[1].1 - w[0].1))
        .collect();
    let total: f64 = seg.iter().sum();
    let mut table = Vec::with_capacity(1000);
    let (mut i, mut start) = (0usize, 0.0f64);
    for j in 0..1000 {
        let s = total * j as f64 / 1000.0;
        while start + seg[i] < s {
            start += seg[i];
            i += 1;
        }
        let u = if seg[i] > 0.0 { (s - start) / seg[i] } else { 0.0 };
        let (a, b) = (closed[i], closed[i + 1]);
        table.push((a.0 + u * (b.0 - a.0), a.1 + u * (b.1 - a.1)));
    }
    let mut out = [0.0; 10];
    for (k, d) in out.iter_mut().enumerate() {
        let (x, y) = table[100 * k];
        *d = (x - xc).hypot(y - yc);
    }
    out
}

#[test]
fn centroidal_distances_match_dense_arc_length_table() {
    let params = HandParams::default();
    for s in 0..4u64 {
        let (img, truth) = generate_hand(&params, 300 + s, s).unwrap();
        let set = fingers(&img, truth.hand);
        for f in &set.fingers {
            let shape = FingerShape::from(f);
            let b = set_a2(&shape).unwrap();
            let oracle = dense_oracle(&shape.boundary, &shape.region.points());
            for k in 0..10 {
                assert!(
                    (b[k] - oracle[k]).abs() <= 1.0,
                    "finger {} b{}: {} vs {}",
                    f.index,
                    k + 1,
                    b[k],
                    oracle[k]
                );
            }
        }
    }
}

#[test]
fn nominal_hand_has_150_finite_values_and_is_deterministic() {
    let (img, truth) = generate_hand(&HandParams::default(), 11, 1).unwrap();
    let set = fingers(&img, truth.hand);
    let v = extract_features(&set, "11", "1").unwrap();
    assert_eq!(v.fingers.len(), 5);
    let all = v.flat(true);
    assert_eq!(all.len(), 150);
    assert_eq!(v.flat(false).len(), 120);
    assert!(all.iter().all(|x| x.is_finite() && *x >= 0.0));
    let again = extract_features(&set, "11", "1").unwrap();
    assert_eq!(
        all.iter().map(|x| x.to_bits()).collect::<Vec<_>>(),
        again.flat(true).iter().map(|x| x.to_bits()).collect::<Vec<_>>()
    );
}

fn median_relative_difference(a: &HandFeatureVector, b: &HandFeatureVector) -> f64 {
    let mut d: Vec<f64> = a
        .flat(true)
        .iter()
        .zip(b.flat(true))
        .map(|(x, y)| (x - y).abs() / x.abs().max(y.abs()).max(1e-9))
        .collect();
    d.sort_by(f64::total_cmp);
    d[d.len() / 2]
}

#[test]
fn samples_of_one_subject_agree() {
    let params = HandParams::default();
    for subject in 0..3u64 {
        let anatomy = draw_anatomy(&params, 900 + subject).unwrap();
        let vs: Vec<HandFeatureVector> = (0..3u64)
            .map(|k| {
                let (img, truth) = render_hand(&params, &anatomy, 40 + k).unwrap();
                extract_features(&fingers(&img, truth.hand), "s", "k").unwrap()
            })
            .collect();
        for i in 1..vs.len() {
            let m = median_relative_difference(&vs[0], &vs[i]);
            assert!(m <= 0.10, "subject {subject}: median relative difference {m:.3}");
        }
    }
}

#[test]
fn small_residual_rotation_barely_moves_features() {
    let (img, truth) = generate_hand(&HandParams::default(), 21, 2).unwrap();
    let base = extract_features(&fingers(&img, truth.hand), "a", "0").unwrap();
    let c = ((img.width() as f64 - 1.0) / 2.0, (img.height() as f64 - 1.0) / 2.0);
    for deg in [-5.0f64, 5.0] {
        let frame = RotationFrame::enclosing(img.width(), img.height(), deg.to_radians(), c);
        let rotated = rotate_gray_with(&img, &frame, Border::Replicate);
        let v = extract_features(&fingers(&rotated, truth.hand), "a", "1").unwrap();
        let m = median_relative_difference(&base, &v);
        assert!(m <= 0.05, "{deg} deg: median relative difference {m:.3}");
    }
}

#[test]
fn samples_scatter_closely_around_reference_values() {
    let params = HandParams::default();
    let pipeline = PipelineParams::default();
    for subject in 0..3u64 {
        let anatomy = draw_anatomy(&params, 700 + subject).unwrap();
        let reference = reference_features(&params, &anatomy, "r", &pipeline).unwrap();
        for k in 0..2u64 {
            let (img, truth) = render_hand(&params, &anatomy, 60 + k).unwrap();
            let v = extract_features(&fingers(&img, truth.hand), "r", "1").unwrap();
            let m = median_relative_difference(&reference, &v);
            assert!(
                m <= 0.10,
                "subject {subject} sample {k}: median relative difference {m:.3}"
            );
        }
    }
}
