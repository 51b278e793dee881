//! Thirty geometric features per finger: ten shape descriptors (a1..a10), ten
//! centroidal distances sampled along the outline (b1..b10) and ten widths
//! (c1..c10).

mod csv;
mod shape;

pub use csv::{read_features, write_features, FEATURE_HEADER};
pub use shape::{convex_hull_area, trace_boundary, FingerShape};

use crate::error::{Error, Result, Stage};
use crate::hand::Hand;
use crate::image::Point;
use crate::imaging::components::fill_holes;
use crate::imaging::moments::{mbr, moments};
use crate::profile::FingerSet;

pub const FEATURES_PER_SET: usize = 10;
pub const FEATURES_PER_FINGER: usize = 3 * FEATURES_PER_SET;

#[derive(Debug, Clone, PartialEq)]
pub struct FingerFeatures {
    /// Area (outline pixel count), MBR length, MBR width, major axis, minor
    /// axis, filled area, equivalent diameter, perimeter, solidity, extent.
    pub a: [f64; FEATURES_PER_SET],
    /// Centroidal distances of ten equally spaced outline points.
    pub b: [f64; FEATURES_PER_SET],
    /// Widths at ten equally spaced rows.
    pub c: [f64; FEATURES_PER_SET],
}

impl FingerFeatures {
    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.a.iter().chain(&self.b).chain(&self.c).copied()
    }

    pub fn from_values(v: &[f64]) -> Result<Self> {
        if v.len() != FEATURES_PER_FINGER {
            return Err(Error::invalid(format!(
                "expected {FEATURES_PER_FINGER} finger features, got {}",
                v.len()
            )));
        }
        let set = |k: usize| -> [f64; FEATURES_PER_SET] { v[k * 10..k * 10 + 10].try_into().expect("slice of ten") };
        Ok(FingerFeatures {
            a: set(0),
            b: set(1),
            c: set(2),
        })
    }
}

/// Features of one scanned hand, thumb first.
#[derive(Debug, Clone, PartialEq)]
pub struct HandFeatureVector {
    pub subject: String,
    pub sample: String,
    pub hand: Hand,
    pub fingers: Vec<FingerFeatures>,
}

impl HandFeatureVector {
    /// Concatenated features of the listed fingers (0 = thumb).
    pub fn values(&self, fingers: &[usize]) -> Vec<f64> {
        fingers.iter().flat_map(|&i| self.fingers[i].values()).collect()
    }

    /// All fingers, or all but the thumb.
    pub fn flat(&self, with_thumb: bool) -> Vec<f64> {
        let from = usize::from(!with_thumb);
        let idx: Vec<usize> = (from..self.fingers.len()).collect();
        self.values(&idx)
    }
}

fn fail(finger: usize, reason: impl Into<String>) -> Error {
    Error::FeatureFailure {
        finger,
        reason: reason.into(),
    }
}

/// Ten shape descriptors.
pub fn set_a1(shape: &FingerShape) -> Result<[f64; 10]> {
    let filled = fill_holes(&shape.region);
    let m = moments(&filled)?;
    let filled_area = m.m00;
    let bbox = mbr(&filled)?;
    let (len, wid) = (bbox.h.max(bbox.w) as f64, bbox.h.min(bbox.w) as f64);
    // Covariance of a pixel grid plus the 1/12 variance of each unit square,
    // so that axis lengths match the ellipse with the region's second moments.
    let (l1, l2) = m.principal_variances();
    let major = 4.0 * (l1 + 1.0 / 12.0).sqrt();
    let minor = 4.0 * (l2 + 1.0 / 12.0).sqrt();

    let mut distinct = shape.boundary.clone();
    distinct.sort_unstable();
    distinct.dedup();
    let contour_pixels = distinct.len() as f64;
    let perimeter = perimeter(&shape.boundary);
    let hull = convex_hull_area(&distinct);
    if contour_pixels == 0.0 || hull <= 0.0 {
        return Err(Error::degenerate("finger without an outline"));
    }
    Ok([
        contour_pixels,
        len,
        wid,
        major,
        minor,
        filled_area,
        (4.0 * filled_area / std::f64::consts::PI).sqrt(),
        perimeter,
        filled_area / hull,
        filled_area / bbox.area() as f64,
    ])
}

/// Length of the closed pixel loop: 1 per axial step, sqrt(2) per diagonal.
pub fn perimeter(boundary: &[Point]) -> f64 {
    if boundary.len() < 2 {
        return 0.0;
    }
    (0..boundary.len())
        .map(|i| {
            let (p, q) = (boundary[i], boundary[(i + 1) % boundary.len()]);
            let (dx, dy) = (p.x.abs_diff(q.x), p.y.abs_diff(q.y));
            ((dx * dx + dy * dy) as f64).sqrt()
        })
        .sum()
}

/// Point at arc-length parameter `t` in `[0, 1)` of the closed polyline.
pub fn point_at(boundary: &[Point], t: f64) -> (f64, f64) {
    let n = boundary.len();
    let total = perimeter(boundary);
    let target = t.rem_euclid(1.0) * total;
    let mut acc = 0.0;
    for i in 0..n {
        let (p, q) = (boundary[i], boundary[(i + 1) % n]);
        let seg = (((p.x.abs_diff(q.x)).pow(2) + (p.y.abs_diff(q.y)).pow(2)) as f64).sqrt();
        if acc + seg >= target && seg > 0.0 {
            let u = (target - acc) / seg;
            return (
                p.x as f64 + u * (q.x as f64 - p.x as f64),
                p.y as f64 + u * (q.y as f64 - p.y as f64),
            );
        }
        acc += seg;
    }
    (boundary[0].x as f64, boundary[0].y as f64)
}

/// Distances from the region centroid to ten outline points at arc-length
/// parameters 0, 1/10, ..., 9/10 from the left valley.
pub fn set_a2(shape: &FingerShape) -> Result<[f64; 10]> {
    if shape.boundary.len() < 3 {
        return Err(Error::degenerate("outline too short to parameterize"));
    }
    for i in 0..shape.boundary.len() {
        let (p, q) = (shape.boundary[i], shape.boundary[(i + 1) % shape.boundary.len()]);
        if !p.is_8_adjacent(q) {
            return Err(Error::degenerate(format!("outline is open between {p:?} and {q:?}")));
        }
    }
    let (xc, yc) = moments(&shape.region)?.centroid();
    let mut out = [0.0; 10];
    for (k, d) in out.iter_mut().enumerate() {
        let (x, y) = point_at(&shape.boundary, k as f64 / 10.0);
        *d = (x - xc).hypot(y - yc);
    }
    Ok(out)
}

/// Widths at rows `k/11` of the finger's vertical extent, `k = 1..=10`: the
/// span between the leftmost and rightmost outline pixel on the row, counted
/// in pixels. Rows the outline misses are interpolated from the nearest
/// measured rows.
pub fn set_a3(shape: &FingerShape) -> Result<[f64; 10]> {
    let bbox = mbr(&shape.region)?;
    let (top, bottom) = (bbox.y0 as f64, (bbox.y0 + bbox.h - 1) as f64);
    let mut rows = [None; 10];
    for (k, slot) in rows.iter_mut().enumerate() {
        let y = (top + (k + 1) as f64 * (bottom - top) / 11.0).round() as usize;
        let xs = (0..shape.outline.width()).filter(|&x| shape.outline.get(x, y));
        let (mut lo, mut hi) = (usize::MAX, 0);
        for x in xs {
            lo = lo.min(x);
            hi = hi.max(x);
        }
        if lo != usize::MAX {
            *slot = Some((hi - lo + 1) as f64);
        }
    }
    let valid: Vec<usize> = (0..10).filter(|&k| rows[k].is_some()).collect();
    if valid.len() < 2 {
        return Err(Error::degenerate(format!(
            "only {} width rows hit the outline",
            valid.len()
        )));
    }
    let mut out = [0.0; 10];
    for k in 0..10 {
        out[k] = match rows[k] {
            Some(v) => v,
            None => {
                let below = valid.iter().rev().find(|&&j| j < k);
                let above = valid.iter().find(|&&j| j > k);
                match (below, above) {
                    (Some(&a), Some(&b)) => {
                        let (va, vb) = (rows[a].unwrap(), rows[b].unwrap());
                        va + (vb - va) * (k - a) as f64 / (b - a) as f64
                    }
                    // Outside the measured range: extend from the two nearest rows.
                    (None, _) => extrapolate(&rows, valid[0], valid[1], k),
                    (_, None) => extrapolate(&rows, valid[valid.len() - 2], valid[valid.len() - 1], k),
                }
            }
        };
    }
    Ok(out)
}

fn extrapolate(rows: &[Option<f64>; 10], a: usize, b: usize, k: usize) -> f64 {
    let (va, vb) = (rows[a].unwrap(), rows[b].unwrap());
    let v = va + (vb - va) * (k as f64 - a as f64) / (b as f64 - a as f64);
    v.max(0.0)
}

pub fn finger_features(shape: &FingerShape) -> Result<FingerFeatures> {
    let shape = &shape.cropped()?;
    Ok(FingerFeatures {
        a: set_a1(shape)?,
        b: set_a2(shape)?,
        c: set_a3(shape)?,
    })
}

/// Features of every finger of one hand. A failure on any finger fails the
/// sample, tagged with the finger index.
pub fn extract_features(set: &FingerSet, subject: &str, sample: &str) -> Result<HandFeatureVector> {
    let fingers = set
        .fingers
        .iter()
        .map(|f| finger_features(&FingerShape::from(f)).map_err(|e| fail(f.index, e.to_string()).at(Stage::Features)))
        .collect::<Result<Vec<_>>>()?;
    Ok(HandFeatureVector {
        subject: subject.to_string(),
        sample: sample.to_string(),
        hand: set.hand,
        fingers,
    })
}
