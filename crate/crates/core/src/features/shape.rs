//! Finger outlines as ordered pixel loops, plus boundary tracing and convex
//! hulls for masks that come without one.

use crate::error::{Error, Result};
use crate::image::{BinaryImage, Point};
use crate::imaging::components::{fill_holes, largest_component};
use crate::profile::NormalizedFinger;

/// Everything the feature sets read from one finger.
#[derive(Debug, Clone, PartialEq)]
pub struct FingerShape {
    /// Filled finger region.
    pub region: BinaryImage,
    /// Closed outline in traversal order, starting at the left valley and
    /// running up the left side first. Consecutive points (and the last and
    /// first) are 8-adjacent.
    pub boundary: Vec<Point>,
    /// Pixels that count as the finger's sides when measuring widths.
    pub outline: BinaryImage,
}

impl From<&NormalizedFinger> for FingerShape {
    fn from(f: &NormalizedFinger) -> Self {
        let mut outline = f.mask();
        for p in &f.boundary {
            outline.set(p.x, p.y, true);
        }
        FingerShape {
            region: f.region.clone(),
            boundary: f.boundary.clone(),
            outline,
        }
    }
}

impl FingerShape {
    /// The same shape cropped to the bounding box of its region and outline, so
    /// that translated copies produce bit-identical features.
    pub fn cropped(&self) -> Result<Self> {
        let both = self.region.or(&self.outline)?;
        let pts = both.points();
        if pts.is_empty() {
            return Err(Error::degenerate("empty finger shape"));
        }
        let x0 = pts.iter().map(|p| p.x).min().expect("non-empty");
        let y0 = pts.iter().map(|p| p.y).min().expect("non-empty");
        let x1 = pts.iter().map(|p| p.x).max().expect("non-empty");
        let y1 = pts.iter().map(|p| p.y).max().expect("non-empty");
        let (w, h) = (x1 - x0 + 1, y1 - y0 + 1);
        let crop = |img: &BinaryImage| -> Result<BinaryImage> {
            let mut out = BinaryImage::new(w, h)?;
            for y in 0..h {
                for x in 0..w {
                    if img.get(x0 + x, y0 + y) {
                        out.set(x, y, true);
                    }
                }
            }
            Ok(out)
        };
        let boundary = self
            .boundary
            .iter()
            .map(|p| {
                if p.x < x0 || p.y < y0 || p.x > x1 || p.y > y1 {
                    Err(Error::degenerate("outline leaves the finger's bounding box"))
                } else {
                    Ok(Point::new(p.x - x0, p.y - y0))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(FingerShape {
            region: crop(&self.region)?,
            boundary,
            outline: crop(&self.outline)?,
        })
    }

    /// Shape of a bare region: its largest component with holes filled, traced
    /// with Moore-neighbour tracing and rotated to start at the boundary pixel
    /// nearest `start` (the lowest-leftmost boundary pixel by default).
    pub fn from_region(region: &BinaryImage, start: Option<Point>) -> Result<Self> {
        let main = largest_component(region, 1)?;
        if main.kept_area == 0 {
            return Err(Error::degenerate("empty finger region"));
        }
        let region = fill_holes(&main.mask);
        let mut boundary = trace_boundary(&region)?;
        let anchor = match start {
            Some(p) => p,
            None => *boundary
                .iter()
                .max_by_key(|p| (p.y, std::cmp::Reverse(p.x)))
                .expect("non-empty trace"),
        };
        let d2 = |p: &Point| p.x.abs_diff(anchor.x).pow(2) + p.y.abs_diff(anchor.y).pow(2);
        let k = (0..boundary.len())
            .min_by_key(|&i| d2(&boundary[i]))
            .expect("non-empty trace");
        boundary.rotate_left(k);
        let outline = BinaryImage::from_points(region.width(), region.height(), &boundary)?;
        Ok(FingerShape {
            region,
            boundary,
            outline,
        })
    }
}

/// Moore-neighbour offsets in clockwise order on screen (rows grow downwards),
/// starting west.
const MOORE: [(isize, isize); 8] = [(-1, 0), (-1, -1), (0, -1), (1, -1), (1, 0), (1, 1), (0, 1), (-1, 1)];

/// Outer boundary of the 8-connected foreground, clockwise on screen, starting
/// at the first foreground pixel in raster order. Pixels on one-pixel necks
/// appear once per pass.
pub fn trace_boundary(region: &BinaryImage) -> Result<Vec<Point>> {
    let w = region.width();
    let first = region
        .data()
        .iter()
        .position(|&v| v != 0)
        .ok_or_else(|| Error::degenerate("cannot trace an empty region"))?;
    let start = Point::new(first % w, first / w);
    let step = |p: Point, d: usize| (p.x as isize + MOORE[d].0, p.y as isize + MOORE[d].1);

    // Raster order guarantees the west neighbour of `start` is background.
    let mut out = vec![start];
    let (mut p, mut back) = (start, 0usize);
    loop {
        let mut next = None;
        for k in 1..=8 {
            let d = (back + k) % 8;
            let (x, y) = step(p, d);
            if region.get_signed(x, y) {
                // The neighbour checked just before `d` is background; seen from
                // the new pixel it lies in this direction.
                let prev = (d + 7) % 8;
                let (bx, by) = step(p, prev);
                let q = Point::new(x as usize, y as usize);
                let rel = (bx - q.x as isize, by - q.y as isize);
                let nb = MOORE.iter().position(|&m| m == rel).expect("backtrack is a neighbour");
                next = Some((q, nb));
                break;
            }
        }
        let Some((q, nb)) = next else {
            // isolated pixel
            return Ok(out);
        };
        // Done once the start pixel would again be left by the first move.
        if p == start && out.len() > 1 && q == out[1] {
            out.pop();
            return Ok(out);
        }
        out.push(q);
        p = q;
        back = nb;
        if out.len() > 4 * region.width() * region.height() {
            return Err(Error::degenerate("boundary trace did not close"));
        }
    }
}

/// Area of the convex hull of the pixels in `points`, each taken as a unit
/// square, so a solid axis-aligned rectangle of `w x h` pixels has hull area
/// exactly `w * h`.
pub fn convex_hull_area(points: &[Point]) -> f64 {
    let mut corners: Vec<(i64, i64)> = Vec::with_capacity(points.len() * 4);
    // Doubled coordinates keep the half-pixel corners integral.
    for p in points {
        let (x, y) = (2 * p.x as i64, 2 * p.y as i64);
        corners.extend([(x - 1, y - 1), (x + 1, y - 1), (x - 1, y + 1), (x + 1, y + 1)]);
    }
    corners.sort_unstable();
    corners.dedup();
    if corners.len() < 3 {
        return 0.0;
    }
    let cross = |o: (i64, i64), a: (i64, i64), b: (i64, i64)| (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0);
    let mut hull: Vec<(i64, i64)> = Vec::with_capacity(2 * corners.len());
    for pass in 0..2 {
        let base = hull.len();
        let iter: Box<dyn Iterator<Item = &(i64, i64)>> = if pass == 0 {
            Box::new(corners.iter())
        } else {
            Box::new(corners.iter().rev())
        };
        for &c in iter {
            while hull.len() >= base + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], c) <= 0 {
                hull.pop();
            }
            hull.push(c);
        }
        hull.pop();
    }
    let twice: i64 = (0..hull.len())
        .map(|i| {
            let (a, b) = (hull[i], hull[(i + 1) % hull.len()]);
            a.0 * b.1 - b.0 * a.1
        })
        .sum();
    // Shoelace gives twice the area; coordinates were doubled on both axes.
    twice.unsigned_abs() as f64 / 8.0
}
