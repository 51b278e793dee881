//! Pairing left and right profiles into fingers and placing each finger on a
//! fixed-size canvas.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::hand::Hand;
use crate::image::{BinaryImage, Point};
use crate::imaging::components::{fill_holes, Component, N8};
use crate::imaging::draw::line_points;
use crate::imaging::rotate::RotationFrame;

use super::decompose::ProfilePair;
use super::wrist::{order_profiles, WristLine};

/// Canvas every finger is placed on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Canvas {
    pub width: usize,
    pub height: usize,
}

impl Default for Canvas {
    fn default() -> Self {
        Canvas {
            width: 160,
            height: 280,
        }
    }
}

impl Canvas {
    pub fn center(&self) -> (f64, f64) {
        (self.width as f64 / 2.0, self.height as f64 / 2.0)
    }
}

/// One finger on its canvas. `lp` and `rp` are the left and right profile
/// pieces; `boundary` is the closed outline (profiles plus the straight
/// segment between the valleys) in traversal order starting at the left valley
/// and running up the left side first; `region` is its filled interior.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedFinger {
    /// 0 = thumb .. 4 = little.
    pub index: usize,
    pub lp: BinaryImage,
    pub rp: BinaryImage,
    pub region: BinaryImage,
    pub boundary: Vec<Point>,
    pub left_valley: Point,
    pub right_valley: Point,
    /// Canvas position minus position in the rotated hand image.
    pub offset: (isize, isize),
}

impl NormalizedFinger {
    /// Profile pixels of this finger (`lp OR rp`).
    pub fn mask(&self) -> BinaryImage {
        self.lp.or(&self.rp).expect("same canvas")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FingerSet {
    pub hand: Hand,
    /// Maps the (mirrored, for left hands) input onto the upright image the
    /// profiles were traced in.
    pub frame: RotationFrame,
    pub wrist: WristLine,
    pub canvas: Canvas,
    /// Thumb first.
    pub fingers: Vec<NormalizedFinger>,
}

/// Shortest 8-path from `from` to `to` through the pixels of `allowed`.
fn shortest_path(allowed: &BinaryImage, from: Point, to: Point) -> Option<Vec<Point>> {
    let w = allowed.width();
    let mut prev = vec![usize::MAX; w * allowed.height()];
    let start = from.y * w + from.x;
    prev[start] = start;
    let mut queue = VecDeque::from([from]);
    while let Some(p) = queue.pop_front() {
        if p == to {
            let mut path = vec![to];
            let mut i = to.y * w + to.x;
            while i != start {
                i = prev[i];
                path.push(Point::new(i % w, i / w));
            }
            path.reverse();
            return Some(path);
        }
        for (dx, dy) in N8 {
            let (nx, ny) = (p.x as isize + dx, p.y as isize + dy);
            if allowed.get_signed(nx, ny) {
                let j = ny as usize * w + nx as usize;
                if prev[j] == usize::MAX {
                    prev[j] = p.y * w + p.x;
                    queue.push_back(Point::new(nx as usize, ny as usize));
                }
            }
        }
    }
    None
}

/// Closed outline through the profiles plus the straight closing segment, as
/// an ordered pixel loop without repeated points.
pub(crate) fn close_outline(lp: &Component, rp: &Component, w: usize, h: usize) -> Option<(Vec<Point>, Point, Point)> {
    let left_valley = lp.bottom();
    let right_valley = *rp
        .pixels
        .iter()
        .max_by_key(|p| (p.y, p.x))
        .expect("components are non-empty");
    let mut both = lp.to_image(w, h);
    for p in &rp.pixels {
        both.set(p.x, p.y, true);
    }
    let mut path = shortest_path(&both, left_valley, right_valley)?;
    let seg = line_points(
        (right_valley.x as isize, right_valley.y as isize),
        (left_valley.x as isize, left_valley.y as isize),
    );
    if seg.len() > 2 {
        path.extend(
            seg[1..seg.len() - 1]
                .iter()
                .map(|&(x, y)| Point::new(x as usize, y as usize)),
        );
    }
    Some((path, left_valley, right_valley))
}

/// Pairs the `i`-th left profile with the `i`-th right profile along the outline
/// and centres every finger's filled region on the canvas.
pub fn isolate_fingers(
    nlp: &BinaryImage,
    nrp: &BinaryImage,
    hand: Hand,
    frame: RotationFrame,
    wrist: WristLine,
    canvas: Canvas,
) -> Result<FingerSet> {
    let pair = ProfilePair {
        lsfp: nlp.clone(),
        rsfp: nrp.clone(),
    };
    let order = order_profiles(&pair, 5)?;
    let (w, h) = (nlp.width(), nlp.height());
    let mut fingers = Vec::with_capacity(5);
    for (index, (lp, rp)) in order.lsfp.iter().zip(&order.rsfp).enumerate() {
        let (boundary, lv, rv) = close_outline(lp, rp, w, h)
            .ok_or_else(|| Error::PairingFailure(format!("profiles of finger {index} do not meet at the tip")))?;
        let mut outline = BinaryImage::new(w, h)?;
        for p in &boundary {
            outline.set(p.x, p.y, true);
        }
        let region = fill_holes(&outline);
        let pts = region.points();
        let n = pts.len() as f64;
        let cx = pts.iter().map(|p| p.x as f64).sum::<f64>() / n;
        let cy = pts.iter().map(|p| p.y as f64).sum::<f64>() / n;
        let (ccx, ccy) = canvas.center();
        let offset = ((ccx - cx).round() as isize, (ccy - cy).round() as isize);

        let place = |p: Point| -> Option<Point> {
            let x = p.x as isize + offset.0;
            let y = p.y as isize + offset.1;
            (x >= 0 && y >= 0 && (x as usize) < canvas.width && (y as usize) < canvas.height)
                .then(|| Point::new(x as usize, y as usize))
        };
        let overflow = || {
            let xs = pts.iter().map(|p| p.x);
            let ys = pts.iter().map(|p| p.y);
            Error::CanvasOverflow {
                finger: index,
                width: xs.clone().max().unwrap_or(0) - xs.min().unwrap_or(0) + 1,
                height: ys.clone().max().unwrap_or(0) - ys.min().unwrap_or(0) + 1,
            }
        };
        let to_canvas = |points: &[Point]| -> Result<BinaryImage> {
            let mut img = BinaryImage::new(canvas.width, canvas.height)?;
            for &p in points {
                let q = place(p).ok_or_else(overflow)?;
                img.set(q.x, q.y, true);
            }
            Ok(img)
        };
        let region_c = to_canvas(&pts)?;
        let lp_c = to_canvas(&lp.pixels)?;
        let rp_c = to_canvas(&rp.pixels)?;
        let boundary_c = boundary
            .iter()
            .map(|&p| place(p).ok_or_else(overflow))
            .collect::<Result<Vec<_>>>()?;
        fingers.push(NormalizedFinger {
            index,
            lp: lp_c,
            rp: rp_c,
            region: region_c,
            boundary: boundary_c,
            left_valley: place(lv).ok_or_else(overflow)?,
            right_valley: place(rv).ok_or_else(overflow)?,
            offset,
        });
    }
    Ok(FingerSet {
        hand,
        frame,
        wrist,
        canvas,
        fingers,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imaging::components::connected_components;

    #[test]
    fn rectangle_outline_closes() {
        // left side x=10, top y=5, right side x=20; valleys at y=30
        let (w, h) = (40, 40);
        let mut l = BinaryImage::new(w, h).unwrap();
        let mut r = BinaryImage::new(w, h).unwrap();
        for y in 5..=30 {
            l.set(10, y, true);
            r.set(20, y, true);
        }
        for x in 11..20 {
            l.set(x, 5, true);
        }
        let lc = &connected_components(&l)[0];
        let rc = &connected_components(&r)[0];
        let (path, lv, rv) = close_outline(lc, rc, w, h).unwrap();
        assert_eq!(lv, Point::new(10, 30));
        assert_eq!(rv, Point::new(20, 30));
        assert_eq!(path[0], lv);
        // 26 + 9 + 26 profile pixels minus the two square corners the 8-path
        // cuts diagonally, plus 9 closing pixels
        assert_eq!(path.len(), 26 + 9 + 26 - 2 + 9);
        for k in 0..path.len() {
            assert!(path[k].is_8_adjacent(path[(k + 1) % path.len()]), "break at {k}");
        }
        // the walk goes up the left side first
        assert!(path[1].y < path[0].y);
    }
}
