//! Ordering profile components along the outline and cutting the wrist off.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::image::{BinaryImage, Point};
use crate::imaging::components::{connected_components, Component, N8};

use super::decompose::ProfilePair;

/// Profile components of one hand, thumb first.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderedProfiles {
    pub lsfp: Vec<Component>,
    pub rsfp: Vec<Component>,
}

/// Geodesic (8-path) distance from `start` to every pixel of `curve`;
/// unreachable pixels get `usize::MAX`.
fn geodesic(curve: &BinaryImage, start: Point) -> Vec<usize> {
    let w = curve.width();
    let mut dist = vec![usize::MAX; w * curve.height()];
    let mut queue = VecDeque::from([start]);
    dist[start.y * w + start.x] = 0;
    while let Some(p) = queue.pop_front() {
        let d = dist[p.y * w + p.x];
        for (dx, dy) in N8 {
            let (nx, ny) = (p.x as isize + dx, p.y as isize + dy);
            if curve.get_signed(nx, ny) {
                let i = ny as usize * w + nx as usize;
                if dist[i] == usize::MAX {
                    dist[i] = d + 1;
                    queue.push_back(Point::new(nx as usize, ny as usize));
                }
            }
        }
    }
    dist
}

/// Sorts left and right profile components by where they start along the
/// outline, walking from its lower-left end. On an upright right hand the walk
/// meets little, ring, middle, index and thumb in turn, alternating left and
/// right profiles; anything else is a pairing failure.
pub fn order_profiles(pair: &ProfilePair, expected: usize) -> Result<OrderedProfiles> {
    let lsfp = connected_components(&pair.lsfp);
    let rsfp = connected_components(&pair.rsfp);
    if lsfp.len() != expected || rsfp.len() != expected {
        return Err(Error::PairingFailure(format!(
            "expected {expected} left and {expected} right profiles, found {} and {}",
            lsfp.len(),
            rsfp.len()
        )));
    }
    let union = pair.union();
    let start = union
        .points()
        .into_iter()
        .min_by_key(|p| (std::cmp::Reverse(p.y), p.x))
        .ok_or_else(|| Error::PairingFailure("empty outline".into()))?;
    let dist = geodesic(&union, start);
    let w = union.width();
    let entry = |c: &Component| c.pixels.iter().map(|p| dist[p.y * w + p.x]).min().unwrap_or(usize::MAX);

    let mut tagged: Vec<(usize, bool, Component)> = lsfp
        .into_iter()
        .map(|c| (entry(&c), true, c))
        .chain(rsfp.into_iter().map(|c| (entry(&c), false, c)))
        .collect();
    if tagged.iter().any(|t| t.0 == usize::MAX) {
        return Err(Error::PairingFailure(
            "profiles do not form one connected outline".into(),
        ));
    }
    tagged.sort_by_key(|t| (t.0, !t.1));
    for (k, t) in tagged.iter().enumerate() {
        if t.1 != (k % 2 == 0) {
            return Err(Error::PairingFailure(format!(
                "left and right profiles do not alternate along the outline (position {k})"
            )));
        }
    }
    let mut out = OrderedProfiles {
        lsfp: Vec::with_capacity(expected),
        rsfp: Vec::with_capacity(expected),
    };
    // The walk runs little -> thumb; store thumb first.
    for (_, left, c) in tagged.into_iter().rev() {
        if left {
            out.lsfp.push(c);
        } else {
            out.rsfp.push(c);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WristLine {
    /// Lowest pixel of the thumb's left profile.
    pub p1: Point,
    /// First thumb right-profile pixel straight below `p1`.
    pub p2: Point,
    /// First little-finger left-profile pixel on `p2`'s row, towards the little finger.
    pub p3: Point,
}

impl WristLine {
    pub fn row(&self) -> usize {
        self.p2.y
    }
}

/// Locates the wrist line and deletes every profile pixel strictly below it.
pub fn remove_wrist(pair: &ProfilePair, order: &OrderedProfiles) -> Result<(ProfilePair, WristLine)> {
    let (thumb_l, thumb_r, little_l) = match (order.lsfp.first(), order.rsfp.first(), order.lsfp.last()) {
        (Some(a), Some(b), Some(c)) if order.lsfp.len() >= 2 => (a, b, c),
        _ => {
            return Err(Error::WristDetectionFailure(
                "no thumb and little finger profiles".into(),
            ))
        }
    };
    let (w, h) = (pair.lsfp.width(), pair.lsfp.height());
    let mut thumb_r_mask = vec![false; w * h];
    for p in &thumb_r.pixels {
        thumb_r_mask[p.y * w + p.x] = true;
    }
    let mut little_mask = vec![false; w * h];
    for p in &little_l.pixels {
        little_mask[p.y * w + p.x] = true;
    }

    let p1 = thumb_l.bottom();
    let p2 = (p1.y + 1..h)
        .map(|y| Point::new(p1.x, y))
        .find(|p| thumb_r_mask[p.y * w + p.x])
        .ok_or_else(|| Error::WristDetectionFailure(format!("nothing below the thumb valley at column {}", p1.x)))?;
    let p3 = (0..p2.x)
        .rev()
        .map(|x| Point::new(x, p2.y))
        .find(|p| little_mask[p.y * w + p.x])
        .ok_or_else(|| Error::WristDetectionFailure(format!("no little-finger profile on row {}", p2.y)))?;

    let cut = |img: &BinaryImage| {
        let mut out = img.clone();
        for y in p2.y + 1..h {
            for x in 0..w {
                out.set(x, y, false);
            }
        }
        out
    };
    Ok((
        ProfilePair {
            lsfp: cut(&pair.lsfp),
            rsfp: cut(&pair.rsfp),
        },
        WristLine { p1, p2, p3 },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Toy outline: a "U" whose left arm is the little-side left profile and
    /// whose right side holds a thumb-like notch.
    fn toy() -> ProfilePair {
        let mut l = BinaryImage::new(40, 40).unwrap();
        let mut r = BinaryImage::new(40, 40).unwrap();
        // little left profile: column 2 from row 5 down to 39
        for y in 5..40 {
            l.set(2, y, true);
        }
        // thumb left profile: diagonal from (20, 20) up to (30, 10)
        for k in 0..=10 {
            l.set(20 + k, 20 - k, true);
        }
        // thumb right profile: (31, 10) down to (31, 25), then left to (20, 30) and down
        for y in 10..=25 {
            r.set(31, y, true);
        }
        for k in 1..=11 {
            r.set(31 - k, 25 + k.min(5), true);
        }
        for y in 31..40 {
            r.set(20, y, true);
        }
        ProfilePair { lsfp: l, rsfp: r }
    }

    fn toy_order(p: &ProfilePair) -> OrderedProfiles {
        let mut lsfp = connected_components(&p.lsfp);
        lsfp.sort_by_key(|c| std::cmp::Reverse(c.top().x));
        OrderedProfiles {
            lsfp,
            rsfp: connected_components(&p.rsfp),
        }
    }

    #[test]
    fn wrist_line_on_toy_outline() {
        let p = toy();
        let order = toy_order(&p);
        let (cut, line) = remove_wrist(&p, &order).unwrap();
        assert_eq!(line.p1, Point::new(20, 20));
        assert_eq!(line.p2, Point::new(20, 30));
        assert_eq!(line.p3, Point::new(2, 30));
        assert_eq!(line.p1.x, line.p2.x);
        assert_eq!(line.p2.y, line.p3.y);
        assert!(cut
            .lsfp
            .points()
            .iter()
            .chain(cut.rsfp.points().iter())
            .all(|q| q.y <= 30));
        assert!(cut.lsfp.get(2, 30) && cut.rsfp.get(20, 30));
    }

    #[test]
    fn nothing_below_the_line_leaves_profiles_unchanged() {
        let mut p = toy();
        for y in 31..40 {
            p.lsfp.set(2, y, false);
            p.rsfp.set(20, y, false);
        }
        let order = toy_order(&p);
        let (cut, line) = remove_wrist(&p, &order).unwrap();
        assert_eq!(cut, p);
        let bottom = p.union().points().iter().map(|q| q.y).max().unwrap();
        assert_eq!(line.row(), bottom);
    }

    #[test]
    fn missing_thumb_fails() {
        let p = toy();
        let order = OrderedProfiles {
            lsfp: vec![],
            rsfp: vec![],
        };
        assert!(matches!(remove_wrist(&p, &order), Err(Error::WristDetectionFailure(_))));
    }

    #[test]
    fn scan_off_the_image_fails() {
        let mut p = toy();
        for q in p.rsfp.points() {
            if q.x == 20 {
                p.rsfp.set(q.x, q.y, false);
            }
        }
        let order = toy_order(&p);
        assert!(matches!(remove_wrist(&p, &order), Err(Error::WristDetectionFailure(_))));
    }
}
