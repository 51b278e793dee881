//! Connected-component labelling (8-connected foreground, 4-connected background),
//! hole filling and area filtering.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::image::{BinaryImage, Point};

pub(crate) const N8: [(isize, isize); 8] = [(-1, -1), (0, -1), (1, -1), (-1, 0), (1, 0), (-1, 1), (0, 1), (1, 1)];

pub(crate) const N4: [(isize, isize); 4] = [(0, -1), (-1, 0), (1, 0), (0, 1)];

#[derive(Debug, Clone, PartialEq)]
pub struct Component {
    /// Labels are assigned in raster order of each component's first pixel.
    pub id: usize,
    pub area: usize,
    pub pixels: Vec<Point>,
}

impl Component {
    pub fn to_image(&self, width: usize, height: usize) -> BinaryImage {
        BinaryImage::from_points(width, height, &self.pixels).expect("component pixels lie inside the image")
    }

    /// Topmost pixel; the leftmost one among ties.
    pub fn top(&self) -> Point {
        *self
            .pixels
            .iter()
            .min_by_key(|p| (p.y, p.x))
            .expect("components are non-empty")
    }

    /// Lowest pixel (maximum row); the leftmost one among ties.
    pub fn bottom(&self) -> Point {
        *self
            .pixels
            .iter()
            .min_by_key(|p| (std::cmp::Reverse(p.y), p.x))
            .expect("components are non-empty")
    }

    pub fn mean_x(&self) -> f64 {
        self.pixels.iter().map(|p| p.x as f64).sum::<f64>() / self.area as f64
    }
}

/// Labels 8-connected foreground components.
pub fn connected_components(bin: &BinaryImage) -> Vec<Component> {
    let (w, h) = (bin.width(), bin.height());
    let mut label = vec![usize::MAX; w * h];
    let mut comps = Vec::new();
    let mut queue = VecDeque::new();
    for y in 0..h {
        for x in 0..w {
            if !bin.get(x, y) || label[y * w + x] != usize::MAX {
                continue;
            }
            let id = comps.len();
            let mut pixels = Vec::new();
            label[y * w + x] = id;
            queue.push_back(Point::new(x, y));
            while let Some(p) = queue.pop_front() {
                pixels.push(p);
                for (dx, dy) in N8 {
                    let nx = p.x as isize + dx;
                    let ny = p.y as isize + dy;
                    if bin.get_signed(nx, ny) {
                        let idx = ny as usize * w + nx as usize;
                        if label[idx] == usize::MAX {
                            label[idx] = id;
                            queue.push_back(Point::new(nx as usize, ny as usize));
                        }
                    }
                }
            }
            pixels.sort_by_key(|p| (p.y, p.x));
            comps.push(Component {
                id,
                area: pixels.len(),
                pixels,
            });
        }
    }
    comps
}

/// Outcome of area-based filtering.
#[derive(Debug, Clone)]
pub struct AreaFilter {
    pub mask: BinaryImage,
    pub kept_area: usize,
    /// Components removed because their area fell below `min_area`.
    pub discarded_small: usize,
    /// Components at or above `min_area` removed for not being the largest.
    pub discarded_other: usize,
}

/// Keeps the maximum-area 8-connected component (ties: lowest label).
pub fn largest_component(bin: &BinaryImage, min_area: usize) -> Result<AreaFilter> {
    let comps = connected_components(bin);
    let best = comps
        .iter()
        .max_by(|a, b| a.area.cmp(&b.area).then(b.id.cmp(&a.id)))
        .ok_or_else(|| Error::EmptyInput("no foreground component".into()))?;
    let others = comps.iter().filter(|c| c.id != best.id);
    let discarded_small = others.clone().filter(|c| c.area < min_area).count();
    let discarded_other = others.filter(|c| c.area >= min_area).count();
    Ok(AreaFilter {
        mask: best.to_image(bin.width(), bin.height()),
        kept_area: best.area,
        discarded_small,
        discarded_other,
    })
}

/// Drops 8-connected components with fewer than `min_area` pixels.
pub fn remove_small_components(bin: &BinaryImage, min_area: usize) -> BinaryImage {
    let mut out = BinaryImage::new(bin.width(), bin.height()).expect("valid dims");
    for c in connected_components(bin) {
        if c.area >= min_area {
            for p in &c.pixels {
                out.set(p.x, p.y, true);
            }
        }
    }
    out
}

/// Fills background regions that are not 4-connected to the image border.
pub fn fill_holes(bin: &BinaryImage) -> BinaryImage {
    let (w, h) = (bin.width(), bin.height());
    let src = bin.data();
    let mut outside = vec![false; w * h];
    let mut stack: Vec<usize> = Vec::new();
    let seed = |i: usize, outside: &mut Vec<bool>, stack: &mut Vec<usize>| {
        if src[i] == 0 && !outside[i] {
            outside[i] = true;
            stack.push(i);
        }
    };
    for x in 0..w {
        seed(x, &mut outside, &mut stack);
        seed((h - 1) * w + x, &mut outside, &mut stack);
    }
    for y in 0..h {
        seed(y * w, &mut outside, &mut stack);
        seed(y * w + w - 1, &mut outside, &mut stack);
    }
    while let Some(i) = stack.pop() {
        let (x, y) = (i % w, i / w);
        let mut visit = |j: usize| {
            if src[j] == 0 && !outside[j] {
                outside[j] = true;
                stack.push(j);
            }
        };
        if x > 0 {
            visit(i - 1);
        }
        if x + 1 < w {
            visit(i + 1);
        }
        if y > 0 {
            visit(i - w);
        }
        if y + 1 < h {
            visit(i + w);
        }
    }
    let data = outside.iter().map(|&o| (!o) as u8).collect();
    BinaryImage::from_vec(w, h, data).expect("valid dims")
}

/// Inner 4-boundary of a mask: foreground pixels with a background 4-neighbour
/// (pixels outside the image count as background).
pub fn inner_boundary(bin: &BinaryImage) -> BinaryImage {
    let mut out = BinaryImage::new(bin.width(), bin.height()).expect("valid dims");
    for y in 0..bin.height() {
        for x in 0..bin.width() {
            if bin.get(x, y)
                && N4
                    .iter()
                    .any(|&(dx, dy)| !bin.get_signed(x as isize + dx, y as isize + dy))
            {
                out.set(x, y, true);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn img(w: usize, h: usize, rows: &[&str]) -> BinaryImage {
        let data = rows.iter().flat_map(|r| r.bytes().map(|b| (b == b'#') as u8)).collect();
        BinaryImage::from_vec(w, h, data).unwrap()
    }

    #[test]
    fn empty_image_has_no_components() {
        let b = BinaryImage::new(5, 5).unwrap();
        assert!(connected_components(&b).is_empty());
        assert!(matches!(largest_component(&b, 1), Err(Error::EmptyInput(_))));
    }

    #[test]
    fn two_squares() {
        let b = img(6, 2, &["##..##", "##..##"]);
        let c = connected_components(&b);
        assert_eq!(c.len(), 2);
        assert!(c.iter().all(|c| c.area == 4));
    }

    #[test]
    fn diagonal_pixels_are_connected() {
        let b = img(3, 3, &["#..", ".#.", "..#"]);
        assert_eq!(connected_components(&b).len(), 1);
    }

    #[test]
    fn largest_keeps_biggest_and_counts_discards() {
        let mut b = BinaryImage::new(30, 30).unwrap();
        for y in 0..10 {
            for x in 0..10 {
                b.set(x, y, true);
            }
        }
        for x in 20..25 {
            b.set(x, 20, true);
        }
        let f = largest_component(&b, 10).unwrap();
        assert_eq!(f.kept_area, 100);
        assert_eq!(f.mask.count_ones(), 100);
        assert_eq!(f.discarded_small, 1);
        assert_eq!(f.discarded_other, 0);
        let single = largest_component(&f.mask, 10).unwrap();
        assert_eq!(single.mask, f.mask);
    }

    #[test]
    fn fill_holes_cases() {
        let square = img(4, 4, &["....", ".##.", ".##.", "...."]);
        assert_eq!(fill_holes(&square), square);

        let ring = img(5, 5, &[".....", ".###.", ".#.#.", ".###.", "....."]);
        let filled = fill_holes(&ring);
        assert!(filled.get(2, 2));
        assert_eq!(filled.count_ones(), 9);

        // open cavity reaches the border through a 4-connected path
        let c_shape = img(5, 5, &[".....", ".###.", ".#...", ".###.", "....."]);
        assert_eq!(fill_holes(&c_shape), c_shape);
    }

    #[test]
    fn diagonal_leak_does_not_open_a_hole() {
        // background may only escape 4-connectedly
        let b = img(4, 4, &["##..", "#.#.", ".##.", "...."]);
        let f = fill_holes(&b);
        assert!(f.get(1, 1));
    }

    /// Independent union-find labelling used as an oracle.
    fn union_find_areas(b: &BinaryImage) -> Vec<usize> {
        let (w, h) = (b.width(), b.height());
        let mut parent: Vec<usize> = (0..w * h).collect();
        fn find(p: &mut [usize], mut i: usize) -> usize {
            while p[i] != i {
                p[i] = p[p[i]];
                i = p[i];
            }
            i
        }
        for y in 0..h {
            for x in 0..w {
                if !b.get(x, y) {
                    continue;
                }
                for (dx, dy) in [(-1isize, -1isize), (0, -1), (1, -1), (-1, 0)] {
                    let nx = x as isize + dx;
                    let ny = y as isize + dy;
                    if b.get_signed(nx, ny) {
                        let a = find(&mut parent, y * w + x);
                        let c = find(&mut parent, ny as usize * w + nx as usize);
                        parent[a] = c;
                    }
                }
            }
        }
        let mut counts = std::collections::HashMap::new();
        for y in 0..h {
            for x in 0..w {
                if b.get(x, y) {
                    *counts.entry(find(&mut parent, y * w + x)).or_insert(0usize) += 1;
                }
            }
        }
        let mut areas: Vec<usize> = counts.into_values().collect();
        areas.sort();
        areas
    }

    #[test]
    fn matches_union_find_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let data: Vec<u8> = (0..40 * 30).map(|_| rng.random_bool(0.35) as u8).collect();
            let b = BinaryImage::from_vec(40, 30, data).unwrap();
            let mut ours: Vec<usize> = connected_components(&b).iter().map(|c| c.area).collect();
            ours.sort();
            assert_eq!(ours, union_find_areas(&b));
        }
    }

    #[test]
    fn inner_boundary_of_square() {
        let mut b = BinaryImage::new(6, 6).unwrap();
        for y in 1..5 {
            for x in 1..5 {
                b.set(x, y, true);
            }
        }
        assert_eq!(inner_boundary(&b).count_ones(), 12);
    }
}
