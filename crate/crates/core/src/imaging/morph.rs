//! Binary morphology: dilation, erosion, closing, bridging and thinning.

use std::str::FromStr;

use crate::error::{Error, Result};
use crate::image::BinaryImage;
use crate::imaging::components::N8;

/// A flat structuring element given as offsets from its origin.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructuringElement {
    offsets: Vec<(isize, isize)>,
}

impl StructuringElement {
    /// `size x size` square centred on the origin; `size` must be odd.
    pub fn square(size: usize) -> Result<Self> {
        if size == 0 || size.is_multiple_of(2) {
            return Err(Error::invalid(format!("square element size must be odd, got {size}")));
        }
        let r = (size / 2) as isize;
        let offsets = (-r..=r).flat_map(|dy| (-r..=r).map(move |dx| (dx, dy))).collect();
        Ok(StructuringElement { offsets })
    }

    pub fn from_offsets(offsets: Vec<(isize, isize)>) -> Result<Self> {
        if offsets.is_empty() {
            return Err(Error::invalid("structuring element has no offsets"));
        }
        Ok(StructuringElement { offsets })
    }

    pub fn offsets(&self) -> &[(isize, isize)] {
        &self.offsets
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MorphOp {
    Close,
    Bridge,
    Thin,
}

impl FromStr for MorphOp {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "close" => Ok(MorphOp::Close),
            "bridge" => Ok(MorphOp::Bridge),
            "thin" => Ok(MorphOp::Thin),
            other => Err(Error::invalid(format!("unknown morphological operation `{other}`"))),
        }
    }
}

/// Applies `op`. Closing needs a structuring element; the other operations
/// always work on the 3x3 neighbourhood and ignore `se`.
pub fn morph(bin: &BinaryImage, op: MorphOp, se: Option<&StructuringElement>) -> Result<BinaryImage> {
    match op {
        MorphOp::Close => {
            let se = se.ok_or_else(|| Error::invalid("closing requires a structuring element"))?;
            Ok(close(bin, se))
        }
        MorphOp::Bridge => Ok(bridge(bin)),
        MorphOp::Thin => Ok(thin(bin)),
    }
}

/// Pixels outside the raster count as background.
pub fn dilate(bin: &BinaryImage, se: &StructuringElement) -> BinaryImage {
    let (w, h) = (bin.width() as isize, bin.height() as isize);
    let mut out = BinaryImage::new(bin.width(), bin.height()).expect("valid dims");
    // stamp the element around each foreground pixel; edge maps are sparse
    for (i, _) in bin.data().iter().enumerate().filter(|(_, &v)| v != 0) {
        let (x, y) = ((i as isize) % w, (i as isize) / w);
        for &(dx, dy) in &se.offsets {
            let (nx, ny) = (x + dx, y + dy);
            if nx >= 0 && ny >= 0 && nx < w && ny < h {
                out.set(nx as usize, ny as usize, true);
            }
        }
    }
    out
}

/// Pixels outside the raster count as foreground, so closing never erodes
/// shapes that touch the border.
pub fn erode(bin: &BinaryImage, se: &StructuringElement) -> BinaryImage {
    let (w, h) = (bin.width() as isize, bin.height() as isize);
    let mut out = BinaryImage::new(bin.width(), bin.height()).expect("valid dims");
    for y in 0..h {
        for x in 0..w {
            let all = se.offsets.iter().all(|&(dx, dy)| {
                let (nx, ny) = (x + dx, y + dy);
                nx < 0 || ny < 0 || nx >= w || ny >= h || bin.get(nx as usize, ny as usize)
            });
            if all {
                out.set(x as usize, y as usize, true);
            }
        }
    }
    out
}

pub fn close(bin: &BinaryImage, se: &StructuringElement) -> BinaryImage {
    erode(&dilate(bin, se), se)
}

/// Sets background pixels whose 3x3 ring holds two or more foreground groups
/// that are not connected to each other without the centre.
pub fn bridge(bin: &BinaryImage) -> BinaryImage {
    let mut out = bin.clone();
    for y in 0..bin.height() {
        for x in 0..bin.width() {
            if bin.get(x, y) {
                continue;
            }
            let mut ring = [false; 8];
            for (i, (dx, dy)) in N8.iter().enumerate() {
                ring[i] = bin.get_signed(x as isize + dx, y as isize + dy);
            }
            if ring_groups(&ring) >= 2 {
                out.set(x, y, true);
            }
        }
    }
    out
}

/// Number of 8-connected groups among the set neighbours (indexed as `N8`),
/// ignoring the centre pixel.
fn ring_groups(ring: &[bool; 8]) -> usize {
    let mut seen = [false; 8];
    let mut groups = 0;
    for start in 0..8 {
        if !ring[start] || seen[start] {
            continue;
        }
        groups += 1;
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(i) = stack.pop() {
            for j in 0..8 {
                if ring[j] && !seen[j] {
                    let (a, b) = (N8[i], N8[j]);
                    if (a.0 - b.0).abs() <= 1 && (a.1 - b.1).abs() <= 1 {
                        seen[j] = true;
                        stack.push(j);
                    }
                }
            }
        }
    }
    groups
}

/// Zhang-Suen thinning iterated until no pixel changes.
pub fn thin(bin: &BinaryImage) -> BinaryImage {
    let mut img = bin.clone();
    let mut doomed = Vec::new();
    loop {
        let mut changed = false;
        for pass in 0..2 {
            doomed.clear();
            for y in 0..img.height() {
                for x in 0..img.width() {
                    if img.get(x, y) && deletable(&img, x, y, pass) {
                        doomed.push((x, y));
                    }
                }
            }
            // Candidates are re-checked against the current raster as they are
            // removed, which stops parallel deletion from wiping out 2-px
            // thick structures.
            for &(x, y) in &doomed {
                if deletable(&img, x, y, pass) {
                    img.set(x, y, false);
                    changed = true;
                }
            }
        }
        if !changed {
            return img;
        }
    }
}

fn deletable(img: &BinaryImage, x: usize, y: usize, pass: usize) -> bool {
    let (x, y) = (x as isize, y as isize);
    let g = |dx: isize, dy: isize| img.get_signed(x + dx, y + dy) as u8;
    // p2..p9 clockwise starting north
    let p = [
        g(0, -1),
        g(1, -1),
        g(1, 0),
        g(1, 1),
        g(0, 1),
        g(-1, 1),
        g(-1, 0),
        g(-1, -1),
    ];
    let b: u8 = p.iter().sum();
    if !(2..=6).contains(&b) {
        return false;
    }
    let a = (0..8).filter(|&i| p[i] == 0 && p[(i + 1) % 8] == 1).count();
    if a != 1 {
        return false;
    }
    let (n, e, s, w) = (p[0], p[2], p[4], p[6]);
    if pass == 0 {
        n * e * s == 0 && e * s * w == 0
    } else {
        n * e * w == 0 && n * s * w == 0
    }
}
