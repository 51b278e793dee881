//! Deterministic synthetic hand scans with ground truth.
//!
//! A subject seed fixes the anatomy (palm plus five tapered-capsule fingers);
//! a sample seed fixes pose, sensor noise and optional per-sample thumb
//! perturbation. Images are right hands unless mirrored by the caller.

mod geometry;
mod tabular;

use std::collections::VecDeque;

use rand::Rng;
use rand_distr::{Distribution, Normal};

pub use geometry::{Anatomy, Capsule, ConvexPolygon, Coord, FingerAnatomy, HandGeometry};
pub use tabular::planted_corpus;

use crate::error::{Error, Result};
use crate::hand::Hand;
use crate::image::{BinaryImage, GrayImage};
use crate::imaging::components::N4;
use crate::imaging::rotate::{rotate_binary_with, Border, RotationFrame};
use crate::profile::Canvas;
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntensityModel {
    pub hand_mean: f64,
    pub background_mean: f64,
    /// Illumination change per column.
    pub slope: f64,
    pub noise_sigma: f64,
}

impl Default for IntensityModel {
    fn default() -> Self {
        IntensityModel {
            hand_mean: 170.0,
            background_mean: 60.0,
            slope: -0.03,
            noise_sigma: 2.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoseModel {
    /// Rotations are uniform in `[-max, max]` degrees.
    pub max_rotation_deg: f64,
    /// Shifts are uniform in `[-max, max]` pixels on both axes.
    pub max_shift: f64,
}

impl Default for PoseModel {
    fn default() -> Self {
        PoseModel {
            max_rotation_deg: 10.0,
            max_shift: 8.0,
        }
    }
}

/// Failure analogues that the pipeline must detect and reject.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Artifacts {
    /// Hand shifted so the image border cuts through the little finger.
    pub crop_little: bool,
    /// Bright blob and speckles detached from the hand.
    pub sleeve_blob: bool,
    /// Bright spot bulging out of the middle fingertip.
    pub nail_bright_spot: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HandParams {
    pub width: usize,
    pub height: usize,
    /// Population mean anatomy.
    pub anatomy: Anatomy,
    /// Scales the between-subject anatomy spread; 0 makes every subject identical.
    pub separability: f64,
    /// Per-sample thumb perturbation scale; 0 keeps the thumb fixed per subject.
    pub thumb_jitter: f64,
    pub pose: PoseModel,
    pub intensity: IntensityModel,
    pub artifacts: Artifacts,
}

impl Default for HandParams {
    fn default() -> Self {
        HandParams {
            width: 383,
            height: 526,
            anatomy: Anatomy::default(),
            separability: 3.0,
            thumb_jitter: 0.0,
            pose: PoseModel::default(),
            intensity: IntensityModel::default(),
            artifacts: Artifacts::default(),
        }
    }
}

impl HandParams {
    pub fn validate(&self) -> Result<()> {
        let im = &self.intensity;
        if !(im.noise_sigma >= 0.0 && im.hand_mean > im.background_mean + 3.0 * im.noise_sigma) {
            return Err(Error::invalid(
                "hand mean intensity must exceed background mean by 3 noise deviations",
            ));
        }
        if self.width < 64 || self.height < 64 {
            return Err(Error::invalid("canvas smaller than 64x64"));
        }
        if !(self.separability >= 0.0 && self.thumb_jitter >= 0.0) {
            return Err(Error::invalid("separability and thumb jitter must be non-negative"));
        }
        if !(self.pose.max_rotation_deg >= 0.0 && self.pose.max_rotation_deg <= 30.0 && self.pose.max_shift >= 0.0) {
            return Err(Error::invalid("pose jitter out of range"));
        }
        HandGeometry::build(&self.anatomy).map(|_| ())
    }
}

/// Between-subject standard deviations at separability 1, in the units of the
/// corresponding anatomy fields.
const LENGTH_SD: f64 = 2.5;
const WIDTH_SD: f64 = 0.7;
const TAPER_SD: f64 = 0.01;
const ANGLE_SD: f64 = 0.4;
const THUMB_ATTACH_SD: f64 = 1.5;

/// Draws a feasible anatomy for a subject. Infeasible draws are retried with
/// derived seeds, so the result depends only on `params` and `subject_seed`.
pub fn draw_anatomy(params: &HandParams, subject_seed: u64) -> Result<Anatomy> {
    params.validate()?;
    let k = params.separability;
    for attempt in 0..64u64 {
        let mut rng = seed::rng(seed::derive(subject_seed, 0xA7A7_0000 + attempt));
        let mut a = params.anatomy;
        let n = Normal::new(0.0, 1.0).expect("unit normal");
        for f in a.fingers.iter_mut() {
            f.length += k * LENGTH_SD * n.sample(&mut rng);
            f.base_width += k * WIDTH_SD * n.sample(&mut rng);
            f.taper += k * TAPER_SD * n.sample(&mut rng);
            f.angle_deg += k * ANGLE_SD * n.sample(&mut rng);
        }
        a.thumb_attach += k * THUMB_ATTACH_SD * n.sample(&mut rng);
        if HandGeometry::build(&a).is_ok() {
            return Ok(a);
        }
    }
    Err(Error::invalid(format!(
        "no feasible anatomy for subject seed {subject_seed} at separability {k}"
    )))
}

/// Placement of the hand frame in the image.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    pub rotation_deg: f64,
    pub shift: (f64, f64),
    /// Image position of the hand-frame pivot.
    pub anchor: Coord,
}

/// Hand-frame point that is pinned to the anchor.
const PIVOT: Coord = (0.0, 60.0);

impl Pose {
    pub fn to_image(&self, p: Coord) -> Coord {
        let (s, c) = self.rotation_deg.to_radians().sin_cos();
        let (dx, dy) = (p.0 - PIVOT.0, p.1 - PIVOT.1);
        (self.anchor.0 + c * dx - s * dy, self.anchor.1 + s * dx + c * dy)
    }

    pub fn to_hand(&self, q: Coord) -> Coord {
        let (s, c) = self.rotation_deg.to_radians().sin_cos();
        let (dx, dy) = (q.0 - self.anchor.0, q.1 - self.anchor.1);
        (PIVOT.0 + c * dx + s * dy, PIVOT.1 - s * dx + c * dy)
    }
}

/// Everything known about how a synthetic image was made. Masks are rendered
/// on demand from the stored geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub hand: Hand,
    pub anatomy: Anatomy,
    pub geometry: HandGeometry,
    pub pose: Pose,
    pub width: usize,
    pub height: usize,
    /// Detached bright pixels added by the sleeve artifact.
    pub artifact_pixels: Vec<(usize, usize)>,
}

impl GroundTruth {
    /// Maps a hand-frame point to image coordinates, mirroring for left hands.
    pub fn to_image(&self, p: Coord) -> Coord {
        let q = self.pose.to_image(p);
        match self.hand {
            Hand::Right => q,
            Hand::Left => (self.width as f64 - 1.0 - q.0, q.1),
        }
    }

    fn to_hand(&self, q: Coord) -> Coord {
        let q = match self.hand {
            Hand::Right => q,
            Hand::Left => (self.width as f64 - 1.0 - q.0, q.1),
        };
        self.pose.to_hand(q)
    }

    /// Noise-free hand mask (without artifacts).
    pub fn hand_mask(&self) -> BinaryImage {
        let mut m = BinaryImage::new(self.width, self.height).expect("valid canvas");
        for y in 0..self.height {
            for x in 0..self.width {
                if self.geometry.contains(self.to_hand((x as f64, y as f64))) {
                    m.set(x, y, true);
                }
            }
        }
        m
    }

    pub fn thumb_valley(&self) -> Coord {
        self.to_image(self.geometry.thumb_valley)
    }

    pub fn wrist_point(&self) -> Coord {
        self.to_image(self.geometry.wrist_point)
    }

    pub fn thumb_lower_edge(&self) -> (Coord, Coord) {
        let (a, b) = self.geometry.thumb_lower_edge;
        (self.to_image(a), self.to_image(b))
    }

    /// Left and right valley landmarks of finger `i` (thumb = 0) in the image.
    /// For left hands the pair is reported as seen in the mirrored image.
    pub fn valleys(&self, i: usize) -> (Coord, Coord) {
        let (l, r) = self.geometry.valleys(i);
        (self.to_image(l), self.to_image(r))
    }

    pub fn tip(&self, i: usize) -> Coord {
        self.to_image(self.geometry.tip(i))
    }

    /// Filled region of finger `i`: the hand pixels on the tip side of the
    /// straight line through its two valley landmarks, minus the other fingers,
    /// connected to the tip.
    pub fn finger_mask(&self, i: usize, hand_mask: &BinaryImage) -> Result<BinaryImage> {
        let g = &self.geometry;
        let (l, r) = g.valleys(i);
        let side = |p: Coord| (r.0 - l.0) * (p.1 - l.1) - (r.1 - l.1) * (p.0 - l.0);
        let tip_side = side(g.tip(i)).signum();
        let (w, h) = (self.width, self.height);
        let mut allowed = vec![false; w * h];
        for q in hand_mask.points() {
            let p = self.to_hand((q.x as f64, q.y as f64));
            let others = (0..5).any(|j| j != i && g.fingers[j].contains(p));
            allowed[q.y * w + q.x] = side(p) * tip_side >= 0.0 && !others;
        }

        let tip = self.tip(i);
        let (tx, ty) = (tip.0.round() as isize, tip.1.round() as isize);
        if tx < 0 || ty < 0 || tx as usize >= w || ty as usize >= h || !allowed[ty as usize * w + tx as usize] {
            return Err(Error::degenerate(format!("finger {i} tip lies outside the hand mask")));
        }
        let mut ok = BinaryImage::new(w, h)?;
        for (k, &a) in allowed.iter().enumerate() {
            if a {
                ok.set(k % w, k / w, true);
            }
        }
        let region = flood4(&ok, tx as usize, ty as usize);
        if region.count_ones() * 2 > hand_mask.count_ones() {
            return Err(Error::degenerate(format!("finger {i} region leaked into the palm")));
        }
        Ok(region)
    }

    /// All five finger regions, thumb first.
    pub fn finger_masks(&self) -> Result<Vec<BinaryImage>> {
        let hand = self.hand_mask();
        (0..5).map(|i| self.finger_mask(i, &hand)).collect()
    }

    /// Ideal profile split of the noise-free outline: outline pixels whose right
    /// neighbour is background form the right-side profiles, the rest the left.
    pub fn ideal_profiles(&self) -> (BinaryImage, BinaryImage) {
        let mask = self.hand_mask();
        let outline = crate::imaging::components::inner_boundary(&mask);
        let mut lsfp = BinaryImage::new(self.width, self.height).expect("valid canvas");
        let mut rsfp = lsfp.clone();
        for p in outline.points() {
            // The forearm leaves through the bottom border; that cut is not outline.
            if p.y + 1 == self.height {
                continue;
            }
            if mask.get_signed(p.x as isize + 1, p.y as isize) {
                lsfp.set(p.x, p.y, true);
            } else {
                rsfp.set(p.x, p.y, true);
            }
        }
        (lsfp, rsfp)
    }
}

impl GroundTruth {
    /// Maps an image mask into an upright frame produced by the pipeline, which
    /// mirrors left hands before rotating.
    pub fn upright_mask(&self, mask: &BinaryImage, frame: &RotationFrame) -> BinaryImage {
        let m = match self.hand {
            Hand::Right => mask.clone(),
            Hand::Left => mask.mirror_horizontal(),
        };
        rotate_binary_with(&m, frame, Border::Zero)
    }

    /// Shifts an upright mask onto a finger canvas by the extraction's own
    /// offset, so it can be compared pixel for pixel with the extracted region.
    pub fn canvas_mask(upright: &BinaryImage, offset: (isize, isize), canvas: Canvas) -> BinaryImage {
        let mut out = BinaryImage::new(canvas.width, canvas.height).expect("valid canvas");
        for q in upright.points() {
            let (x, y) = (q.x as isize + offset.0, q.y as isize + offset.1);
            if x >= 0 && y >= 0 && (x as usize) < canvas.width && (y as usize) < canvas.height {
                out.set(x as usize, y as usize, true);
            }
        }
        out
    }

    /// Maps an image point into the same upright frame.
    pub fn upright_point(&self, p: Coord, frame: &RotationFrame) -> Coord {
        let p = match self.hand {
            Hand::Right => p,
            Hand::Left => (self.width as f64 - 1.0 - p.0, p.1),
        };
        frame.forward(p.0, p.1)
    }

    /// Whether upright pixel `(u, v)` is inside the noise-free hand.
    fn upright_inside(&self, frame: &RotationFrame, u: f64, v: f64) -> bool {
        let (x, y) = frame.inverse(u, v);
        let x = match self.hand {
            Hand::Right => x,
            Hand::Left => self.width as f64 - 1.0 - x,
        };
        self.geometry.contains(self.to_hand((x, y)))
    }

    /// Closing segments of the five fingers in an upright frame, following the
    /// extraction's conventions: the thumb is closed by the vertical from its
    /// valley down to the wrist row, the little finger by the segment from the
    /// palm edge on the wrist row to the little/ring valley, and the others by
    /// the segment between their valleys. Left end first.
    pub fn upright_valleys(&self, frame: &RotationFrame) -> Result<[(Coord, Coord); 5]> {
        let hand = self.upright_mask(&self.hand_mask(), frame);
        let up = |p: Coord| self.upright_point(self.to_image(p), frame);
        let (ju, jv) = self
            .upright_thumb_valley_pixel(&hand, frame)
            .ok_or_else(|| Error::degenerate("thumb valley not found in the upright mask"))?;
        let wrist = self
            .upright_wrist_row_at(frame, ju)
            .ok_or_else(|| Error::degenerate("no outline below the thumb valley"))?;
        let palm_edge = (0..hand.width())
            .find(|&u| hand.get(u, wrist))
            .ok_or_else(|| Error::degenerate("wrist row misses the hand"))?;
        let mid = |i: usize| {
            let (l, r) = self.geometry.valleys(i);
            (up(l), up(r))
        };
        Ok([
            ((ju as f64, jv as f64), (ju as f64, wrist as f64)),
            mid(1),
            mid(2),
            mid(3),
            ((palm_edge as f64, wrist as f64), up(self.geometry.valleys(4).1)),
        ])
    }

    /// Finger regions in an upright frame: pixels of the resampled hand mask
    /// on the tip side of each finger's closing line, outside the other
    /// fingers, 4-connected to the tip. The mask is the rendered one resampled
    /// like the scan, rather than the exact geometry, since nearest-neighbour
    /// resampling moves the edge by up to half a pixel.
    pub fn upright_finger_masks(&self, frame: &RotationFrame, cuts: &[(Coord, Coord); 5]) -> Result<Vec<BinaryImage>> {
        let hand = self.upright_mask(&self.hand_mask(), frame);
        let (w, h) = (hand.width(), hand.height());
        (0..5)
            .map(|i| {
                let tip = self.upright_point(self.tip(i), frame);
                let (l, r) = cuts[i];
                let side = |p: Coord| (r.0 - l.0) * (p.1 - l.1) - (r.1 - l.1) * (p.0 - l.0);
                let s = side(tip).signum();
                let mut allowed = BinaryImage::new(w, h)?;
                for q in hand.points() {
                    let p = (q.x as f64, q.y as f64);
                    let (x, y) = frame.inverse(p.0, p.1);
                    let x = match self.hand {
                        Hand::Right => x,
                        Hand::Left => self.width as f64 - 1.0 - x,
                    };
                    let hp = self.to_hand((x, y));
                    let others = (0..5).any(|k| k != i && self.geometry.fingers[k].contains(hp));
                    if side(p) * s >= 0.0 && !others {
                        allowed.set(q.x, q.y, true);
                    }
                }
                let seed = (tip.0.round() as isize, tip.1.round() as isize);
                if !allowed.get_signed(seed.0, seed.1) {
                    return Err(Error::degenerate(format!("finger {i} tip lies outside the hand mask")));
                }
                let region = flood4(&allowed, seed.0 as usize, seed.1 as usize);
                if region.count_ones() * 2 > hand.count_ones() {
                    return Err(Error::degenerate(format!("finger {i} region leaked into the palm")));
                }
                Ok(region)
            })
            .collect()
    }

    /// Lowest pixel of the thumb's left wall in the resampled upright mask
    /// `hand`: hand pixels with background to their left, at or right of the
    /// analytic valley and at most 15 px above it. The apex pixel itself has
    /// background to its right and belongs to the index finger's profile, so
    /// this usually sits a pixel or two up the thumb.
    pub fn upright_thumb_valley_pixel(&self, hand: &BinaryImage, frame: &RotationFrame) -> Option<(usize, usize)> {
        let j = self.upright_point(self.thumb_valley(), frame);
        let (u0, v0) = (j.0.round() as isize, j.1.round() as isize);
        let mut best: Option<(usize, usize)> = None;
        for v in (v0 - 15).max(0)..=v0 + 2 {
            for u in u0.max(1)..=u0 + 15 {
                if hand.get_signed(u, v) && !hand.get_signed(u - 1, v) {
                    let c = (u as usize, v as usize);
                    best = match best {
                        Some(b) if (b.1, std::cmp::Reverse(b.0)) >= (c.1, std::cmp::Reverse(c.0)) => Some(b),
                        _ => Some(c),
                    };
                }
            }
        }
        best
    }

    /// Same walk down upright pixel column `u`, on the pixel grid: the first
    /// row below the thumb valley whose pixel is inside the hand with a
    /// 4-neighbour outside it, i.e. the first outline pixel of an ideal
    /// rendering. The wrist row is steep in the valley's column, so a
    /// pixel-level valley estimate is best judged at its own column.
    pub fn upright_wrist_row_at(&self, frame: &RotationFrame, u: usize) -> Option<usize> {
        let j = self.upright_point(self.thumb_valley(), frame);
        let inside = |u: isize, v: isize| self.upright_inside(frame, u as f64, v as f64);
        let u = u as isize;
        let start = j.1.ceil() as isize + 1;
        // Skip any outline pixels of the valley itself.
        let mut v = start;
        while v < frame.height as isize && !(inside(u, v) && inside(u - 1, v) && inside(u + 1, v) && inside(u, v + 1)) {
            v += 1;
        }
        while v < frame.height as isize {
            if inside(u, v) && !(inside(u - 1, v) && inside(u + 1, v) && inside(u, v - 1) && inside(u, v + 1)) {
                return Some(v as usize);
            }
            v += 1;
        }
        None
    }
}

/// 4-connected region of `allowed` containing `(x, y)`.
fn flood4(allowed: &BinaryImage, x: usize, y: usize) -> BinaryImage {
    let (w, h) = (allowed.width(), allowed.height());
    let mut region = BinaryImage::new(w, h).expect("same dims as input");
    region.set(x, y, true);
    let mut queue = VecDeque::from([(x as isize, y as isize)]);
    while let Some((x, y)) = queue.pop_front() {
        for (dx, dy) in N4 {
            let (nx, ny) = (x + dx, y + dy);
            if allowed.get_signed(nx, ny) && !region.get(nx as usize, ny as usize) {
                region.set(nx as usize, ny as usize, true);
                queue.push_back((nx, ny));
            }
        }
    }
    region
}

/// Renders one right-hand sample for a subject.
pub fn generate_hand(params: &HandParams, subject_seed: u64, sample_seed: u64) -> Result<(GrayImage, GroundTruth)> {
    let anatomy = draw_anatomy(params, subject_seed)?;
    render_hand(params, &anatomy, sample_seed)
}

/// Renders one right-hand sample of a fixed anatomy.
pub fn render_hand(params: &HandParams, anatomy: &Anatomy, sample_seed: u64) -> Result<(GrayImage, GroundTruth)> {
    params.validate()?;
    let mut rng = seed::rng(seed::derive(sample_seed, 0x5A3B_1E00));
    let unit = Normal::new(0.0, 1.0).expect("unit normal");

    let mut anatomy = *anatomy;
    if params.thumb_jitter > 0.0 {
        let t = &mut anatomy.fingers[0];
        t.angle_deg += params.thumb_jitter * 2.0 * unit.sample(&mut rng);
        t.length += params.thumb_jitter * 4.0 * unit.sample(&mut rng);
        t.base_width += params.thumb_jitter * 1.0 * unit.sample(&mut rng);
        anatomy.thumb_attach += params.thumb_jitter * 2.0 * unit.sample(&mut rng);
    }
    let geometry = HandGeometry::build(&anatomy)?;

    let pm = params.pose;
    let rotation_deg = if pm.max_rotation_deg > 0.0 {
        rng.random_range(-pm.max_rotation_deg..=pm.max_rotation_deg)
    } else {
        0.0
    };
    let shift = if pm.max_shift > 0.0 {
        (
            rng.random_range(-pm.max_shift..=pm.max_shift),
            rng.random_range(-pm.max_shift..=pm.max_shift),
        )
    } else {
        (0.0, 0.0)
    };
    let base = (params.width as f64 / 2.0, params.height as f64 * 0.475);
    let mut pose = Pose {
        rotation_deg,
        shift,
        anchor: (base.0 + shift.0, base.1 + shift.1),
    };
    if params.artifacts.crop_little {
        // Slide the hand left until the image border runs through the middle of
        // the little-ring gap, leaving the little finger out of frame.
        let gap_mid = (geometry.base_right_edges[3] + 0.5 * anatomy.base_gap, 0.0);
        let x = pose.to_image(gap_mid).0;
        pose.anchor.0 -= x;
        pose.shift.0 = pose.anchor.0 - base.0;
    }

    let mut truth = GroundTruth {
        hand: Hand::Right,
        anatomy,
        geometry,
        pose,
        width: params.width,
        height: params.height,
        artifact_pixels: Vec::new(),
    };
    let mask = truth.hand_mask();
    if !params.artifacts.crop_little {
        check_fits(&mask)?;
    }

    let im = params.intensity;
    let (w, h) = (params.width, params.height);
    let mut level = vec![0.0f64; w * h];
    for y in 0..h {
        for x in 0..w {
            let base = if mask.get(x, y) {
                im.hand_mean
            } else {
                im.background_mean
            };
            level[y * w + x] = base + im.slope * (x as f64 - w as f64 / 2.0);
        }
    }

    if params.artifacts.nail_bright_spot {
        let tip = truth.geometry.fingers[2];
        let top = (tip.b.0, tip.b.1 - tip.rb);
        let c = truth.to_image(top);
        paint_disk(&mut level, w, h, c, 6.0, im.hand_mean + 50.0);
    }
    if params.artifacts.sleeve_blob {
        let pixels = sleeve_pixels(&mask, &mut rng);
        for &(x, y) in &pixels {
            level[y * w + x] = im.hand_mean;
        }
        truth.artifact_pixels = pixels;
    }

    let noise = Normal::new(0.0, im.noise_sigma.max(1e-12)).expect("finite sigma");
    let data = level
        .iter()
        .map(|&v| {
            let n = if im.noise_sigma > 0.0 {
                noise.sample(&mut rng)
            } else {
                0.0
            };
            (v + n).round().clamp(0.0, 255.0) as u8
        })
        .collect();
    Ok((GrayImage::from_vec(w, h, data)?, truth))
}

fn paint_disk(level: &mut [f64], w: usize, h: usize, c: Coord, r: f64, v: f64) {
    let (x0, x1) = (
        (c.0 - r).floor().max(0.0) as usize,
        ((c.0 + r).ceil() as usize).min(w - 1),
    );
    let (y0, y1) = (
        (c.1 - r).floor().max(0.0) as usize,
        ((c.1 + r).ceil() as usize).min(h - 1),
    );
    for y in y0..=y1 {
        for x in x0..=x1 {
            if (x as f64 - c.0).hypot(y as f64 - c.1) <= r {
                level[y * w + x] = v;
            }
        }
    }
}

/// A disk plus speckles in the top corners, kept at least 6 px from the hand.
fn sleeve_pixels(mask: &BinaryImage, rng: &mut impl Rng) -> Vec<(usize, usize)> {
    let (w, h) = (mask.width(), mask.height());
    let clear = |x: usize, y: usize| {
        let r = 6isize;
        (-r..=r).all(|dy| (-r..=r).all(|dx| !mask.get_signed(x as isize + dx, y as isize + dy)))
    };
    let mut out = Vec::new();
    let (cx, cy, r) = (22.0, 30.0, 12.0);
    for y in 0..(2.0 * r + 30.0) as usize {
        for x in 0..(2.0 * r + 22.0) as usize {
            if x < w && y < h && (x as f64 - cx).hypot(y as f64 - cy) <= r && clear(x, y) {
                out.push((x, y));
            }
        }
    }
    for _ in 0..25 {
        let x = rng.random_range(0..w);
        let y = rng.random_range(0..h / 6);
        for (dx, dy) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
            let (px, py) = (x + dx, y + dy);
            if px < w && py < h && clear(px, py) {
                out.push((px, py));
            }
        }
    }
    out.sort_unstable_by_key(|&(x, y)| (y, x));
    out.dedup();
    out
}

fn check_fits(mask: &BinaryImage) -> Result<()> {
    let (w, h) = (mask.width(), mask.height());
    let margin = 2;
    for y in 0..h {
        for x in 0..w {
            if mask.get(x, y) && (x < margin || x + margin >= w || y < margin) {
                return Err(Error::invalid(format!(
                    "hand touches the image border at ({x}, {y}); only the forearm may leave the frame"
                )));
            }
        }
    }
    Ok(())
}

/// Mirrors a right-hand sample into the matching left-hand sample.
pub fn mirror_sample(img: &GrayImage, truth: &GroundTruth) -> (GrayImage, GroundTruth) {
    let mut t = truth.clone();
    t.hand = match truth.hand {
        Hand::Right => Hand::Left,
        Hand::Left => Hand::Right,
    };
    t.artifact_pixels = truth
        .artifact_pixels
        .iter()
        .map(|&(x, y)| (truth.width - 1 - x, y))
        .collect();
    (img.mirror_horizontal(), t)
}

/// One image of a cohort.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampleSpec {
    pub subject: usize,
    pub sample: usize,
    pub subject_seed: u64,
    pub sample_seed: u64,
}

/// Seeds and anatomies of a cohort, resolved without rendering anything.
#[derive(Debug, Clone, PartialEq)]
pub struct CohortPlan {
    pub params: HandParams,
    pub master_seed: u64,
    pub anatomies: Vec<Anatomy>,
    pub samples: Vec<SampleSpec>,
}

impl CohortPlan {
    pub fn render(&self, spec: &SampleSpec) -> Result<(GrayImage, GroundTruth)> {
        render_hand(&self.params, &self.anatomies[spec.subject], spec.sample_seed)
    }

    pub fn subject_count(&self) -> usize {
        self.anatomies.len()
    }
}

pub fn plan_cohort(n: usize, samples_per_subject: usize, master_seed: u64, params: &HandParams) -> Result<CohortPlan> {
    if n < 2 {
        return Err(Error::invalid("a cohort needs at least 2 subjects"));
    }
    if samples_per_subject == 0 {
        return Err(Error::invalid("a cohort needs at least 1 sample per subject"));
    }
    let mut anatomies = Vec::with_capacity(n);
    let mut samples = Vec::with_capacity(n * samples_per_subject);
    for subject in 0..n {
        let subject_seed = seed::derive(master_seed, subject as u64);
        anatomies.push(draw_anatomy(params, subject_seed)?);
        for sample in 0..samples_per_subject {
            samples.push(SampleSpec {
                subject,
                sample,
                subject_seed,
                sample_seed: seed::derive(subject_seed ^ 0x5EED_5EED, sample as u64),
            });
        }
    }
    Ok(CohortPlan {
        params: params.clone(),
        master_seed,
        anatomies,
        samples,
    })
}

/// A rendered cohort.
#[derive(Debug, Clone)]
pub struct Cohort {
    pub plan: CohortPlan,
    pub images: Vec<GrayImage>,
    pub truths: Vec<GroundTruth>,
}

impl Cohort {
    pub fn labels(&self) -> Vec<usize> {
        self.plan.samples.iter().map(|s| s.subject).collect()
    }
}

pub fn generate_cohort(n: usize, samples_per_subject: usize, master_seed: u64, params: &HandParams) -> Result<Cohort> {
    let plan = plan_cohort(n, samples_per_subject, master_seed, params)?;
    let mut images = Vec::with_capacity(plan.samples.len());
    let mut truths = Vec::with_capacity(plan.samples.len());
    for spec in &plan.samples {
        let (img, truth) = plan.render(spec)?;
        images.push(img);
        truths.push(truth);
    }
    Ok(Cohort { plan, images, truths })
}
