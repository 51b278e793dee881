//! Raw/central image moments, principal-axis orientation and bounding boxes.

use crate::error::{Error, Result};
use crate::image::BinaryImage;

/// Raw moments over foreground pixel coordinates (`x` column, `y` row).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub m00: f64,
    pub m10: f64,
    pub m01: f64,
    pub m11: f64,
    pub m20: f64,
    pub m02: f64,
}

impl Moments {
    pub fn centroid(&self) -> (f64, f64) {
        (self.m10 / self.m00, self.m01 / self.m00)
    }

    /// Normalized second central moments `(mu20, mu11, mu02)`, i.e. the pixel
    /// coordinate covariance.
    pub fn central(&self) -> (f64, f64, f64) {
        let (xc, yc) = self.centroid();
        (
            self.m20 / self.m00 - xc * xc,
            self.m11 / self.m00 - xc * yc,
            self.m02 / self.m00 - yc * yc,
        )
    }

    /// Eigenvalues of the coordinate covariance, larger first.
    pub fn principal_variances(&self) -> (f64, f64) {
        let (a, b, c) = self.central();
        let mean = 0.5 * (a + c);
        let disc = (0.25 * (a - c) * (a - c) + b * b).sqrt();
        (mean + disc, (mean - disc).max(0.0))
    }
}

/// Raw moments of the foreground. Sums are accumulated in integers so symmetric
/// shapes produce exactly symmetric moments.
pub fn moments(bin: &BinaryImage) -> Result<Moments> {
    let (mut m00, mut m10, mut m01, mut m11, mut m20, mut m02) = (0u128, 0u128, 0u128, 0u128, 0u128, 0u128);
    for y in 0..bin.height() {
        for x in 0..bin.width() {
            if bin.get(x, y) {
                let (xx, yy) = (x as u128, y as u128);
                m00 += 1;
                m10 += xx;
                m01 += yy;
                m11 += xx * yy;
                m20 += xx * xx;
                m02 += yy * yy;
            }
        }
    }
    if m00 == 0 {
        return Err(Error::degenerate("moments of an empty mask"));
    }
    Ok(Moments {
        m00: m00 as f64,
        m10: m10 as f64,
        m01: m01 as f64,
        m11: m11 as f64,
        m20: m20 as f64,
        m02: m02 as f64,
    })
}

/// Result of principal-axis orientation estimation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Orientation {
    /// Rotation (radians, in `(-pi/2, pi/2]`) that brings the major axis onto the
    /// vertical image axis when passed to [`rotate`](super::rotate::rotate).
    Angle(f64),
    /// Circularly symmetric second moments; callers treat this as zero rotation.
    Undefined,
}

impl Orientation {
    pub fn angle_or_zero(self) -> f64 {
        match self {
            Orientation::Angle(t) => t,
            Orientation::Undefined => 0.0,
        }
    }
}

/// Rotation that aligns the major principal axis with the image Y axis, computed
/// from central moments with a quadrant-aware arctangent.
pub fn orientation_angle(m: &Moments) -> Orientation {
    let (a, b, c) = m.central();
    let scale = (a + c).abs().max(f64::MIN_POSITIVE);
    if b.abs() <= 1e-12 * scale && (a - c).abs() <= 1e-12 * scale {
        return Orientation::Undefined;
    }
    // Major axis direction, measured from +x towards +y (image rows grow downwards).
    let phi = 0.5 * (2.0 * b).atan2(a - c);
    Orientation::Angle(wrap_half_turn(std::f64::consts::FRAC_PI_2 - phi))
}

/// Maps an axis angle into `(-pi/2, pi/2]`.
fn wrap_half_turn(t: f64) -> f64 {
    use std::f64::consts::PI;
    let mut t = t % PI;
    if t <= -PI / 2.0 {
        t += PI;
    } else if t > PI / 2.0 {
        t -= PI;
    }
    t
}

/// Axis-aligned box: top-left `(x0, y0)` and extents `w`, `h` in pixels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundingBox {
    pub x0: usize,
    pub y0: usize,
    pub w: usize,
    pub h: usize,
}

impl BoundingBox {
    pub fn area(&self) -> usize {
        self.w * self.h
    }
}

/// Minimum bounding rectangle of the foreground.
pub fn mbr(bin: &BinaryImage) -> Result<BoundingBox> {
    let (mut x0, mut y0, mut x1, mut y1) = (usize::MAX, usize::MAX, 0, 0);
    for y in 0..bin.height() {
        for x in 0..bin.width() {
            if bin.get(x, y) {
                x0 = x0.min(x);
                y0 = y0.min(y);
                x1 = x1.max(x);
                y1 = y1.max(y);
            }
        }
    }
    if x0 == usize::MAX {
        return Err(Error::degenerate("bounding box of an empty mask"));
    }
    Ok(BoundingBox {
        x0,
        y0,
        w: x1 - x0 + 1,
        h: y1 - y0 + 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::image::Point;
    use crate::imaging::rotate::{rotate, Border};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rect(w: usize, h: usize, x0: usize, y0: usize, rw: usize, rh: usize) -> BinaryImage {
        let mut b = BinaryImage::new(w, h).unwrap();
        for y in y0..y0 + rh {
            for x in x0..x0 + rw {
                b.set(x, y, true);
            }
        }
        b
    }

    fn disk(size: usize, r: f64) -> BinaryImage {
        let mut b = BinaryImage::new(size, size).unwrap();
        let c = (size / 2) as f64;
        for y in 0..size {
            for x in 0..size {
                if (x as f64 - c).hypot(y as f64 - c) <= r {
                    b.set(x, y, true);
                }
            }
        }
        b
    }

    #[test]
    fn centroid_of_square_and_pixel() {
        let sq = rect(20, 20, 0, 0, 10, 10);
        assert_eq!(moments(&sq).unwrap().centroid(), (4.5, 4.5));
        let px = BinaryImage::from_points(10, 10, &[Point::new(3, 7)]).unwrap();
        assert_eq!(moments(&px).unwrap().centroid(), (3.0, 7.0));
        assert!(moments(&BinaryImage::new(3, 3).unwrap()).is_err());
    }

    #[test]
    fn centroid_matches_coordinate_mean() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let data: Vec<u8> = (0..50 * 40).map(|_| rng.random_bool(0.3) as u8).collect();
            let b = BinaryImage::from_vec(50, 40, data).unwrap();
            let pts = b.points();
            let mx = pts.iter().map(|p| p.x as f64).sum::<f64>() / pts.len() as f64;
            let my = pts.iter().map(|p| p.y as f64).sum::<f64>() / pts.len() as f64;
            let (cx, cy) = moments(&b).unwrap().centroid();
            assert!((cx - mx).abs() < 1e-9 && (cy - my).abs() < 1e-9);
        }
    }

    #[test]
    fn tall_rectangle_is_already_vertical() {
        let b = rect(60, 80, 20, 10, 12, 50);
        match orientation_angle(&moments(&b).unwrap()) {
            Orientation::Angle(t) => assert!(t.abs() < 1e-12, "theta = {t}"),
            Orientation::Undefined => panic!("rectangle orientation is defined"),
        }
    }

    #[test]
    fn wide_rectangle_turns_a_quarter() {
        let b = rect(80, 60, 10, 20, 50, 12);
        let t = orientation_angle(&moments(&b).unwrap()).angle_or_zero();
        assert!((t.abs() - std::f64::consts::FRAC_PI_2).abs() < 1e-9);
    }

    #[test]
    fn rotated_rectangle_round_trip() {
        let b = rect(120, 120, 50, 25, 16, 70);
        for deg in [-25.0f64, -10.0, 10.0, 25.0] {
            let r = rotate(&b, deg.to_radians(), Border::Zero).unwrap();
            let t = orientation_angle(&moments(&r).unwrap()).angle_or_zero();
            assert!((t.to_degrees() + deg).abs() < 0.5, "deg {deg}: got {}", t.to_degrees());
        }
    }

    #[test]
    fn disk_orientation_undefined() {
        let b = disk(41, 15.0);
        assert_eq!(orientation_angle(&moments(&b).unwrap()), Orientation::Undefined);
    }

    #[test]
    fn bounding_boxes() {
        let px = BinaryImage::from_points(10, 10, &[Point::new(3, 7)]).unwrap();
        assert_eq!(
            mbr(&px).unwrap(),
            BoundingBox {
                x0: 3,
                y0: 7,
                w: 1,
                h: 1
            }
        );
        let r = rect(20, 20, 2, 3, 4, 6);
        let bb = mbr(&r).unwrap();
        assert_eq!((bb.w, bb.h), (4, 6));
        assert!(mbr(&BinaryImage::new(2, 2).unwrap()).is_err());
    }

    #[test]
    fn bounding_box_matches_min_max_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..10 {
            let data: Vec<u8> = (0..30 * 30).map(|_| rng.random_bool(0.02) as u8).collect();
            let b = BinaryImage::from_vec(30, 30, data).unwrap();
            let pts = b.points();
            if pts.is_empty() {
                continue;
            }
            let xmin = pts.iter().map(|p| p.x).min().unwrap();
            let xmax = pts.iter().map(|p| p.x).max().unwrap();
            let ymin = pts.iter().map(|p| p.y).min().unwrap();
            let ymax = pts.iter().map(|p| p.y).max().unwrap();
            assert_eq!(
                mbr(&b).unwrap(),
                BoundingBox {
                    x0: xmin,
                    y0: ymin,
                    w: xmax - xmin + 1,
                    h: ymax - ymin + 1
                }
            );
        }
    }
}
