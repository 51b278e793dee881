//! Nearest-neighbour rotation about a chosen centre.
//!
//! Convention: a source point `p` maps to `R(theta) (p - c_src) + c_dst` with
//! `R = [[cos, -sin], [sin, cos]]` acting on `(x, y)` image coordinates.

use crate::error::Result;
use crate::image::{BinaryImage, GrayImage};
use crate::imaging::moments::moments;

/// What to sample outside the source raster.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Border {
    /// Background (0).
    Zero,
    /// Nearest edge pixel. Used for hands whose wrist runs off the scan, so the
    /// cut edge does not turn into a contour.
    Replicate,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationFrame {
    pub theta: f64,
    pub src_center: (f64, f64),
    pub dst_center: (f64, f64),
    pub width: usize,
    pub height: usize,
}

impl RotationFrame {
    /// Frame whose canvas encloses the whole rotated source rectangle.
    pub fn enclosing(src_w: usize, src_h: usize, theta: f64, center: (f64, f64)) -> Self {
        let (s, c) = theta.sin_cos();
        let corners = [
            (-0.5, -0.5),
            (src_w as f64 - 0.5, -0.5),
            (-0.5, src_h as f64 - 0.5),
            (src_w as f64 - 0.5, src_h as f64 - 0.5),
        ];
        let (mut xmin, mut ymin, mut xmax, mut ymax) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
        for (x, y) in corners {
            let (dx, dy) = (x - center.0, y - center.1);
            let (rx, ry) = (c * dx - s * dy, s * dx + c * dy);
            xmin = xmin.min(rx);
            xmax = xmax.max(rx);
            ymin = ymin.min(ry);
            ymax = ymax.max(ry);
        }
        // Snap so the canvas spans whole pixels around the rotated extent.
        let left = (xmin + 0.5).floor();
        let top = (ymin + 0.5).floor();
        let width = ((xmax - 0.5).ceil() - left + 1.0).max(1.0) as usize;
        let height = ((ymax - 0.5).ceil() - top + 1.0).max(1.0) as usize;
        RotationFrame {
            theta,
            src_center: center,
            dst_center: (-left, -top),
            width,
            height,
        }
    }

    /// The frame that undoes this one onto a `src_w x src_h` canvas.
    pub fn inverse_onto(&self, src_w: usize, src_h: usize) -> Self {
        RotationFrame {
            theta: -self.theta,
            src_center: self.dst_center,
            dst_center: self.src_center,
            width: src_w,
            height: src_h,
        }
    }

    pub fn forward(&self, x: f64, y: f64) -> (f64, f64) {
        let (s, c) = self.theta.sin_cos();
        let (dx, dy) = (x - self.src_center.0, y - self.src_center.1);
        (c * dx - s * dy + self.dst_center.0, s * dx + c * dy + self.dst_center.1)
    }

    pub fn inverse(&self, u: f64, v: f64) -> (f64, f64) {
        let (s, c) = self.theta.sin_cos();
        let (dx, dy) = (u - self.dst_center.0, v - self.dst_center.1);
        (
            c * dx + s * dy + self.src_center.0,
            -s * dx + c * dy + self.src_center.1,
        )
    }

    /// Nearest source pixel for destination pixel `(u, v)`.
    fn source_pixel(&self, u: usize, v: usize, src_w: usize, src_h: usize, border: Border) -> Option<(usize, usize)> {
        let (x, y) = self.inverse(u as f64, v as f64);
        let (xi, yi) = (x.round() as isize, y.round() as isize);
        let inside = xi >= 0 && yi >= 0 && xi < src_w as isize && yi < src_h as isize;
        match (inside, border) {
            (true, _) => Some((xi as usize, yi as usize)),
            (false, Border::Zero) => None,
            (false, Border::Replicate) => Some((
                xi.clamp(0, src_w as isize - 1) as usize,
                yi.clamp(0, src_h as isize - 1) as usize,
            )),
        }
    }
}

pub fn rotate_gray_with(img: &GrayImage, frame: &RotationFrame, border: Border) -> GrayImage {
    let mut out = GrayImage::new(frame.width, frame.height).expect("frame has a non-empty canvas");
    for v in 0..frame.height {
        for u in 0..frame.width {
            if let Some((x, y)) = frame.source_pixel(u, v, img.width(), img.height(), border) {
                out.set(u, v, img.get(x, y));
            }
        }
    }
    out
}

pub fn rotate_binary_with(img: &BinaryImage, frame: &RotationFrame, border: Border) -> BinaryImage {
    let mut out = BinaryImage::new(frame.width, frame.height).expect("frame has a non-empty canvas");
    for v in 0..frame.height {
        for u in 0..frame.width {
            if let Some((x, y)) = frame.source_pixel(u, v, img.width(), img.height(), border) {
                if img.get(x, y) {
                    out.set(u, v, true);
                }
            }
        }
    }
    out
}

/// Rotates a mask about its foreground centroid onto an enclosing canvas.
pub fn rotate(bin: &BinaryImage, theta: f64, border: Border) -> Result<BinaryImage> {
    let center = moments(bin)?.centroid();
    let frame = RotationFrame::enclosing(bin.width(), bin.height(), theta, center);
    Ok(rotate_binary_with(bin, &frame, border))
}
