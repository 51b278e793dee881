//! Canny edge detector: Gaussian smoothing, Sobel gradients, non-maximum
//! suppression and double-threshold hysteresis.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::image::{BinaryImage, GrayImage};
use crate::imaging::components::N8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CannyParams {
    pub sigma: f64,
    /// Fractions of the maximum gradient magnitude.
    pub t_low: f64,
    pub t_high: f64,
}

impl Default for CannyParams {
    fn default() -> Self {
        CannyParams {
            sigma: 1.4,
            t_low: 0.1,
            t_high: 0.3,
        }
    }
}

fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    let radius = (3.0 * sigma).ceil() as isize;
    let mut k: Vec<f64> = (-radius..=radius)
        .map(|i| (-(i * i) as f64 / (2.0 * sigma * sigma)).exp())
        .collect();
    let sum: f64 = k.iter().sum();
    k.iter_mut().for_each(|v| *v /= sum);
    k
}

/// Separable Gaussian blur with replicated borders.
fn blur(img: &GrayImage, sigma: f64) -> Vec<f64> {
    let (w, h) = (img.width(), img.height());
    let k = gaussian_kernel(sigma);
    let r = (k.len() / 2) as isize;
    let src: Vec<f64> = img.data().iter().map(|&v| v as f64).collect();
    let mut tmp = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (i, kv) in k.iter().enumerate() {
                let xx = (x as isize + i as isize - r).clamp(0, w as isize - 1) as usize;
                acc += kv * src[y * w + xx];
            }
            tmp[y * w + x] = acc;
        }
    }
    let mut out = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (i, kv) in k.iter().enumerate() {
                let yy = (y as isize + i as isize - r).clamp(0, h as isize - 1) as usize;
                acc += kv * tmp[yy * w + x];
            }
            out[y * w + x] = acc;
        }
    }
    out
}

pub fn canny_edges(img: &GrayImage, params: &CannyParams) -> Result<BinaryImage> {
    let CannyParams { sigma, t_low, t_high } = *params;
    if !(sigma > 0.0) {
        return Err(Error::invalid(format!("Canny sigma must be > 0, got {sigma}")));
    }
    if !(0.0 < t_low && t_low < t_high && t_high <= 1.0) {
        return Err(Error::invalid(format!(
            "Canny thresholds need 0 < low < high <= 1, got {t_low}, {t_high}"
        )));
    }
    let (w, h) = (img.width(), img.height());
    let s = blur(img, sigma);
    let at = |x: isize, y: isize| -> f64 {
        let cx = x.clamp(0, w as isize - 1) as usize;
        let cy = y.clamp(0, h as isize - 1) as usize;
        s[cy * w + cx]
    };

    let mut gx = vec![0.0; w * h];
    let mut gy = vec![0.0; w * h];
    let mut mag = vec![0.0; w * h];
    let mut max_mag: f64 = 0.0;
    for y in 0..h as isize {
        for x in 0..w as isize {
            let dx = (at(x + 1, y - 1) + 2.0 * at(x + 1, y) + at(x + 1, y + 1))
                - (at(x - 1, y - 1) + 2.0 * at(x - 1, y) + at(x - 1, y + 1));
            let dy = (at(x - 1, y + 1) + 2.0 * at(x, y + 1) + at(x + 1, y + 1))
                - (at(x - 1, y - 1) + 2.0 * at(x, y - 1) + at(x + 1, y - 1));
            let i = y as usize * w + x as usize;
            gx[i] = dx;
            gy[i] = dy;
            mag[i] = dx.hypot(dy);
            max_mag = max_mag.max(mag[i]);
        }
    }
    let mut out = BinaryImage::new(w, h)?;
    if max_mag <= 0.0 {
        return Ok(out);
    }
    let eps = 1e-9 * max_mag;
    let mag_at = |x: isize, y: isize| -> f64 {
        if x < 0 || y < 0 || x >= w as isize || y >= h as isize {
            0.0
        } else {
            mag[y as usize * w + x as usize]
        }
    };

    // Non-maximum suppression. Along the quantized gradient direction a pixel must be
    // strictly above its brighter-side neighbour and not below its darker-side one, so
    // a symmetric step keeps exactly its bright-side pixel.
    let mut nms = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            let m = mag[i];
            if m <= eps {
                continue;
            }
            let angle = gy[i].atan2(gx[i]);
            let (ox, oy) = quantize_direction(angle);
            let ahead = mag_at(x as isize + ox, y as isize + oy);
            let behind = mag_at(x as isize - ox, y as isize - oy);
            if m > ahead + eps && m >= behind - eps {
                nms[i] = m;
            }
        }
    }

    let low = t_low * max_mag;
    let high = t_high * max_mag;
    let mut queue = VecDeque::new();
    for i in 0..w * h {
        if nms[i] >= high && nms[i] > 0.0 {
            out.set(i % w, i / w, true);
            queue.push_back(i);
        }
    }
    while let Some(i) = queue.pop_front() {
        let (x, y) = ((i % w) as isize, (i / w) as isize);
        for (dx, dy) in N8 {
            let (nx, ny) = (x + dx, y + dy);
            if nx < 0 || ny < 0 || nx >= w as isize || ny >= h as isize {
                continue;
            }
            let j = ny as usize * w + nx as usize;
            if nms[j] >= low && nms[j] > 0.0 && !out.get(nx as usize, ny as usize) {
                out.set(nx as usize, ny as usize, true);
                queue.push_back(j);
            }
        }
    }
    Ok(out)
}

/// Unit step `(dx, dy)` closest to the gradient direction `angle`.
fn quantize_direction(angle: f64) -> (isize, isize) {
    use std::f64::consts::PI;
    let oct = ((angle / (PI / 4.0)).round() as i64).rem_euclid(8);
    match oct {
        0 => (1, 0),
        1 => (1, 1),
        2 => (0, 1),
        3 => (-1, 1),
        4 => (-1, 0),
        5 => (-1, -1),
        6 => (0, -1),
        _ => (1, -1),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imaging::components::connected_components;

    #[test]
    fn constant_image_has_no_edges() {
        let img = GrayImage::filled(20, 20, 77).unwrap();
        assert!(canny_edges(&img, &CannyParams::default()).unwrap().is_empty());
    }

    #[test]
    fn threshold_ordering_enforced() {
        let img = GrayImage::filled(4, 4, 0).unwrap();
        let bad = CannyParams {
            sigma: 1.0,
            t_low: 0.5,
            t_high: 0.2,
        };
        assert!(matches!(canny_edges(&img, &bad), Err(Error::InvalidArgument(_))));
        let bad_sigma = CannyParams {
            sigma: 0.0,
            ..CannyParams::default()
        };
        assert!(canny_edges(&img, &bad_sigma).is_err());
    }

    #[test]
    fn vertical_step_gives_single_line() {
        let (w, h) = (30, 20);
        let mut img = GrayImage::new(w, h).unwrap();
        for y in 0..h {
            for x in 15..w {
                img.set(x, y, 255);
            }
        }
        let e = canny_edges(&img, &CannyParams::default()).unwrap();
        for y in 0..h {
            let cols: Vec<usize> = (0..w).filter(|&x| e.get(x, y)).collect();
            assert_eq!(cols.len(), 1, "row {y}: {cols:?}");
            assert!(cols[0].abs_diff(15) <= 1);
        }
    }

    #[test]
    fn disk_gives_closed_ring_near_circle() {
        let size = 64;
        let (c, r) = (32.0, 18.0);
        let mut img = GrayImage::new(size, size).unwrap();
        for y in 0..size {
            for x in 0..size {
                if (x as f64 - c).hypot(y as f64 - c) <= r {
                    img.set(x, y, 220);
                }
            }
        }
        let e = canny_edges(&img, &CannyParams::default()).unwrap();
        assert_eq!(connected_components(&e).len(), 1);
        for p in e.points() {
            let d = (p.x as f64 - c).hypot(p.y as f64 - c);
            assert!((d - r).abs() <= 1.5, "edge pixel {p:?} at distance {d}");
        }
        // closed: the ring separates inside from outside
        let filled = crate::imaging::components::fill_holes(&e);
        assert!(filled.get(32, 32));
    }
}
