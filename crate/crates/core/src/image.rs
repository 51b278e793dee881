//! Raster types. Both images are row-major with `x` the column and `y` the row.

use crate::error::{Error, Result};

/// A pixel coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Point {
    pub x: usize,
    pub y: usize,
}

impl Point {
    pub const fn new(x: usize, y: usize) -> Self {
        Point { x, y }
    }

    /// Chebyshev adjacency (8-neighbourhood, excluding the point itself).
    pub fn is_8_adjacent(self, other: Point) -> bool {
        let dx = self.x.abs_diff(other.x);
        let dy = self.y.abs_diff(other.y);
        dx <= 1 && dy <= 1 && (dx + dy) > 0
    }
}

/// 8-bit single channel image.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GrayImage {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize) -> Result<Self> {
        Self::filled(width, height, 0)
    }

    pub fn filled(width: usize, height: usize, value: u8) -> Result<Self> {
        check_dims(width, height)?;
        Ok(GrayImage {
            width,
            height,
            data: vec![value; width * height],
        })
    }

    pub fn from_vec(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        check_dims(width, height)?;
        if data.len() != width * height {
            return Err(Error::invalid(format!(
                "gray data length {} does not match {}x{}",
                data.len(),
                width,
                height
            )));
        }
        Ok(GrayImage { width, height, data })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [u8] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<u8> {
        self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: u8) {
        self.data[y * self.width + x] = v;
    }

    /// Pixel read with coordinates clamped to the image (replicated border).
    #[inline]
    pub fn get_clamped(&self, x: isize, y: isize) -> u8 {
        let cx = x.clamp(0, self.width as isize - 1) as usize;
        let cy = y.clamp(0, self.height as isize - 1) as usize;
        self.get(cx, cy)
    }

    pub fn mirror_horizontal(&self) -> GrayImage {
        let mut out = self.clone();
        for row in out.data.chunks_mut(self.width) {
            row.reverse();
        }
        out
    }

    /// Number of distinct intensity levels present.
    pub fn distinct_levels(&self) -> usize {
        let mut seen = [false; 256];
        for &v in &self.data {
            seen[v as usize] = true;
        }
        seen.iter().filter(|&&s| s).count()
    }
}

/// Binary raster holding 0/1 per pixel.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryImage {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl BinaryImage {
    pub fn new(width: usize, height: usize) -> Result<Self> {
        check_dims(width, height)?;
        Ok(BinaryImage {
            width,
            height,
            data: vec![0; width * height],
        })
    }

    /// Builds from raw bits; every element must be 0 or 1.
    pub fn from_vec(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        check_dims(width, height)?;
        if data.len() != width * height {
            return Err(Error::invalid(format!(
                "binary data length {} does not match {}x{}",
                data.len(),
                width,
                height
            )));
        }
        if data.iter().any(|&b| b > 1) {
            return Err(Error::invalid("binary data must contain only 0 and 1"));
        }
        Ok(BinaryImage { width, height, data })
    }

    pub fn from_points(width: usize, height: usize, points: &[Point]) -> Result<Self> {
        let mut img = Self::new(width, height)?;
        for p in points {
            if p.x >= width || p.y >= height {
                return Err(Error::invalid(format!("point {p:?} outside {width}x{height}")));
            }
            img.set(p.x, p.y, true);
        }
        Ok(img)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.data[y * self.width + x] != 0
    }

    /// Out-of-range coordinates read as background.
    #[inline]
    pub fn get_signed(&self, x: isize, y: isize) -> bool {
        if x < 0 || y < 0 || x >= self.width as isize || y >= self.height as isize {
            false
        } else {
            self.get(x as usize, y as usize)
        }
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: bool) {
        self.data[y * self.width + x] = v as u8;
    }

    pub fn count_ones(&self) -> usize {
        self.data.iter().filter(|&&b| b != 0).count()
    }

    pub fn is_empty(&self) -> bool {
        self.data.iter().all(|&b| b == 0)
    }

    /// Foreground pixels in raster order.
    pub fn points(&self) -> Vec<Point> {
        let mut out = Vec::new();
        for y in 0..self.height {
            for x in 0..self.width {
                if self.get(x, y) {
                    out.push(Point::new(x, y));
                }
            }
        }
        out
    }

    pub fn same_dims(&self, other: &BinaryImage) -> bool {
        self.width == other.width && self.height == other.height
    }

    fn check_same(&self, other: &BinaryImage) -> Result<()> {
        if self.same_dims(other) {
            Ok(())
        } else {
            Err(Error::invalid(format!(
                "dimension mismatch: {}x{} vs {}x{}",
                self.width, self.height, other.width, other.height
            )))
        }
    }

    fn zip_with(&self, other: &BinaryImage, f: impl Fn(u8, u8) -> u8) -> Result<BinaryImage> {
        self.check_same(other)?;
        Ok(BinaryImage {
            width: self.width,
            height: self.height,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn and(&self, other: &BinaryImage) -> Result<BinaryImage> {
        self.zip_with(other, |a, b| a & b)
    }

    pub fn or(&self, other: &BinaryImage) -> Result<BinaryImage> {
        self.zip_with(other, |a, b| a | b)
    }

    pub fn xor(&self, other: &BinaryImage) -> Result<BinaryImage> {
        self.zip_with(other, |a, b| a ^ b)
    }

    /// `self AND NOT other`.
    pub fn and_not(&self, other: &BinaryImage) -> Result<BinaryImage> {
        self.zip_with(other, |a, b| a & (1 - b))
    }

    pub fn is_subset_of(&self, other: &BinaryImage) -> bool {
        self.same_dims(other) && self.data.iter().zip(&other.data).all(|(&a, &b)| a <= b)
    }

    pub fn mirror_horizontal(&self) -> BinaryImage {
        let mut out = self.clone();
        for row in out.data.chunks_mut(self.width) {
            row.reverse();
        }
        out
    }

    /// Intersection-over-union; two empty images give 1.
    pub fn iou(&self, other: &BinaryImage) -> Result<f64> {
        self.check_same(other)?;
        let (mut inter, mut union) = (0usize, 0usize);
        for (&a, &b) in self.data.iter().zip(&other.data) {
            inter += (a & b) as usize;
            union += (a | b) as usize;
        }
        Ok(if union == 0 { 1.0 } else { inter as f64 / union as f64 })
    }

    /// Scales to 0/255 for edge detection and visual dumps.
    pub fn to_gray(&self) -> GrayImage {
        GrayImage {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&b| b * 255).collect(),
        }
    }
}

fn check_dims(width: usize, height: usize) -> Result<()> {
    if width == 0 || height == 0 {
        Err(Error::invalid(format!(
            "image dimensions must be >= 1, got {width}x{height}"
        )))
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_dims_and_data() {
        assert!(GrayImage::new(0, 3).is_err());
        assert!(GrayImage::from_vec(2, 2, vec![1, 2, 3]).is_err());
        assert!(BinaryImage::from_vec(2, 1, vec![0, 2]).is_err());
    }

    #[test]
    fn boolean_algebra() {
        let a = BinaryImage::from_vec(4, 1, vec![1, 1, 0, 0]).unwrap();
        let b = BinaryImage::from_vec(4, 1, vec![1, 0, 1, 0]).unwrap();
        assert_eq!(a.and(&b).unwrap().data(), &[1, 0, 0, 0]);
        assert_eq!(a.or(&b).unwrap().data(), &[1, 1, 1, 0]);
        assert_eq!(a.xor(&b).unwrap().data(), &[0, 1, 1, 0]);
        assert_eq!(a.and_not(&b).unwrap().data(), &[0, 1, 0, 0]);
        let c = BinaryImage::new(3, 1).unwrap();
        assert!(a.and(&c).is_err());
    }

    #[test]
    fn mirror_is_involution() {
        let g = GrayImage::from_vec(3, 2, vec![1, 2, 3, 4, 5, 6]).unwrap();
        assert_eq!(g.mirror_horizontal().data(), &[3, 2, 1, 6, 5, 4]);
        assert_eq!(g.mirror_horizontal().mirror_horizontal(), g);
    }
}
