use crate::error::{Error, Result};
use crate::image::{BinaryImage, GrayImage};

pub fn histogram(img: &GrayImage) -> [u64; 256] {
    let mut h = [0u64; 256];
    for &v in img.data() {
        h[v as usize] += 1;
    }
    h
}

/// Otsu's global threshold: the level `t` maximizing between-class variance when
/// pixels `<= t` form one class. Ties resolve to the lowest level.
pub fn otsu_threshold(img: &GrayImage) -> Result<u8> {
    if img.distinct_levels() < 2 {
        return Err(Error::degenerate("Otsu threshold of a constant image"));
    }
    let hist = histogram(img);
    let n = img.data().len() as f64;
    let total: f64 = hist.iter().enumerate().map(|(i, &c)| i as f64 * c as f64).sum();

    let (mut n0, mut s0) = (0.0f64, 0.0f64);
    let mut best = (0u8, f64::NEG_INFINITY);
    for t in 0..255usize {
        n0 += hist[t] as f64;
        s0 += t as f64 * hist[t] as f64;
        let n1 = n - n0;
        if n0 == 0.0 || n1 == 0.0 {
            continue;
        }
        // n0*n1*(mu0-mu1)^2 scaled by n^2; the scale is irrelevant to the argmax.
        let diff = total * n0 - n * s0;
        let var = diff * diff / (n0 * n1);
        if var > best.1 {
            best = (t as u8, var);
        }
    }
    Ok(best.0)
}

/// Pixel is foreground iff its intensity exceeds `t`.
pub fn binarize(img: &GrayImage, t: u8) -> BinaryImage {
    let data = img.data().iter().map(|&v| (v > t) as u8).collect();
    BinaryImage::from_vec(img.width(), img.height(), data).expect("dimensions come from a valid image")
}
