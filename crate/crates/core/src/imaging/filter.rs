use crate::error::{Error, Result};
use crate::image::GrayImage;

/// Square median filter with replicated borders. `window` must be odd and >= 3.
pub fn median_filter(img: &GrayImage, window: usize) -> Result<GrayImage> {
    if window < 3 || window.is_multiple_of(2) {
        return Err(Error::invalid(format!(
            "median window must be odd and >= 3, got {window}"
        )));
    }
    let r = (window / 2) as isize;
    let (w, h) = (img.width(), img.height());
    let mut out = vec![0u8; w * h];
    let mut buf = Vec::with_capacity(window * window);
    let mid = window * window / 2;
    for y in 0..h {
        for x in 0..w {
            buf.clear();
            for dy in -r..=r {
                for dx in -r..=r {
                    buf.push(img.get_clamped(x as isize + dx, y as isize + dy));
                }
            }
            let (_, m, _) = buf.select_nth_unstable(mid);
            out[y * w + x] = *m;
        }
    }
    GrayImage::from_vec(w, h, out)
}
