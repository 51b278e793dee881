//! Splitting the hand contour into left-side and right-side finger profiles
//! with a one-sided horizontal gradient.

use crate::error::{Error, Result};
use crate::image::{BinaryImage, GrayImage};
use crate::imaging::components::connected_components;
use crate::imaging::morph::{bridge, close, thin, StructuringElement};

/// Signed horizontal difference `(g(x, y) - g(x + 1, y)) / p`, truncated toward
/// zero; the last column is zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradientImage {
    width: usize,
    height: usize,
    data: Vec<i16>,
}

impl GradientImage {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[i16] {
        &self.data
    }

    pub fn get(&self, x: usize, y: usize) -> i16 {
        self.data[y * self.width + x]
    }
}

pub fn gradient_transform(gray: &GrayImage, p: u32) -> Result<GradientImage> {
    if !(1..=255).contains(&p) {
        return Err(Error::invalid(format!("gradient divisor must be in 1..=255, got {p}")));
    }
    let (w, h) = (gray.width(), gray.height());
    let mut data = vec![0i16; w * h];
    for y in 0..h {
        for x in 0..w.saturating_sub(1) {
            let d = gray.get(x, y) as i16 - gray.get(x + 1, y) as i16;
            // Integer division in Rust truncates toward zero.
            data[y * w + x] = d / p as i16;
        }
    }
    Ok(GradientImage {
        width: w,
        height: h,
        data,
    })
}

/// Pixels whose gradient value is at least 1.
pub fn binarize_transform(g: &GradientImage) -> BinaryImage {
    let data = g.data.iter().map(|&v| u8::from(v >= 1)).collect();
    BinaryImage::from_vec(g.width, g.height, data).expect("gradient dims are valid")
}

/// `contour - trf` with non-positive results clamped to zero, i.e. contour
/// pixels that are not set in `trf`.
pub fn subtract_lsfp(contour: &BinaryImage, trf: &BinaryImage) -> Result<BinaryImage> {
    contour.and_not(trf)
}

/// Corrected left profiles together with the bookkeeping needed to check
/// consistency against the contour.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrectedLsfp {
    /// Thinned profiles after small-component removal.
    pub thinned: BinaryImage,
    pub components: usize,
}

/// Closing, bridging, thinning and small-component removal, then a count check.
///
/// Closing and bridging are restricted to `contour` pixels: they exist to
/// refill profile pixels that gradient noise knocked out, and unconstrained
/// they also fill the one-pixel jaggies of a resampled outline, after which
/// thinning takes shortcuts through the hand interior.
pub fn correct_lsfp(
    actual: &BinaryImage,
    contour: &BinaryImage,
    expected_fingers: usize,
    close_size: usize,
    min_component_len: usize,
) -> Result<CorrectedLsfp> {
    let se = StructuringElement::square(close_size)?;
    let closed = close(actual, &se).and(contour)?;
    let bridged = bridge(&closed).and(contour)?;
    let thinned = thin(&bridged);
    let mut kept = BinaryImage::new(actual.width(), actual.height())?;
    let mut components = 0;
    for c in connected_components(&thinned) {
        if c.area >= min_component_len {
            components += 1;
            for p in &c.pixels {
                kept.set(p.x, p.y, true);
            }
        }
    }
    if components < expected_fingers {
        return Err(Error::SegmentationFailure {
            expected: expected_fingers,
            found: components,
        });
    }
    Ok(CorrectedLsfp {
        thinned: kept,
        components,
    })
}

pub fn xor_rsfp(contour: &BinaryImage, lsfp: &BinaryImage) -> Result<BinaryImage> {
    contour.xor(lsfp)
}

/// Disjoint left/right profile images that together make up the contour.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfilePair {
    pub lsfp: BinaryImage,
    pub rsfp: BinaryImage,
}

impl ProfilePair {
    pub fn union(&self) -> BinaryImage {
        self.lsfp.or(&self.rsfp).expect("profile images share dims")
    }

    pub fn overlap(&self) -> usize {
        self.lsfp
            .and(&self.rsfp)
            .expect("profile images share dims")
            .count_ones()
    }
}

/// Projects corrected left profiles back onto the contour and derives the right
/// profiles by XOR, so the two sides are disjoint and cover the contour.
///
/// Corrected pixels off the contour (possible when the correction was not
/// constrained to it) are dropped; more than `tolerance` of them is an
/// inconsistency. Fragments shorter than
/// `min_component_len` that the projection leaves on either side are handed
/// to the other side, which is what keeps each side at one component per
/// finger when noise punches short gaps into a profile.
pub fn split_profiles(
    contour: &BinaryImage,
    corrected: &BinaryImage,
    tolerance: f64,
    min_component_len: usize,
    expected_fingers: usize,
) -> Result<ProfilePair> {
    let total = corrected.count_ones();
    let outside = corrected.and_not(contour)?.count_ones();
    if total == 0 || outside as f64 > tolerance * total as f64 {
        return Err(Error::ProfileInconsistency { outside, total });
    }
    let mut lsfp = corrected.and(contour)?;
    let mut rsfp = xor_rsfp(contour, &lsfp)?;
    move_short_fragments(&mut rsfp, &mut lsfp, min_component_len);
    move_short_fragments(&mut lsfp, &mut rsfp, min_component_len);

    let nl = connected_components(&lsfp).len();
    let nr = connected_components(&rsfp).len();
    if nl != expected_fingers || nr != expected_fingers {
        return Err(Error::SegmentationFailure {
            expected: expected_fingers,
            found: if nl != expected_fingers { nl } else { nr },
        });
    }
    Ok(ProfilePair { lsfp, rsfp })
}

fn move_short_fragments(from: &mut BinaryImage, to: &mut BinaryImage, min_len: usize) {
    for c in connected_components(from) {
        if c.area < min_len {
            for p in &c.pixels {
                from.set(p.x, p.y, false);
                to.set(p.x, p.y, true);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ring7() -> BinaryImage {
        let mut b = BinaryImage::new(7, 7).unwrap();
        for i in 1..6 {
            b.set(i, 1, true);
            b.set(i, 5, true);
            b.set(1, i, true);
            b.set(5, i, true);
        }
        b
    }

    fn right_half(b: &BinaryImage) -> BinaryImage {
        let mut r = BinaryImage::new(b.width(), b.height()).unwrap();
        for p in b.points() {
            if p.x >= 4 {
                r.set(p.x, p.y, true);
            }
        }
        r
    }

    #[test]
    fn gradient_examples() {
        let g = GrayImage::from_vec(2, 1, vec![200, 100]).unwrap();
        assert_eq!(gradient_transform(&g, 2).unwrap().data(), &[50, 0]);
        let g = GrayImage::from_vec(2, 1, vec![100, 200]).unwrap();
        assert_eq!(gradient_transform(&g, 2).unwrap().data(), &[-50, 0]);
        // truncation toward zero for odd differences
        let g = GrayImage::from_vec(3, 1, vec![3, 0, 3]).unwrap();
        assert_eq!(gradient_transform(&g, 2).unwrap().data(), &[1, -1, 0]);
        assert!(gradient_transform(&g, 0).is_err());
        assert!(gradient_transform(&g, 256).is_err());
    }

    #[test]
    fn divisor_255_blanks_everything() {
        let data: Vec<u8> = (0..64u32).map(|i| (i * 37 % 256) as u8).collect();
        let g = GrayImage::from_vec(8, 8, data).unwrap();
        assert!(binarize_transform(&gradient_transform(&g, 255).unwrap()).is_empty());
    }

    #[test]
    fn binarize_at_one() {
        let g = GradientImage {
            width: 4,
            height: 1,
            data: vec![-3, 0, 1, 7],
        };
        assert_eq!(binarize_transform(&g).data(), &[0, 0, 1, 1]);
    }

    #[test]
    fn subtraction_and_xor_on_toy_ring() {
        let ring = ring7();
        let trf = right_half(&ring);
        let left = subtract_lsfp(&ring, &trf).unwrap();
        assert_eq!(left, ring.and_not(&trf).unwrap());
        assert!(left.points().iter().all(|p| p.x < 4));
        assert_eq!(xor_rsfp(&ring, &left).unwrap(), trf);
        assert!(subtract_lsfp(&ring, &ring).unwrap().is_empty());
        assert_eq!(subtract_lsfp(&ring, &BinaryImage::new(7, 7).unwrap()).unwrap(), ring);
        assert!(subtract_lsfp(&ring, &BinaryImage::new(6, 7).unwrap()).is_err());
    }

    fn vertical_lines(xs: &[usize], gap_at: Option<(usize, usize)>) -> BinaryImage {
        let mut b = BinaryImage::new(60, 40).unwrap();
        for &x in xs {
            for y in 5..35 {
                b.set(x, y, true);
            }
        }
        if let Some((x, y)) = gap_at {
            b.set(x, y, false);
        }
        b
    }

    #[test]
    fn clean_profiles_survive_correction() {
        let b = vertical_lines(&[5, 15, 25, 35, 45], None);
        let c = correct_lsfp(&b, &b, 5, 3, 15).unwrap();
        assert_eq!(c.components, 5);
        assert_eq!(c.thinned, b);
    }

    #[test]
    fn one_pixel_gap_is_bridged() {
        let contour = vertical_lines(&[5, 15, 25, 35, 45], None);
        let b = vertical_lines(&[5, 15, 25, 35, 45], Some((35, 20)));
        assert_eq!(connected_components(&b).len(), 6);
        let c = correct_lsfp(&b, &contour, 5, 3, 15).unwrap();
        assert_eq!(c.components, 5);
    }

    #[test]
    fn missing_finger_is_a_segmentation_failure() {
        let b = vertical_lines(&[5, 15, 25, 35], None);
        assert!(matches!(
            correct_lsfp(&b, &b, 5, 3, 15),
            Err(Error::SegmentationFailure { expected: 5, found: 4 })
        ));
    }

    #[test]
    fn split_rejects_profiles_off_the_contour() {
        let contour = vertical_lines(&[5, 15, 25, 35, 45], None);
        let shifted = vertical_lines(&[6, 16, 26, 36, 46], None);
        assert!(matches!(
            split_profiles(&contour, &shifted, 0.02, 15, 5),
            Err(Error::ProfileInconsistency { .. })
        ));
    }

    fn arb_pair() -> impl Strategy<Value = (BinaryImage, BinaryImage)> {
        let n = 16 * 12;
        (
            proptest::collection::vec(proptest::bool::ANY, n),
            proptest::collection::vec(proptest::bool::ANY, n),
        )
            .prop_map(|(a, b)| {
                let f = |v: Vec<bool>| BinaryImage::from_vec(16, 12, v.into_iter().map(u8::from).collect()).unwrap();
                let contour = f(a);
                let sub = f(b).and(&contour).unwrap();
                (contour, sub)
            })
    }

    proptest! {
        #[test]
        fn xor_is_an_involution((contour, lsfp) in arb_pair()) {
            let r = xor_rsfp(&contour, &lsfp).unwrap();
            prop_assert_eq!(xor_rsfp(&contour, &r).unwrap(), lsfp.clone());
            prop_assert!(r.and(&lsfp).unwrap().is_empty());
        }

        #[test]
        fn subtraction_is_and_not((contour, trf) in arb_pair()) {
            prop_assert_eq!(subtract_lsfp(&contour, &trf).unwrap(), contour.and_not(&trf).unwrap());
        }
    }
}
