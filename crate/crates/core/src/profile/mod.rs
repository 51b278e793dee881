//! From a grayscale hand scan to five isolated, normalized fingers.
//!
//! The hand is segmented and turned upright, its outline is split into left
//! and right finger profiles by a one-sided horizontal gradient, the wrist is
//! cut off along a line found from the thumb, and every finger is closed and
//! centred on its own canvas.

mod decompose;
mod isolate;
mod wrist;

pub use decompose::{
    binarize_transform, correct_lsfp, gradient_transform, split_profiles, subtract_lsfp, xor_rsfp, CorrectedLsfp,
    GradientImage, ProfilePair,
};
pub use isolate::{isolate_fingers, Canvas, FingerSet, NormalizedFinger};
pub use wrist::{order_profiles, remove_wrist, OrderedProfiles, WristLine};

use crate::error::{Error, Result, Stage};
use crate::hand::Hand;
use crate::image::{BinaryImage, GrayImage};
use crate::imaging::{
    binarize, canny_edges, dilate, fill_holes, inner_boundary, largest_component, median_filter, moments,
    orientation_angle, otsu_threshold, rotate_binary_with, rotate_gray_with, Border, CannyParams, RotationFrame,
    StructuringElement,
};

/// Number of fingers every hand must yield.
pub const FINGERS: usize = 5;

/// Mask boundary pixels count as outline when a Canny edge lies within this
/// many pixels; sharp valleys pull the smoothed edge off the mask by up to 2 px.
const EDGE_SNAP: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineParams {
    pub median_window: usize,
    pub canny: CannyParams,
    /// Components smaller than this fraction of the image area are noise.
    pub min_area_fraction: f64,
    /// Gradient divisor.
    pub p: u32,
    pub close_size: usize,
    /// Shortest profile fragment kept as a component of its own.
    pub min_component_len: usize,
    /// Share of corrected profile pixels allowed off the contour.
    pub xor_tolerance: f64,
    pub canvas: Canvas,
}

impl Default for PipelineParams {
    fn default() -> Self {
        PipelineParams {
            median_window: 3,
            canny: CannyParams::default(),
            min_area_fraction: 0.001,
            p: 2,
            close_size: 3,
            min_component_len: 15,
            xor_tolerance: 0.02,
            canvas: Canvas::default(),
        }
    }
}

impl PipelineParams {
    pub fn validate(&self) -> Result<()> {
        if self.median_window == 0 || self.median_window.is_multiple_of(2) {
            return Err(Error::invalid("median window must be odd"));
        }
        if !(0.0..1.0).contains(&self.min_area_fraction) {
            return Err(Error::invalid("min area fraction must be in [0, 1)"));
        }
        if !(1..=255).contains(&self.p) {
            return Err(Error::invalid("gradient divisor must be in 1..=255"));
        }
        if !(0.0..=1.0).contains(&self.xor_tolerance) {
            return Err(Error::invalid("xor tolerance must be in [0, 1]"));
        }
        if self.min_component_len == 0 || self.canvas.width == 0 || self.canvas.height == 0 {
            return Err(Error::invalid("component length and canvas size must be positive"));
        }
        Ok(())
    }
}

/// Output of segmentation and upright normalization.
#[derive(Debug, Clone)]
pub struct Preprocessed {
    pub threshold: u8,
    /// Otsu foreground before hole filling.
    pub binary: BinaryImage,
    /// Largest component with holes filled, in input coordinates.
    pub filled: BinaryImage,
    /// Small blobs discarded by area filtering.
    pub discarded_blobs: usize,
    pub frame: RotationFrame,
    /// Upright hand mask.
    pub mask: BinaryImage,
    /// Upright median-filtered grayscale.
    pub gray: GrayImage,
    /// Largest edge component of the upright mask.
    pub contour: BinaryImage,
}

/// Median filter, Otsu, hole filling, largest component, moment-based
/// rotation to upright, and the outline of the rotated mask.
///
/// The outline is traced after rotation: nearest-neighbour rotation of a
/// one-pixel curve breaks its connectivity, while a rotated filled mask keeps
/// a clean edge.
pub fn preprocess(gray: &GrayImage, params: &PipelineParams) -> Result<Preprocessed> {
    params.validate()?;
    let filtered = median_filter(gray, params.median_window).map_err(|e| e.at(Stage::Preprocess))?;
    let threshold = otsu_threshold(&filtered).map_err(|e| e.at(Stage::Preprocess))?;
    let binary = binarize(&filtered, threshold);
    let min_area = (params.min_area_fraction * (gray.width() * gray.height()) as f64).ceil() as usize;
    let kept = largest_component(&fill_holes(&binary), min_area).map_err(|e| e.at(Stage::Preprocess))?;
    if kept.kept_area < min_area.max(1) {
        return Err(Error::SegmentationFailure { expected: 1, found: 0 }.at(Stage::Preprocess));
    }
    let filled = fill_holes(&kept.mask);

    let m = moments(&filled).map_err(|e| e.at(Stage::Orientation))?;
    let theta = orientation_angle(&m).angle_or_zero();
    let frame = RotationFrame::enclosing(gray.width(), gray.height(), theta, m.centroid());
    let mask = rotate_binary_with(&filled, &frame, Border::Replicate);
    let upright_gray = rotate_gray_with(&filtered, &frame, Border::Replicate);

    // Canny decides where the outline is; the pixels themselves are taken from
    // the mask's inner boundary so that every contour pixel is a hand pixel and
    // diagonal edges stay one pixel per row. Border cuts (the forearm running
    // off the scan) produce no Canny response and drop out here.
    let edges = canny_edges(&mask.to_gray(), &params.canny).map_err(|e| e.at(Stage::Contour))?;
    let near_edge = dilate(&edges, &StructuringElement::square(2 * EDGE_SNAP + 1)?);
    let outline = inner_boundary(&mask).and(&near_edge)?;
    let contour = largest_component(&outline, 1).map_err(|e| e.at(Stage::Contour))?.mask;
    Ok(Preprocessed {
        threshold,
        binary,
        filled,
        discarded_blobs: kept.discarded_small + kept.discarded_other,
        frame,
        mask,
        gray: upright_gray,
        contour,
    })
}

/// Every intermediate of a successful run.
#[derive(Debug, Clone)]
pub struct Extraction {
    pub pre: Preprocessed,
    pub trf: BinaryImage,
    /// Contour minus the gradient image, before correction.
    pub lsfp_actual: BinaryImage,
    pub corrected: CorrectedLsfp,
    pub profiles: ProfilePair,
    pub order: OrderedProfiles,
    /// Profiles with the wrist removed.
    pub nlp: BinaryImage,
    pub nrp: BinaryImage,
    pub fingers: FingerSet,
}

impl Extraction {
    /// Stage images in pipeline order, named for debug dumps.
    pub fn stages(&self) -> [(&'static str, &BinaryImage); 10] {
        [
            ("binary", &self.pre.binary),
            ("filled", &self.pre.filled),
            ("mask", &self.pre.mask),
            ("contour", &self.pre.contour),
            ("trf", &self.trf),
            ("lsfp_actual", &self.lsfp_actual),
            ("lsfp", &self.profiles.lsfp),
            ("rsfp", &self.profiles.rsfp),
            ("nlp", &self.nlp),
            ("nrp", &self.nrp),
        ]
    }
}

/// Runs the whole pipeline on one scan. Left hands are mirrored first so
/// that the thumb always ends up on the right.
pub fn extract_detailed(gray: &GrayImage, hand: Hand, params: &PipelineParams) -> Result<Extraction> {
    let mirrored;
    let input = match hand {
        Hand::Right => gray,
        Hand::Left => {
            mirrored = gray.mirror_horizontal();
            &mirrored
        }
    };
    let pre = preprocess(input, params)?;

    let grad = gradient_transform(&pre.gray, params.p).map_err(|e| e.at(Stage::Transform))?;
    let trf = binarize_transform(&grad);
    let lsfp_actual = subtract_lsfp(&pre.contour, &trf).map_err(|e| e.at(Stage::Transform))?;
    let corrected = correct_lsfp(
        &lsfp_actual,
        &pre.contour,
        FINGERS,
        params.close_size,
        params.min_component_len,
    )
    .map_err(|e| e.at(Stage::CorrectLsfp))?;
    let profiles = split_profiles(
        &pre.contour,
        &corrected.thinned,
        params.xor_tolerance,
        params.min_component_len,
        FINGERS,
    )
    .map_err(|e| {
        let stage = match e {
            Error::ProfileInconsistency { .. } => Stage::XorRsfp,
            _ => Stage::CorrectLsfp,
        };
        e.at(stage)
    })?;
    let order = order_profiles(&profiles, FINGERS).map_err(|e| e.at(Stage::Isolation))?;
    let (cut, wrist) = remove_wrist(&profiles, &order).map_err(|e| e.at(Stage::WristRemoval))?;
    let fingers = isolate_fingers(&cut.lsfp, &cut.rsfp, hand, pre.frame, wrist, params.canvas)
        .map_err(|e| e.at(Stage::Isolation))?;
    Ok(Extraction {
        pre,
        trf,
        lsfp_actual,
        corrected,
        profiles,
        order,
        nlp: cut.lsfp,
        nrp: cut.rsfp,
        fingers,
    })
}

pub fn extract_profiles(gray: &GrayImage, hand: Hand, params: &PipelineParams) -> Result<FingerSet> {
    extract_detailed(gray, hand, params).map(|x| x.fingers)
}
