//! Raster primitives used by the preprocessing stage.

pub mod canny;
pub mod components;
pub mod draw;
pub mod filter;
pub mod moments;
pub mod morph;
pub mod rotate;
pub mod threshold;

pub use canny::{canny_edges, CannyParams};
pub use components::{
    connected_components, fill_holes, inner_boundary, largest_component, remove_small_components, AreaFilter, Component,
};
pub use filter::median_filter;
pub use moments::{mbr, moments, orientation_angle, BoundingBox, Moments, Orientation};
pub use morph::{bridge, close, dilate, erode, morph, thin, MorphOp, StructuringElement};
pub use rotate::{rotate, rotate_binary_with, rotate_gray_with, Border, RotationFrame};
pub use threshold::{binarize, histogram, otsu_threshold};
