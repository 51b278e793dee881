pub mod batch;
pub mod classify;
pub mod error;
pub mod eval;
pub mod features;
pub mod hand;
pub mod image;
pub mod imaging;
pub mod pnm;
pub mod profile;
pub mod seed;
pub mod selection;
pub mod synth;

pub use error::{Error, Result, Stage};
pub use hand::{Hand, FINGER_NAMES};
pub use image::{BinaryImage, GrayImage, Point};
