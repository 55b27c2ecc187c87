//! Toolkit for air-drawn sketch research: manufactures (clean, corrupted)
//! training pairs from vector sketch corpora, ingests hand-landmark
//! recordings as tracking sketches, and scores faithfulness with SSIM and
//! Chamfer distance.

pub mod augment;
pub mod dataset;
pub mod error;
pub mod metrics;
pub mod raster;
pub mod seed;
pub mod sketch;
pub mod tracking;

pub use error::{Error, ErrorCategory, Result};
pub use raster::{render, RasterImage, RenderSpec};
pub use sketch::{CanvasSpec, Point, Sketch, Stroke};
