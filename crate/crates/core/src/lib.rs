//! Adaptive text-line segmentation for handwritten document images.
//!
//! The pipeline binarizes a page at the statistical threshold
//! `max_intensity - sigma`, extracts 8-connected components, estimates a
//! characteristic text height from the page dimensions, groups components
//! whose vertical centers align within a pixel tolerance, validates the
//! resulting strips against the text height, and drops strips with too
//! little ink. Alongside it live a match-score evaluation harness and a
//! deterministic synthetic page generator, so segmentation quality can be
//! measured reproducibly without any external dataset.
//!
//! Data-parallel stages (statistics, binarization, score tables, ink
//! counting) run on rayon when the default `parallel` feature is enabled
//! and fall back to sequential loops without it. Results are identical
//! either way.

pub mod ccl;
pub mod error;
pub mod eval;
pub mod raster;
pub mod rng;
pub mod segmenter;
pub mod synthgen;

pub use error::{Error, Result};
