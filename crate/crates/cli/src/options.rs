//! Shared flag groups. Defaults are the method's constants: 15 px tolerance,
//! 30% ink fraction, 95% match threshold, weights 1/0.25/0.25.

use anyhow::{bail, Result};
use clap::Args;
use lineseg_core::segmenter::SegParams;

#[derive(Args, Debug, Clone)]
pub struct SegOptions {
    /// Vertical alignment tolerance in pixels
    #[arg(long, default_value_t = 15)]
    pub tolerance: u32,

    /// Smallest component area kept, in pixels
    #[arg(long = "area-min", default_value_t = 15)]
    pub area_min: u32,

    /// Largest component area kept; unbounded when omitted
    #[arg(long = "area-max")]
    pub area_max: Option<u32>,

    /// Minimum ink fraction a line strip must carry
    #[arg(long = "min-ink", default_value_t = 0.30)]
    pub min_ink: f64,

    /// Lower strip-height bound as a multiple of the text height
    #[arg(long = "height-min-factor", default_value_t = 0.5)]
    pub height_min_factor: f64,

    /// Upper strip-height bound as a multiple of the text height
    #[arg(long = "height-max-factor", default_value_t = 3.0)]
    pub height_max_factor: f64,
}

impl SegOptions {
    pub fn to_params(&self) -> Result<SegParams> {
        let params = SegParams {
            alignment_tolerance: self.tolerance,
            area_min: self.area_min,
            area_max: self.area_max,
            min_height_factor: self.height_min_factor,
            max_height_factor: self.height_max_factor,
            min_ink_fraction: self.min_ink,
        };
        params.validate()?;
        Ok(params)
    }
}

#[derive(Args, Debug, Clone)]
pub struct EvalOptions {
    /// MatchScore acceptance threshold
    #[arg(long = "match-threshold", default_value_t = 0.95)]
    pub match_threshold: f64,

    /// Detection-rate weights as w1,w2,w3
    #[arg(long, default_value = "1,0.25,0.25", value_parser = parse_weights)]
    pub weights: Weights,
}

impl EvalOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.match_threshold > 0.0 && self.match_threshold <= 1.0) {
            bail!(
                "match threshold {} must lie in (0, 1]",
                self.match_threshold
            );
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Weights(pub f64, pub f64, pub f64);

impl Weights {
    pub fn as_tuple(&self) -> (f64, f64, f64) {
        (self.0, self.1, self.2)
    }
}

fn parse_weights(text: &str) -> Result<Weights, String> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("expected w1,w2,w3 but got {text:?}"));
    }
    let mut values = [0.0f64; 3];
    for (slot, part) in values.iter_mut().zip(&parts) {
        *slot = part
            .trim()
            .parse()
            .map_err(|e| format!("bad weight {part:?}: {e}"))?;
        if !slot.is_finite() || *slot < 0.0 {
            return Err(format!("weight {part:?} must be finite and non-negative"));
        }
    }
    Ok(Weights(values[0], values[1], values[2]))
}
