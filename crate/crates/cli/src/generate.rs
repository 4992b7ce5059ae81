use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Args;
use serde::Serialize;

use lineseg_core::raster;
use lineseg_core::synthgen::{self, CorpusSpec, PageSpec};

use crate::evaluate::to_pretty_json;
use crate::util;

#[derive(Args, Debug)]
pub struct GenArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,

    /// Output directory for pages, ground truth, and the manifest
    #[arg(short, long)]
    pub out: PathBuf,
}

/// Corpus selection shared by `gen` and `bench`: a spec file, a preset, or
/// flag overrides on top of either.
#[derive(Args, Debug, Clone)]
pub struct CorpusArgs {
    /// Corpus spec JSON file
    #[arg(long, conflicts_with = "preset")]
    pub spec: Option<PathBuf>,

    /// Named preset: default, wide-gaps, sparse-short-lines, a4-300dpi
    #[arg(long)]
    pub preset: Option<String>,

    /// Number of pages
    #[arg(long)]
    pub pages: Option<u32>,

    /// Fixed line count per page
    #[arg(long)]
    pub lines: Option<u32>,

    /// Base seed for the corpus
    #[arg(long)]
    pub seed: Option<u64>,

    /// Page width in pixels
    #[arg(long)]
    pub width: Option<u32>,

    /// Page height in pixels
    #[arg(long)]
    pub height: Option<u32>,
}

impl CorpusArgs {
    pub fn resolve(&self) -> Result<(CorpusSpec, Option<String>)> {
        let mut spec = if let Some(path) = &self.spec {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading spec {}", path.display()))?;
            serde_json::from_str::<CorpusSpec>(&text)
                .with_context(|| format!("parsing spec {}", path.display()))?
        } else if let Some(name) = &self.preset {
            match CorpusSpec::preset(name) {
                Some(spec) => spec,
                None => bail!(
                    "unknown preset {name:?}; available: {}",
                    CorpusSpec::preset_names().join(", ")
                ),
            }
        } else {
            // Bare flags start from a single-page default corpus.
            CorpusSpec {
                pages: 1,
                ..CorpusSpec::default()
            }
        };

        if let Some(pages) = self.pages {
            spec.pages = pages;
        }
        if let Some(lines) = self.lines {
            spec.lines_min = lines;
            spec.lines_max = lines;
        }
        if let Some(seed) = self.seed {
            spec.base_seed = seed;
        }
        if let Some(width) = self.width {
            spec.width = width;
        }
        if let Some(height) = self.height {
            spec.height = height;
        }
        spec.validate()?;
        Ok((spec, self.preset.clone()))
    }
}

#[derive(Debug, Serialize)]
struct ManifestPage {
    image: String,
    gt_pgm: String,
    gt_json: String,
    spec: PageSpec,
}

#[derive(Debug, Serialize)]
struct Manifest {
    preset: Option<String>,
    pages: Vec<ManifestPage>,
}

pub fn run(args: &GenArgs) -> Result<usize> {
    let (spec, preset) = args.corpus.resolve()?;
    let written = generate_corpus(&spec, preset, &args.out)?;
    println!("wrote {written} page(s) to {}", args.out.display());
    Ok(0)
}

/// Emit every page of the corpus plus `manifest.json`. Deterministic for a
/// given spec: same bytes, same order.
pub fn generate_corpus(spec: &CorpusSpec, preset: Option<String>, out: &Path) -> Result<u32> {
    let mut manifest = Manifest {
        preset,
        pages: Vec::with_capacity(spec.pages as usize),
    };
    for i in 0..spec.pages {
        let page_spec = spec.page_spec(i);
        let (img, gt) = synthgen::generate(&page_spec)?;
        let stem = format!("page_{i:04}");

        let image_name = format!("{stem}.pgm");
        let gt_pgm_name = format!("{stem}.gt.pgm");
        let gt_json_name = format!("{stem}.gt.json");

        util::write_file(&out.join(&image_name), &raster::encode_pgm(&img))?;
        util::write_file(
            &out.join(&gt_pgm_name),
            &raster::encode_pgm(&gt.to_label_gray()?),
        )?;
        util::write_file(
            &out.join(&gt_json_name),
            gt.to_gt_file().to_json().as_bytes(),
        )?;
        manifest.pages.push(ManifestPage {
            image: image_name,
            gt_pgm: gt_pgm_name,
            gt_json: gt_json_name,
            spec: page_spec,
        });
    }
    util::write_file(
        &out.join("manifest.json"),
        to_pretty_json(&manifest)?.as_bytes(),
    )?;
    Ok(spec.pages)
}
