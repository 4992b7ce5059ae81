use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Result;
use clap::Args;
use lineseg_core::raster;
use lineseg_core::segmenter::{self, SegParams, SegmentationReport};

use crate::options::SegOptions;
use crate::util;

#[derive(Args, Debug)]
pub struct SegmentArgs {
    /// Input images or directories of .pgm/.png files
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,

    /// Output directory for per-image JSON results
    #[arg(short, long)]
    pub out: PathBuf,

    #[command(flatten)]
    pub seg: SegOptions,

    /// Also write an overlay image with line strips outlined
    #[arg(long)]
    pub overlay: bool,

    /// Worker pool size; 1 keeps processing strictly sequential
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,

    /// Print per-file progress
    #[arg(long)]
    pub verbose: bool,
}

pub fn run(args: &SegmentArgs) -> Result<usize> {
    let params = args.seg.to_params()?;
    let files = util::collect_images(&args.inputs)?;
    let outcomes = segment_files(&files, &params, &args.out, args.overlay, args.jobs);

    let mut errors = 0usize;
    for (path, outcome) in files.iter().zip(&outcomes) {
        match outcome {
            Ok(report) => {
                if args.verbose {
                    eprintln!("{}: {} line(s)", path.display(), report.line_count());
                }
            }
            Err(message) => {
                errors += 1;
                eprintln!("{}: {message}", path.display());
            }
        }
    }
    Ok(errors)
}

/// Segment each file and write `<stem>.json` (and optionally
/// `<stem>.overlay.pgm`) into `out`. One failure does not stop the batch.
pub fn segment_files(
    files: &[PathBuf],
    params: &SegParams,
    out: &Path,
    overlay: bool,
    jobs: usize,
) -> Vec<Result<SegmentationReport, String>> {
    let work: Vec<PathBuf> = files.to_vec();
    util::map_items(work, jobs, |path| {
        segment_one(&path, params, out, overlay).map_err(|e| format!("{e:#}"))
    })
}

fn segment_one(
    path: &Path,
    params: &SegParams,
    out: &Path,
    overlay: bool,
) -> Result<SegmentationReport> {
    let bytes = fs::read(path)?;
    let img = raster::load_gray(&bytes)?;
    let result = segmenter::segment_page(&img, params)?;
    let name = path
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let report = SegmentationReport::new(name, &result);

    let stem = util::file_stem(path);
    util::write_file(
        &out.join(format!("{stem}.json")),
        report.to_json().as_bytes(),
    )?;
    if overlay {
        let rendered = segmenter::overlay(&img, &result.lines);
        util::write_file(
            &out.join(format!("{stem}.overlay.pgm")),
            &raster::encode_pgm(&rendered),
        )?;
    }
    Ok(report)
}
