use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Args;
use serde::Serialize;

use lineseg_core::ccl::BBox;
use lineseg_core::eval::{self, GroundTruthFile, MatchReport, RegionSet, RegionSource};
use lineseg_core::raster::{self, BinaryMask};
use lineseg_core::segmenter::SegmentationReport;

use crate::options::EvalOptions;
use crate::util;

#[derive(Args, Debug)]
pub struct EvalArgs {
    /// Directory of segmentation result JSON files
    #[arg(long)]
    pub results: PathBuf,

    /// Directory of ground-truth files (<stem>.gt.pgm or <stem>.gt.json)
    #[arg(long)]
    pub truth: PathBuf,

    /// Output directory for per-page reports and the summary
    #[arg(short, long)]
    pub out: PathBuf,

    #[command(flatten)]
    pub eval: EvalOptions,

    /// Embed the full score table in each report
    #[arg(long)]
    pub verbose: bool,
}

#[derive(Debug, Serialize)]
pub struct Summary {
    pub pages: u32,
    pub mean_dr: f64,
    pub count_accuracy_rate: f64,
}

pub fn run(args: &EvalArgs) -> Result<usize> {
    args.eval.validate()?;
    let pairs = find_pairs(&args.results, &args.truth)?;

    let mut errors = 0usize;
    let mut page_outcomes = Vec::new();
    for pair in &pairs {
        match &pair.truth {
            Some(truth_path) => {
                match evaluate_pair(
                    &pair.result,
                    truth_path,
                    args.eval.match_threshold,
                    args.eval.weights.as_tuple(),
                    args.verbose,
                ) {
                    Ok(outcome) => {
                        let report_path = args.out.join(format!("{}.report.json", pair.stem));
                        util::write_file(&report_path, outcome.report.to_json().as_bytes())?;
                        page_outcomes.push(outcome);
                    }
                    Err(err) => {
                        errors += 1;
                        eprintln!("{}: {err:#}", pair.result.display());
                    }
                }
            }
            None => {
                errors += 1;
                eprintln!(
                    "{}: no ground truth named {}.gt.pgm or {}.gt.json",
                    pair.result.display(),
                    pair.stem,
                    pair.stem
                );
            }
        }
    }

    let summary = summarize(&page_outcomes);
    util::write_file(
        &args.out.join("summary.json"),
        to_pretty_json(&summary)?.as_bytes(),
    )?;
    println!(
        "{} page(s), mean DR {:.4}, count accuracy {:.4}",
        summary.pages, summary.mean_dr, summary.count_accuracy_rate
    );
    Ok(errors)
}

pub struct PageOutcome {
    pub report: MatchReport,
    pub count_correct: bool,
}

pub fn summarize(outcomes: &[PageOutcome]) -> Summary {
    let pages = outcomes.len() as u32;
    if pages == 0 {
        return Summary {
            pages: 0,
            mean_dr: 0.0,
            count_accuracy_rate: 0.0,
        };
    }
    let dr_sum: f64 = outcomes.iter().map(|o| o.report.detection_rate).sum();
    let correct = outcomes.iter().filter(|o| o.count_correct).count();
    Summary {
        pages,
        mean_dr: dr_sum / pages as f64,
        count_accuracy_rate: correct as f64 / pages as f64,
    }
}

pub fn to_pretty_json<T: Serialize>(value: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text)
}

pub struct Pair {
    pub stem: String,
    pub result: PathBuf,
    pub truth: Option<PathBuf>,
}

/// Pair result JSONs with ground truth by shared filename stem.
pub fn find_pairs(results_dir: &Path, truth_dir: &Path) -> Result<Vec<Pair>> {
    let mut pairs = Vec::new();
    for entry in
        fs::read_dir(results_dir).with_context(|| format!("reading {}", results_dir.display()))?
    {
        let path = entry?.path();
        let name = path
            .file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        if !name.ends_with(".json")
            || name.ends_with(".report.json")
            || name.ends_with(".gt.json")
            || name == "summary.json"
            || name == "manifest.json"
        {
            continue;
        }
        let stem = util::file_stem(&path);
        let gt_pgm = truth_dir.join(format!("{stem}.gt.pgm"));
        let gt_json = truth_dir.join(format!("{stem}.gt.json"));
        let truth = if gt_pgm.is_file() {
            Some(gt_pgm)
        } else if gt_json.is_file() {
            Some(gt_json)
        } else {
            None
        };
        pairs.push(Pair {
            stem,
            result: path,
            truth,
        });
    }
    if pairs.is_empty() {
        bail!("no pairs found in {}", results_dir.display());
    }
    pairs.sort_by(|a, b| a.stem.cmp(&b.stem));
    Ok(pairs)
}

/// Evaluate one result file against one ground-truth file.
///
/// A label-map PGM scores pixel regions: its non-zero pixels double as the
/// foreground mask that detected strips are intersected with. A JSON ground
/// truth scores raw rectangles on both sides.
pub fn evaluate_pair(
    result_path: &Path,
    truth_path: &Path,
    threshold: f64,
    weights: (f64, f64, f64),
    verbose: bool,
) -> Result<PageOutcome> {
    let report = SegmentationReport::from_json(&fs::read_to_string(result_path)?)?;
    let strips = report.line_strips()?;

    let truth_name = truth_path.to_string_lossy();
    let (truth_set, detected_set, gt_line_count) = if truth_name.ends_with(".gt.pgm") {
        let gt_img = raster::load_gray(&fs::read(truth_path)?)?;
        let truth = RegionSet::from_label_pgm(RegionSource::GroundTruth, &gt_img)?;
        let foreground: Vec<bool> = gt_img.pixels().iter().map(|&p| p != 0).collect();
        let mask = BinaryMask::new(gt_img.width(), gt_img.height(), foreground)?;
        let detected = RegionSet::from_rects(
            RegionSource::Detected,
            gt_img.width(),
            gt_img.height(),
            &strips,
            Some(&mask),
        )?;
        let count = truth.len();
        (truth, detected, count)
    } else {
        let gt = GroundTruthFile::from_json(&fs::read_to_string(truth_path)?)?;
        let gt_rects = gt.bboxes()?;
        let (width, height) = rect_space(&strips, &gt_rects);
        let truth =
            RegionSet::from_rects(RegionSource::GroundTruth, width, height, &gt_rects, None)?;
        let detected = RegionSet::from_rects(RegionSource::Detected, width, height, &strips, None)?;
        (truth, detected, gt.line_count as usize)
    };

    if detected_set.overlap_pixels() > 0 {
        eprintln!(
            "{}: warning: detected regions overlap on {} pixel(s)",
            result_path.display(),
            detected_set.overlap_pixels()
        );
    }

    let mut match_report = eval::evaluate(&detected_set, &truth_set, threshold, weights)?;
    if verbose {
        let table = eval::MatchTable::build(&truth_set, &detected_set);
        match_report.scores = Some(table.rows().to_vec());
    }
    Ok(PageOutcome {
        count_correct: report.line_count() == gt_line_count,
        report: match_report,
    })
}

/// Smallest space covering every rectangle from both sides.
fn rect_space(a: &[BBox], b: &[BBox]) -> (u32, u32) {
    let mut width = 1u32;
    let mut height = 1u32;
    for r in a.iter().chain(b) {
        width = width.max(r.x_max + 1);
        height = height.max(r.y_max + 1);
    }
    (width, height)
}
