//! `bench`: generate a corpus, segment it, and evaluate the results in one
//! pass, leaving the full output tree behind for inspection.

use std::path::PathBuf;

use anyhow::Result;
use clap::Args;

use crate::evaluate::{self, to_pretty_json};
use crate::generate::{self, CorpusArgs};
use crate::options::{EvalOptions, SegOptions};
use crate::util;

#[derive(Args, Debug)]
pub struct BenchArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,

    /// Output directory; receives corpus/, results/, reports/, summary.json
    #[arg(short, long)]
    pub out: PathBuf,

    #[command(flatten)]
    pub seg: SegOptions,

    #[command(flatten)]
    pub eval: EvalOptions,

    /// Also write overlay images next to the results
    #[arg(long)]
    pub overlay: bool,

    /// Worker pool size; 1 keeps processing strictly sequential
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

pub fn run(args: &BenchArgs) -> Result<usize> {
    let params = args.seg.to_params()?;
    args.eval.validate()?;
    let (spec, preset) = args.corpus.resolve()?;

    let corpus_dir = args.out.join("corpus");
    let results_dir = args.out.join("results");
    let reports_dir = args.out.join("reports");

    generate::generate_corpus(&spec, preset, &corpus_dir)?;

    let images: Vec<PathBuf> = (0..spec.pages)
        .map(|i| corpus_dir.join(format!("page_{i:04}.pgm")))
        .collect();
    let mut errors = 0usize;
    let seg_outcomes =
        crate::segment::segment_files(&images, &params, &results_dir, args.overlay, args.jobs);
    for (path, outcome) in images.iter().zip(&seg_outcomes) {
        if let Err(message) = outcome {
            errors += 1;
            eprintln!("{}: {message}", path.display());
        }
    }

    let pairs = evaluate::find_pairs(&results_dir, &corpus_dir)?;
    let mut outcomes = Vec::new();
    for pair in &pairs {
        let Some(truth_path) = &pair.truth else {
            errors += 1;
            eprintln!("{}: missing ground truth", pair.result.display());
            continue;
        };
        match evaluate::evaluate_pair(
            &pair.result,
            truth_path,
            args.eval.match_threshold,
            args.eval.weights.as_tuple(),
            false,
        ) {
            Ok(outcome) => {
                let report_path = reports_dir.join(format!("{}.report.json", pair.stem));
                util::write_file(&report_path, outcome.report.to_json().as_bytes())?;
                outcomes.push(outcome);
            }
            Err(err) => {
                errors += 1;
                eprintln!("{}: {err:#}", pair.result.display());
            }
        }
    }

    let summary = evaluate::summarize(&outcomes);
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
