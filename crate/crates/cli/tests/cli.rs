//! End-to-end tests of the command-line surface: happy paths, partial
//! failures, pairing rules, and determinism of generated corpora.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn lineseg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lineseg"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn assert_success(out: &Output) {
    assert!(
        out.status.success(),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

/// Byte-compare two directory trees recursively.
fn tree_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut entries = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(current) = stack.pop() {
        for entry in fs::read_dir(&current).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path
                    .strip_prefix(dir)
                    .unwrap()
                    .to_string_lossy()
                    .into_owned();
                entries.push((rel, fs::read(&path).unwrap()));
            }
        }
    }
    entries.sort();
    entries
}

#[test]
fn segment_valid_page_writes_json() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = tmp.path().join("corpus");
    let results = tmp.path().join("results");
    assert_success(&lineseg(&[
        "gen",
        "--lines",
        "5",
        "--seed",
        "3",
        "-o",
        corpus.to_str().unwrap(),
    ]));
    assert_success(&lineseg(&[
        "segment",
        corpus.to_str().unwrap(),
        "-o",
        results.to_str().unwrap(),
    ]));
    let json = fs::read_to_string(results.join("page_0000.json")).unwrap();
    assert!(json.contains("\"image\": \"page_0000.pgm\""));
}

#[test]
fn segment_continues_past_corrupt_file() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("in");
    fs::create_dir_all(&input).unwrap();

    // One valid page and one truncated file.
    let corpus = tmp.path().join("corpus");
    assert_success(&lineseg(&[
        "gen",
        "--lines",
        "4",
        "--seed",
        "9",
        "-o",
        corpus.to_str().unwrap(),
    ]));
    fs::copy(corpus.join("page_0000.pgm"), input.join("good.pgm")).unwrap();
    fs::write(input.join("bad.pgm"), b"P5 4 4 255 \x00\x01").unwrap();

    let results = tmp.path().join("results");
    let out = lineseg(&[
        "segment",
        input.to_str().unwrap(),
        "-o",
        results.to_str().unwrap(),
    ]);
    assert!(!out.status.success(), "corrupt input must fail the batch");
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("bad.pgm"));
    assert!(results.join("good.json").is_file());
    assert!(!results.join("bad.json").exists());
}

#[test]
fn segment_tolerance_override_is_echoed() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = tmp.path().join("corpus");
    assert_success(&lineseg(&[
        "gen",
        "--lines",
        "3",
        "--seed",
        "5",
        "-o",
        corpus.to_str().unwrap(),
    ]));
    let results = tmp.path().join("results");
    assert_success(&lineseg(&[
        "segment",
        corpus.join("page_0000.pgm").to_str().unwrap(),
        "-o",
        results.to_str().unwrap(),
        "--tolerance",
        "20",
    ]));
    let json = fs::read_to_string(results.join("page_0000.json")).unwrap();
    assert!(json.contains("\"alignment_tolerance\": 20"));
}

#[test]
fn eval_of_results_as_their_own_truth_is_perfect() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = tmp.path().join("corpus");
    let results = tmp.path().join("results");
    assert_success(&lineseg(&[
        "gen",
        "--lines",
        "6",
        "--seed",
        "21",
        "--pages",
        "2",
        "-o",
        corpus.to_str().unwrap(),
    ]));
    assert_success(&lineseg(&[
        "segment",
        corpus.to_str().unwrap(),
        "-o",
        results.to_str().unwrap(),
    ]));

    // Re-issue each result's rectangles as JSON ground truth.
    let truth = tmp.path().join("truth");
    fs::create_dir_all(&truth).unwrap();
    for stem in ["page_0000", "page_0001"] {
        let report: serde_json::Value = serde_json::from_str(
            &fs::read_to_string(results.join(format!("{stem}.json"))).unwrap(),
        )
        .unwrap();
        let lines: Vec<serde_json::Value> = report["lines"]
            .as_array()
            .unwrap()
            .iter()
            .map(|l| serde_json::json!({ "bbox": l["bbox"] }))
            .collect();
        let gt = serde_json::json!({ "line_count": lines.len(), "lines": lines });
        fs::write(truth.join(format!("{stem}.gt.json")), gt.to_string()).unwrap();
    }

    let reports = tmp.path().join("reports");
    assert_success(&lineseg(&[
        "eval",
        "--results",
        results.to_str().unwrap(),
        "--truth",
        truth.to_str().unwrap(),
        "-o",
        reports.to_str().unwrap(),
    ]));
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(reports.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["pages"], 2);
    assert_eq!(summary["mean_dr"], 1.0);
    assert_eq!(summary["count_accuracy_rate"], 1.0);
}

#[test]
fn eval_empty_corpus_reports_no_pairs() {
    let tmp = tempfile::tempdir().unwrap();
    let empty = tmp.path().join("empty");
    fs::create_dir_all(&empty).unwrap();
    let out = lineseg(&[
        "eval",
        "--results",
        empty.to_str().unwrap(),
        "--truth",
        empty.to_str().unwrap(),
        "-o",
        tmp.path().join("reports").to_str().unwrap(),
    ]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("no pairs found"));
}

#[test]
fn eval_lists_and_skips_unpaired_results() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = tmp.path().join("corpus");
    let results = tmp.path().join("results");
    assert_success(&lineseg(&[
        "gen",
        "--lines",
        "4",
        "--seed",
        "2",
        "--pages",
        "2",
        "-o",
        corpus.to_str().unwrap(),
    ]));
    assert_success(&lineseg(&[
        "segment",
        corpus.to_str().unwrap(),
        "-o",
        results.to_str().unwrap(),
    ]));
    // Remove one page's ground truth entirely.
    fs::remove_file(corpus.join("page_0001.gt.pgm")).unwrap();
    fs::remove_file(corpus.join("page_0001.gt.json")).unwrap();

    let reports = tmp.path().join("reports");
    let out = lineseg(&[
        "eval",
        "--results",
        results.to_str().unwrap(),
        "--truth",
        corpus.to_str().unwrap(),
        "-o",
        reports.to_str().unwrap(),
    ]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("page_0001"));
    // The paired page is still evaluated.
    assert!(reports.join("page_0000.report.json").is_file());
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(reports.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["pages"], 1);
}

#[test]
fn gen_same_seed_same_bytes() {
    let tmp = tempfile::tempdir().unwrap();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    for dir in [&a, &b] {
        assert_success(&lineseg(&[
            "gen",
            "--lines",
            "5",
            "--seed",
            "7",
            "-o",
            dir.to_str().unwrap(),
        ]));
    }
    assert_eq!(tree_bytes(&a), tree_bytes(&b));
}

#[test]
fn gen_zero_lines_emits_blank_page() {
    let tmp = tempfile::tempdir().unwrap();
    let out_dir = tmp.path().join("blank");
    assert_success(&lineseg(&[
        "gen",
        "--lines",
        "0",
        "--seed",
        "1",
        "-o",
        out_dir.to_str().unwrap(),
    ]));
    let bytes = fs::read(out_dir.join("page_0000.pgm")).unwrap();
    let img = lineseg_core::raster::load_gray(&bytes).unwrap();
    assert!(img.pixels().iter().all(|&p| p == 255));
    let gt: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("page_0000.gt.json")).unwrap())
            .unwrap();
    assert_eq!(gt["line_count"], 0);
}

#[test]
fn gen_preset_is_recorded_in_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let out_dir = tmp.path().join("sparse");
    assert_success(&lineseg(&[
        "gen",
        "--preset",
        "sparse-short-lines",
        "--pages",
        "1",
        "-o",
        out_dir.to_str().unwrap(),
    ]));
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["preset"], "sparse-short-lines");
    assert_eq!(manifest["pages"].as_array().unwrap().len(), 1);
}

#[test]
fn gen_rejects_unknown_preset_and_bad_spec() {
    let tmp = tempfile::tempdir().unwrap();
    let out = lineseg(&[
        "gen",
        "--preset",
        "curved",
        "-o",
        tmp.path().join("x").to_str().unwrap(),
    ]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown preset"));

    // Bands that cannot fit the page name the violated invariant.
    let out = lineseg(&[
        "gen",
        "--lines",
        "50",
        "--height",
        "200",
        "-o",
        tmp.path().join("y").to_str().unwrap(),
    ]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("must fit"));
}

#[test]
fn verbose_eval_embeds_score_table() {
    let tmp = tempfile::tempdir().unwrap();
    let bench_dir = tmp.path().join("bench");
    assert_success(&lineseg(&[
        "bench",
        "--lines",
        "3",
        "--seed",
        "8",
        "-o",
        bench_dir.to_str().unwrap(),
    ]));
    let reports = tmp.path().join("verbose-reports");
    assert_success(&lineseg(&[
        "eval",
        "--results",
        bench_dir.join("results").to_str().unwrap(),
        "--truth",
        bench_dir.join("corpus").to_str().unwrap(),
        "-o",
        reports.to_str().unwrap(),
        "--verbose",
    ]));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(reports.join("page_0000.report.json")).unwrap())
            .unwrap();
    assert!(report["scores"].is_array());
    assert_eq!(report["scores"].as_array().unwrap().len(), 3);
}
