//! `lineseg` — batch line segmentation for handwritten document images.
//!
//! Subcommands: `segment` pages into line JSON, `eval` results against
//! ground truth, `gen` synthetic corpora, and `bench` for the whole
//! gen-segment-eval loop in one pass.

use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod bench;
mod evaluate;
mod generate;
mod options;
mod segment;
mod util;

#[derive(Parser)]
#[command(name = "lineseg", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Segment document images into text lines
    Segment(segment::SegmentArgs),
    /// Evaluate segmentation results against ground truth
    Eval(evaluate::EvalArgs),
    /// Generate a synthetic corpus with ground truth
    Gen(generate::GenArgs),
    /// Generate, segment, and evaluate in one pass
    Bench(bench::BenchArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Segment(args) => segment::run(&args),
        Command::Eval(args) => evaluate::run(&args),
        Command::Gen(args) => generate::run(&args),
        Command::Bench(args) => bench::run(&args),
    };
    match outcome {
        Ok(0) => ExitCode::SUCCESS,
        Ok(n) => {
            eprintln!("{n} file error(s)");
            ExitCode::FAILURE
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
