//! Pipeline benchmarks on a 2480x3508 synthetic page.
//!
//! With the default `parallel` feature the data-parallel stages run once on
//! a single-thread pool and once on all cores, so the two modes can be
//! compared from one run. Build with `--no-default-features` to measure the
//! plain sequential fallback instead.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use lineseg_core::ccl;
use lineseg_core::raster::{self, GrayImage};
use lineseg_core::segmenter::{self, SegParams};
use lineseg_core::synthgen::{self, CorpusSpec};

fn bench_page() -> GrayImage {
    let spec = CorpusSpec::preset("a4-300dpi").expect("preset exists");
    synthgen::generate(&spec.page_spec(0))
        .expect("page renders")
        .0
}

fn run_stage_benches(c: &mut Criterion, label: &str, runner: &dyn Fn(&(dyn Fn() + Sync))) {
    let img = bench_page();
    let mask = raster::binarize(&img);
    let params = SegParams::default();

    let mut group = c.benchmark_group("pipeline");
    group.sample_size(20);
    group.bench_function(BenchmarkId::new("compute_stats", label), |b| {
        b.iter(|| {
            runner(&|| {
                std::hint::black_box(raster::compute_stats(&img));
            })
        })
    });
    group.bench_function(BenchmarkId::new("binarize", label), |b| {
        b.iter(|| {
            runner(&|| {
                std::hint::black_box(raster::binarize(&img));
            })
        })
    });
    group.bench_function(BenchmarkId::new("label_components", label), |b| {
        b.iter(|| {
            runner(&|| {
                std::hint::black_box(ccl::label_components(&mask));
            })
        })
    });
    group.bench_function(BenchmarkId::new("segment_page", label), |b| {
        b.iter(|| {
            runner(&|| {
                std::hint::black_box(segmenter::segment_page(&img, &params).unwrap());
            })
        })
    });
    group.finish();
}

#[cfg(feature = "parallel")]
fn pipeline_benches(c: &mut Criterion) {
    let cores = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(4);
    for threads in [1, cores] {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("pool builds");
        let label = format!("rayon-{threads}-thread");
        // The inner closure re-wraps the &dyn Fn so it satisfies Send.
        #[allow(clippy::redundant_closure)]
        run_stage_benches(c, &label, &|job| pool.install(|| job()));
        if cores == 1 {
            break;
        }
    }
}

#[cfg(not(feature = "parallel"))]
fn pipeline_benches(c: &mut Criterion) {
    run_stage_benches(c, "sequential", &|job| job());
}

criterion_group!(benches, pipeline_benches);
criterion_main!(benches);
