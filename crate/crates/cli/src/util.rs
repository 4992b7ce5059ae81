use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

const IMAGE_EXTENSIONS: [&str; 2] = ["pgm", "png"];

/// Expand files and directories into a sorted list of image paths.
///
/// Directory scans skip this tool's own side outputs (`*.gt.pgm` label maps
/// and `*.overlay.pgm` renderings) so a corpus directory can be passed
/// directly. Explicit file arguments are taken as-is, so a bad path still
/// gets a per-file error instead of silently vanishing.
pub fn collect_images(inputs: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for input in inputs {
        if input.is_dir() {
            for entry in
                fs::read_dir(input).with_context(|| format!("reading {}", input.display()))?
            {
                let path = entry?.path();
                if path.is_file() && is_page_image(&path) {
                    files.push(path);
                }
            }
        } else {
            files.push(input.clone());
        }
    }
    files.sort();
    if files.is_empty() {
        bail!("no input images found");
    }
    Ok(files)
}

fn is_page_image(path: &Path) -> bool {
    let has_extension = path
        .extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| IMAGE_EXTENSIONS.contains(&e.to_ascii_lowercase().as_str()));
    let name = path
        .file_name()
        .map(|s| s.to_string_lossy())
        .unwrap_or_default();
    has_extension && !name.ends_with(".gt.pgm") && !name.ends_with(".overlay.pgm")
}

pub fn file_stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)
            .with_context(|| format!("creating directory {}", parent.display()))?;
    }
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

/// Run one job per item, optionally on a bounded worker pool. Results come
/// back in input order either way.
pub fn map_items<T, R, F>(items: Vec<T>, jobs: usize, job: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if jobs > 1 {
        use rayon::prelude::*;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .expect("worker pool builds");
        return pool.install(|| items.into_par_iter().map(job).collect());
    }
    let _ = jobs;
    items.into_iter().map(job).collect()
}
