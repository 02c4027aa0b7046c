//! Shared fixtures for the kernel benchmarks in `benches/`.

use std::path::PathBuf;

use age_core::graph::{load_dataset, DatasetPaths, LoadOptions};
use age_core::Dataset;

/// The converted Cora dataset shipped under `data/cora`.
pub fn cora() -> Dataset {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/cora");
    load_dataset(&DatasetPaths::in_dir(dir), LoadOptions::default()).expect("data/cora is missing")
}
