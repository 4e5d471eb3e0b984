//! Files: classifier datasets, run configuration, curve CSVs, run manifests
//! and SVG plots.

pub mod config;
pub mod curve;
pub mod dataset;
pub mod manifest;
pub mod plot;

pub use config::{resolve_classes, RunConfig, SEED_ENV};
pub use curve::{read_curve_file, write_curve_file};
pub use dataset::{export_dataset, read_dataset, DatasetManifest, DatasetRecord, DatasetSpec};
pub use manifest::{content_hash, RunManifest};
pub use plot::{render_svg, PlotOptions, Series};
