//! Writes a small classifier dataset and reads it back.
//!
//! cargo run --release --example dataset

use wds_core::io::{export_dataset, read_dataset, DatasetSpec};
use wds_core::waveform::{sb_pattern, WaveformConfig};

fn main() -> wds_core::Result<()> {
    let cfg = WaveformConfig::with_subcarriers(256)?;
    let mut spec = DatasetSpec::new(sb_pattern(&cfg)?, 5);
    spec.symbols_per_class = 16;
    let dir = std::env::temp_dir().join("wds_dataset_example");
    let manifest = export_dataset(&spec, &dir)?;
    println!("{} records of {} bytes in {}", manifest.records, manifest.record_bytes, dir.display());

    let (_, records) = read_dataset(&dir)?;
    for r in records.iter().step_by(16).take(7) {
        let p = r.samples().iter().map(|z| z.norm_sqr()).sum::<f64>() / r.samples().len() as f64;
        println!("label {} ({}) at {:>5.1} dB, window power {p:.3}", r.label, manifest.classes[r.label as usize].name, r.es_n0_db);
    }
    Ok(())
}
