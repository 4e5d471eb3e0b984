use wds_core::io::{export_dataset, read_dataset, DatasetSpec, RunConfig};
use wds_core::waveform::{pattern, PatternKind, WaveformConfig};

#[test]
fn default_corpus_sizes() {
    let cfg = WaveformConfig::with_subcarriers(256).unwrap();
    let count = |kind| DatasetSpec::new(pattern(kind, &cfg).unwrap(), 0).total_records().unwrap();
    assert_eq!(count(PatternKind::Sb), 14_000);
    for kind in [PatternKind::Mb, PatternKind::Amb, PatternKind::Mamb] {
        assert_eq!(count(kind), 6_000);
    }
}

#[test]
fn records_cycle_the_snr_grid_per_class() {
    let cfg = WaveformConfig::with_subcarriers(256).unwrap();
    let mut spec = DatasetSpec::new(pattern(PatternKind::Mamb, &cfg).unwrap(), 9);
    spec.symbols_per_class = 10;
    spec.es_n0_grid = vec![-5.0, 5.0, 15.0];
    let dir = tempfile::tempdir().unwrap();
    export_dataset(&spec, dir.path()).unwrap();
    let (manifest, records) = read_dataset(dir.path()).unwrap();
    assert_eq!(manifest.records, 30);
    assert_eq!(manifest.classes.len(), 3);
    for label in 0..3u16 {
        let snrs: Vec<f32> = records.iter().filter(|r| r.label == label).map(|r| r.es_n0_db).collect();
        let want: Vec<f32> = (0..10).map(|j| [-5.0, 5.0, 15.0][j % 3]).collect();
        assert_eq!(snrs, want, "class {label}");
    }
}

#[test]
fn config_drives_the_dataset() {
    let text = r#"
seed = 4
[signal]
pattern = "sb"
classes = ["SB-OFDM", "SB-SEFDM-0.80"]
[dataset]
symbols_per_class = 3
es_n0_db = [10.0]
"#;
    let spec = RunConfig::parse(text, std::path::Path::new(".")).unwrap().dataset_spec().unwrap();
    assert_eq!(spec.total_records().unwrap(), 6);
    assert_eq!(spec.seed, 4);
    let dir = tempfile::tempdir().unwrap();
    let m = export_dataset(&spec, dir.path()).unwrap();
    assert_eq!(m.classes[1].name, "SB-SEFDM-0.80");
}
