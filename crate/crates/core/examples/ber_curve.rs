//! Bit error rate of the mixed multi-band waveform with the multi-band sphere
//! decoder, next to the orthogonal QPSK reference.
//!
//! cargo run --release --example ber_curve [trials]

use wds_core::io::write_curve_file;
use wds_core::metrics::{eb_n0_from_es_n0, qpsk_ber_theory, run_ber, DetectorKind, ExperimentSpec};
use wds_core::waveform::{mamb_pattern, WaveformConfig};

fn main() -> wds_core::Result<()> {
    let trials = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(20);
    let cfg = WaveformConfig::with_subcarriers(256)?;
    let mut spec = ExperimentSpec::new(
        "mamb",
        cfg,
        mamb_pattern(&cfg)?,
        vec![4.0, 6.0, 8.0, 10.0, 12.0],
        DetectorKind::MultibandSd,
    );
    spec.trials_per_point = trials;
    spec.min_bit_errors = 0;
    let report = run_ber(&spec)?;
    for (p, t) in report.points.iter().zip(&report.elapsed_s) {
        let (lo, hi) = p.ber_interval();
        println!(
            "Es/N0 {:>5.1} dB  BER {:.3e} [{lo:.1e}, {hi:.1e}]  OFDM {:.3e}  ({t:.1} s)",
            p.es_n0_db,
            p.ber(),
            qpsk_ber_theory(eb_n0_from_es_n0(p.es_n0_db))
        );
    }
    let out = std::env::temp_dir().join("mamb_ber.csv");
    write_curve_file(&out, &report.curve())?;
    println!("curve written to {}", out.display());
    Ok(())
}
