//! Correlation matrix of single-band SEFDM: unit diagonal when the receiver is
//! matched, and a condition number that explodes as compression grows.
//!
//! cargo run --example correlation

use wds_core::waveform::{correlation_matrix, Bcf, WaveformConfig};

fn main() -> wds_core::Result<()> {
    let cfg = WaveformConfig::with_subcarriers(16)?;
    println!("{:>5} {:>14} {:>12}", "alpha", "cond(C)", "|C[0,1]|");
    for a in [1.0, 0.95, 0.9, 0.85, 0.8, 0.75, 0.7] {
        let alpha = Bcf::new(a)?;
        let c = correlation_matrix(&cfg, alpha, alpha)?;
        println!("{a:>5.2} {:>14.4e} {:>12.5}", c.condition_number(), c.entries[(0, 1)].norm());
    }

    // Receiver assuming 0.85 while the transmitter used 0.8.
    let mism = correlation_matrix(&cfg, Bcf::new(0.8)?, Bcf::new(0.85)?)?;
    let diag: f64 = (0..mism.dim()).map(|i| mism.entries[(i, i)].norm()).sum::<f64>() / mism.dim() as f64;
    println!("mismatched receiver: mean |diagonal| = {diag:.4}, matched = {}", mism.is_matched());
    Ok(())
}
