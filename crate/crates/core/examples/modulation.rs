//! Builds one symbol of every band architecture and prints its shape.
//!
//! cargo run --example modulation

use wds_core::waveform::{pattern, Constellation, PatternKind, SefdmModem, WaveformConfig};

fn main() -> wds_core::Result<()> {
    let cfg = WaveformConfig::with_subcarriers(256)?;
    let qpsk = Constellation::Qpsk;
    println!("{:<10} {:>6} {:>9} {:>8} {:>10}", "class", "data", "samples", "power", "bandwidth");
    for kind in [PatternKind::Sb, PatternKind::Mb, PatternKind::Amb, PatternKind::Mamb] {
        for class in pattern(kind, &cfg)? {
            let modem = SefdmModem::new(class.plan.clone())?;
            let n = class.plan.n_data();
            let symbols: Vec<_> = (0..n).map(|k| qpsk.point((k * 7 + 3) % 4)).collect();
            let x = modem.modulate(&symbols)?;
            println!(
                "{:<10} {:>6} {:>9} {:>8.4} {:>10.4}",
                class.name,
                n,
                x.len(),
                x.mean_power(),
                class.plan.occupied_bandwidth()
            );
        }
    }
    Ok(())
}
