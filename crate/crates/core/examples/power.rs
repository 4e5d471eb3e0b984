//! Transmitter power of the beamforming baselines against the waveform approach.
//!
//! cargo run --example power

use wds_core::metrics::{power, Framework, PowerModelParams};

fn main() -> wds_core::Result<()> {
    let params = PowerModelParams::default();
    let wds = power(Framework::Wds, &params)?;
    for f in Framework::ALL {
        let p = power(f, &params)?;
        println!("{:<11} {p:>7.0} mW  saving {:>5.1} %", f.label(), 100.0 * (1.0 - wds / p));
    }

    // Sensitivity to the RF chain count of the fully digital array.
    for n_rf in [4, 8, 16] {
        let p = PowerModelParams { n_rf_full: n_rf, ..params };
        println!("digital-bf with {n_rf:>2} RF chains: {:.0} mW", power(Framework::DigitalBf, &p)?);
    }
    Ok(())
}
