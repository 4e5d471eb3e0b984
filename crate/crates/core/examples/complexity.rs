//! Worst-case sphere decoder node counts, full band against sub-bands of 16.
//!
//! cargo run --example complexity

use wds_core::detection::{fft_complexity, sd_complexity_bound};

fn main() -> wds_core::Result<()> {
    println!("{:>5} {:>8} {:>12} {:>14}", "N", "fft", "multi-band", "single-band");
    for n in [16usize, 32, 64, 128, 256] {
        let single = sd_complexity_bound(n, None)?.to_string();
        println!(
            "{n:>5} {:>8} {:>12} {:>14}",
            fft_complexity(n)?,
            sd_complexity_bound(n, Some(16))?,
            if single.len() > 14 { format!("~1e{}", single.len() - 1) } else { single }
        );
    }
    Ok(())
}
