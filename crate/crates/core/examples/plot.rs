//! Renders the QPSK reference curve to an SVG file.
//!
//! cargo run --example plot

use wds_core::io::{render_svg, PlotOptions, Series};
use wds_core::metrics::{qpsk_ber_theory, CurvePoint};

fn main() -> wds_core::Result<()> {
    let points: Vec<CurvePoint> = (0..=12)
        .map(|db| {
            let v = qpsk_ber_theory(db as f64);
            CurvePoint { es_n0_db: db as f64, value: v, ci_low: v, ci_high: v }
        })
        .collect();
    let svg = render_svg(
        &[Series { label: "QPSK theory".into(), points }],
        &PlotOptions { title: "Orthogonal reference".into(), x_label: "Eb/N0 (dB)".into(), ..PlotOptions::default() },
    )?;
    let out = std::env::temp_dir().join("qpsk_reference.svg");
    std::fs::write(&out, svg)?;
    println!("wrote {}", out.display());
    Ok(())
}
