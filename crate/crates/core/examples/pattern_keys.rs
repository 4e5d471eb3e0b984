//! Two endpoints sharing a logistic-map seed derive the same compression keys,
//! while a seed off by 1e-12 drifts apart within a few dozen keys.
//!
//! cargo run --example pattern_keys

use wds_core::keygen::{paired_check, plan_from_keys, KeyQuantizer, KeySource, PatternKeyStream};
use wds_core::waveform::WaveformConfig;

fn main() -> wds_core::Result<()> {
    let q = KeyQuantizer::default();
    let source = KeySource::default();
    let alice = PatternKeyStream::generate(&source, &q, 64)?;
    let bob = PatternKeyStream::generate(&source, &q, 64)?;
    println!("paired keys agree: {}", paired_check(&alice, &bob));
    println!("first keys: {:?}", &alice.values()[..12]);

    let eve_source = KeySource {
        phi0: source.phi0 + 1e-12,
        ..source.clone()
    };
    let eve = PatternKeyStream::generate(&eve_source, &q, 64)?;
    let first = alice.keys.iter().zip(&eve.keys).position(|(a, b)| a != b);
    println!("perturbed seed first disagrees at key {first:?}");

    let cfg = WaveformConfig::with_subcarriers(256)?;
    let plan = plan_from_keys(&cfg, &PatternKeyStream::generate(&source, &q, 16)?)?;
    println!(
        "keyed plan: {} sub-bands, {} data sub-carriers, betas {:?}",
        plan.n_subbands(),
        plan.n_data(),
        &plan.data_betas()[..4]
    );
    print!("{}", alice.to_text().lines().take(8).collect::<Vec<_>>().join("\n"));
    println!();
    Ok(())
}
