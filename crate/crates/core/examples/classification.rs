//! How mixing sub-band compressions shrinks an eavesdropper's chance of
//! guessing the waveform class.
//!
//! cargo run --example classification

use wds_core::metrics::{accuracy_approx, accuracy_drop, max_classes, replay_sca, sca, ConfusionMatrix};

fn main() -> wds_core::Result<()> {
    let classes = max_classes(3, 16)?;
    println!("3 compressions over 16 sub-bands: {classes} classes");
    println!("chance accuracy 3 classes {:.4}, 7 classes {:.4}", accuracy_approx(3)?, accuracy_approx(7)?);
    println!("accuracy drop 3 -> 7 classes: {:.1} %", 100.0 * accuracy_drop(3, 7)?);

    // A classifier that only resolves the first class.
    let names = vec!["MAMB-1".to_string(), "MAMB-2".into(), "MAMB-3".into()];
    let cm = ConfusionMatrix::new(names, vec![vec![0.9, 0.05, 0.05], vec![0.1, 0.5, 0.4], vec![0.1, 0.4, 0.5]])?;
    let (hits, trials) = replay_sca(&cm, 5000, 1);
    println!("expected accuracy {:.4}, replayed {:.4}", cm.expected_sca(), sca(&hits, &trials)?);
    Ok(())
}
